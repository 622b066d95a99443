// SPDX-License-Identifier: Apache-2.0
//
// mmce - wideband mmWave MIMO channel estimation with hybrid beamforming
// and low-resolution ADCs.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>
#include <unsupported/Eigen/KroneckerProduct>

#include "mmce/errors.hpp"
#include "mmce/sensing.hpp"
#include "oracles.hpp"

using namespace mmce;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace {

std::vector<FrameConfig> draw_frames(Rng &rng, int count, int n_tx, int n_rx, int chains,
                                     int streams, int frame_len, int ps_bits = 6) {
    std::vector<FrameConfig> frames;
    for (int m = 0; m < count; ++m) {
        frames.push_back(draw_frame(rng, n_tx, n_rx, chains, chains, streams, frame_len, ps_bits));
    }
    return frames;
}

} // namespace

TEST_CASE("build_dictionary: shapes, grids and atom indexing") {
    const ArrayGeometry tx{32, 0.5};
    const ArrayGeometry rx{16, 0.5};
    const Dictionary dict = build_dictionary(tx, rx, 64, 32, 4);
    CHECK(dict.tx_grid.rows() == 32);
    CHECK(dict.tx_grid.cols() == 64);
    CHECK(dict.rx_grid.rows() == 16);
    CHECK(dict.rx_grid.cols() == 32);
    CHECK(dict.vec_len() == 2048);
    CHECK(dict.n_atoms() == 8192);
    for (int g = 0; g < 64; ++g) {
        CHECK(dict.grid_freq_tx(g) == doctest::Approx(-0.5 + g / 64.0));
    }
    const Eigen::Index j = dict.atom_index(2, 17, 9);
    const Dictionary::AtomCoords c = dict.atom_coords(j);
    CHECK(c.tap == 2);
    CHECK(c.tx_bin == 17);
    CHECK(c.rx_bin == 9);
    CHECK_THROWS_AS(dict.atom_index(4, 0, 0), ParameterError);
    CHECK_THROWS_AS(build_dictionary(tx, rx, 16, 32, 4), ParameterError);
}

TEST_CASE("build_dictionary: square grid is unitary") {
    const ArrayGeometry tx{8, 0.5};
    const ArrayGeometry rx{8, 0.5};
    const Dictionary dict = build_dictionary(tx, rx, 8, 8, 1);
    CHECK((dict.tx_grid.adjoint() * dict.tx_grid - MatrixXcd::Identity(8, 8)).norm() < 1e-12);
}

TEST_CASE("dictionary: structured synthesize matches the explicit matrix") {
    const ArrayGeometry tx{4, 0.5};
    const ArrayGeometry rx{3, 0.5};
    const Dictionary dict = build_dictionary(tx, rx, 8, 6, 2);
    const MatrixXcd psi = dict.materialize();
    CHECK(psi.rows() == dict.vec_len());
    CHECK(psi.cols() == dict.n_atoms());

    Rng rng(17);
    for (int rep = 0; rep < 10; ++rep) {
        VectorXcd h(dict.n_atoms());
        for (Eigen::Index i = 0; i < h.size(); ++i) {
            h(i) = rng.complex_normal(1.0);
        }
        CHECK((dict.synthesize(h) - psi * h).norm() < 1e-10 * h.norm());
        VectorXcd v(dict.vec_len());
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            v(i) = rng.complex_normal(1.0);
        }
        CHECK((dict.analyze(v) - psi.adjoint() * v).norm() < 1e-10 * v.norm());
    }
}

TEST_CASE("dictionary: explicit Psi equals I (x) conj(U_t) (x) U_r") {
    const ArrayGeometry tx{3, 0.5};
    const ArrayGeometry rx{2, 0.5};
    const Dictionary dict = build_dictionary(tx, rx, 4, 3, 2);
    const MatrixXcd per_tap =
        Eigen::kroneckerProduct(dict.tx_grid.conjugate(), dict.rx_grid).eval();
    const MatrixXcd psi = dict.materialize();
    const Eigen::Index rows = per_tap.rows();
    const Eigen::Index cols = per_tap.cols();
    CHECK((psi.topLeftCorner(rows, cols) - per_tap).norm() < 1e-14);
    CHECK((psi.bottomRightCorner(rows, cols) - per_tap).norm() < 1e-14);
    CHECK(psi.topRightCorner(rows, cols).norm() == 0.0);
    CHECK(psi.bottomLeftCorner(rows, cols).norm() == 0.0);
}

TEST_CASE("on-grid synthesis: vec(H) equals Psi h for snapped paths") {
    const ArrayGeometry tx{4, 0.5};
    const ArrayGeometry rx{3, 0.5};
    const PulseShape pulse{};
    const Dictionary dict = build_dictionary(tx, rx, 8, 6, 3);
    Rng rng(23);
    for (int rep = 0; rep < 25; ++rep) {
        const PathSet raw = sample_path_set(rng, 2, 3, pulse, 1.0);
        const PathSet paths = snap_paths_to_grid(raw, dict, tx, rx);
        const WidebandChannel ch = build_channel(paths, tx, rx, 3, pulse);
        const VectorXcd h = on_grid_sparse_vector(paths, dict, tx, rx, pulse);
        CHECK(int((h.array().abs() > 1e-12).count()) <= 2 * 3);
        const VectorXcd lhs = vectorize_channel(ch);
        CHECK((lhs - dict.synthesize(h)).norm() < 1e-10 * lhs.norm());
    }
}

TEST_CASE("dictionary coherence: no duplicated atoms on oversampled grids") {
    const ArrayGeometry tx{4, 0.5};
    const ArrayGeometry rx{3, 0.5};
    const Dictionary dict = build_dictionary(tx, rx, 8, 6, 1);
    const MatrixXcd psi = dict.materialize();
    double max_coherence = 0.0;
    for (Eigen::Index i = 0; i < psi.cols(); ++i) {
        for (Eigen::Index j = i + 1; j < psi.cols(); ++j) {
            max_coherence = std::max(
                max_coherence, std::abs(psi.col(i).dot(psi.col(j))) /
                                   (psi.col(i).norm() * psi.col(j).norm()));
        }
    }
    CHECK(max_coherence < 1.0 - 1e-9);
}

TEST_CASE("frame_block: scalar system collapses to s * f * conj(w)") {
    FrameConfig frame;
    frame.rf_precoder = MatrixXcd::Constant(1, 1, std::polar(1.0, 0.7));
    frame.bb_precoder = baseband_scaler(frame.rf_precoder, 1);
    frame.rf_combiner = MatrixXcd::Constant(1, 1, std::polar(1.0, -0.3));
    frame.symbols = MatrixXcd::Constant(1, 1, std::complex<double>(0.6, 0.2));
    const MatrixXcd block = frame_block(frame, 1);
    CHECK(block.rows() == 1);
    CHECK(block.cols() == 1);
    const std::complex<double> expected = frame.symbols(0, 0) *
                                          (frame.rf_precoder(0, 0) * frame.bb_precoder(0, 0)) *
                                          std::conj(frame.rf_combiner(0, 0));
    CHECK(std::abs(block(0, 0) - expected) < 1e-14);
}

TEST_CASE("frame_block: default dimensions give a 64 x 2048 block") {
    Rng rng(3);
    const FrameConfig frame = draw_frame(rng, 32, 16, 4, 4, 4, 16, 6);
    const MatrixXcd block = frame_block(frame, 4);
    CHECK(block.rows() == 64);
    CHECK(block.cols() == 2048);
}

TEST_CASE("frame_block: matches the time-domain convolution oracle") {
    const ArrayGeometry tx{3, 0.5};
    const ArrayGeometry rx{2, 0.5};
    const PulseShape pulse{};
    Rng rng(29);
    for (int rep = 0; rep < 10; ++rep) {
        const PathSet paths = sample_path_set(rng, 2, 2, pulse, 1.0);
        const WidebandChannel ch = build_channel(paths, tx, rx, 2, pulse);
        const FrameConfig frame = draw_frame(rng, 3, 2, 2, 2, 2, 3, 6);
        const MatrixXcd block = frame_block(frame, 2);
        const VectorXcd via_block = block * vectorize_channel(ch);
        const MatrixXcd direct = oracles::received_frame(ch.taps, frame, 1.0);
        CHECK((via_block - oracles::vec(direct)).norm() < 1e-10 * via_block.norm());
    }
}

TEST_CASE("frame_block: explicit block equals the Kronecker formula") {
    Rng rng(31);
    const int n_taps = 2;
    const FrameConfig frame = draw_frame(rng, 3, 2, 2, 2, 2, 4, 6);
    const MatrixXcd stacked = build_toeplitz_symbols(frame.symbols, n_taps);
    const MatrixXcd f_tilde = Eigen::kroneckerProduct(MatrixXcd::Identity(n_taps, n_taps),
                                                      frame.precoder())
                                  .eval();
    const MatrixXcd expected =
        Eigen::kroneckerProduct((stacked.transpose() * f_tilde.transpose()).eval(),
                                frame.rf_combiner.adjoint().eval())
            .eval();
    CHECK((frame_block(frame, n_taps) - expected).norm() < 1e-12);
}

TEST_CASE("Kronecker mixed-product identity on random small matrices") {
    Rng rng(37);
    const int n_taps = 2;
    for (int rep = 0; rep < 20; ++rep) {
        const FrameConfig frame = draw_frame(rng, 4, 3, 2, 2, 2, 5, 6);
        MatrixXcd channel(3, n_taps * 4);
        for (Eigen::Index i = 0; i < channel.size(); ++i) {
            *(channel.data() + i) = rng.complex_normal(1.0);
        }
        const MatrixXcd stacked = build_toeplitz_symbols(frame.symbols, n_taps);
        const MatrixXcd f_tilde =
            Eigen::kroneckerProduct(MatrixXcd::Identity(n_taps, n_taps), frame.precoder())
                .eval();
        const VectorXcd lhs = frame_block(frame, n_taps) * oracles::vec(channel);
        const MatrixXcd rhs_mat =
            frame.rf_combiner.adjoint() * channel * f_tilde * stacked;
        CHECK((lhs - oracles::vec(rhs_mat)).norm() < 1e-12 * lhs.norm());
    }
}

TEST_CASE("PhiOperator: apply/adjoint/rank-one agree with the explicit matrix") {
    Rng rng(41);
    const int n_taps = 2;
    const auto frames = draw_frames(rng, 3, 4, 3, 2, 2, 5);
    const PhiOperator phi(frames, n_taps);
    CHECK(phi.rows() == 3 * 5 * 2);
    CHECK(phi.cols() == n_taps * 4 * 3);
    const MatrixXcd dense = phi.materialize();

    VectorXcd vec_h(phi.cols());
    for (Eigen::Index i = 0; i < vec_h.size(); ++i) {
        vec_h(i) = rng.complex_normal(1.0);
    }
    CHECK((phi.apply(vec_h) - dense * vec_h).norm() < 1e-12 * vec_h.norm());

    VectorXcd y(phi.rows());
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        y(i) = rng.complex_normal(1.0);
    }
    CHECK((phi.apply_adjoint(y) - dense.adjoint() * y).norm() < 1e-12 * y.norm());

    // adjoint identity <Phi x, y> = <x, Phi^H y>
    const std::complex<double> lhs = phi.apply(vec_h).dot(y);
    const std::complex<double> rhs = vec_h.dot(phi.apply_adjoint(y));
    CHECK(std::abs(lhs - rhs) < 1e-10);

    // rank-one application equals Phi * vec of a one-tap outer product
    const Dictionary dict = build_dictionary(ArrayGeometry{4, 0.5}, ArrayGeometry{3, 0.5},
                                             8, 6, n_taps);
    const VectorXcd u_r = dict.rx_grid.col(2);
    const VectorXcd u_t = dict.tx_grid.col(5);
    MatrixXcd channel = MatrixXcd::Zero(3, n_taps * 4);
    channel.middleCols(4, 4) = u_r * u_t.adjoint();
    CHECK((phi.apply_rank_one(1, u_r, u_t) - dense * oracles::vec(channel)).norm() < 1e-12);
}

TEST_CASE("simulate_observations: noiseless unquantized equals the Phi path") {
    const ArrayGeometry tx{8, 0.5};
    const ArrayGeometry rx{4, 0.5};
    const PulseShape pulse{};
    Rng rng(43);
    for (int rep = 0; rep < 5; ++rep) {
        const PathSet paths = sample_path_set(rng, 2, 3, pulse, 1.0);
        const WidebandChannel ch = build_channel(paths, tx, rx, 3, pulse);
        const auto frames = draw_frames(rng, 4, 8, 4, 2, 2, 6);
        Rng noise_rng(1);
        const SensingSystem sys =
            simulate_observations(ch, frames, 2.5, 0.0, AdcSpec::infinite(), noise_rng);
        const VectorXcd via_phi = std::sqrt(2.5) * sys.phi.apply(vectorize_channel(ch));
        CHECK((sys.observations - via_phi).norm() < 1e-9 * via_phi.norm());
        CHECK(sys.observations == sys.analog);
    }
}

TEST_CASE("simulate_observations: zero rho depends only on the noise stream") {
    const ArrayGeometry tx{4, 0.5};
    const ArrayGeometry rx{3, 0.5};
    const PulseShape pulse{};
    Rng rng(47);
    const PathSet p1 = sample_path_set(rng, 2, 2, pulse, 1.0);
    const PathSet p2 = sample_path_set(rng, 2, 2, pulse, 1.0);
    const WidebandChannel ch1 = build_channel(p1, tx, rx, 2, pulse);
    const WidebandChannel ch2 = build_channel(p2, tx, rx, 2, pulse);
    const auto frames = draw_frames(rng, 2, 4, 3, 2, 2, 4);

    Rng noise_a(5);
    Rng noise_b(5);
    const SensingSystem a =
        simulate_observations(ch1, frames, 0.0, 1.0, AdcSpec::finite(2), noise_a);
    const SensingSystem b =
        simulate_observations(ch2, frames, 0.0, 1.0, AdcSpec::finite(2), noise_b);
    CHECK(a.observations == b.observations);
    CHECK(a.analog == b.analog);

    // and the observations are the quantization of the analog vector
    const double expected_power = (0.0 + 1.0) / 2.0;
    CHECK(quantize_complex_vector(a.analog, a.adc, expected_power) == a.observations);
}

TEST_CASE("simulate_observations: pre-combining per-antenna SNR is calibrated") {
    const ArrayGeometry tx{8, 0.5};
    const ArrayGeometry rx{4, 0.5};
    const PulseShape pulse{};
    const int n_taps = 4;
    const double gain_var = default_gain_variance(pulse, n_taps);
    Rng rng(53);
    double signal_power = 0.0;
    long samples = 0;
    for (int rep = 0; rep < 400; ++rep) {
        const PathSet paths = sample_path_set(rng, 2, n_taps, pulse, gain_var);
        const WidebandChannel ch = build_channel(paths, tx, rx, n_taps, pulse);
        const auto frames = draw_frames(rng, 4, 8, 4, 2, 2, 8);
        for (const FrameConfig &frame : frames) {
            // measure before combining: x[n] = sum_d H_d F s[n-d]
            const MatrixXcd f = frame.precoder();
            for (int n = 0; n < 8; ++n) {
                VectorXcd x = VectorXcd::Zero(4);
                for (int d = 0; d < n_taps && d <= n; ++d) {
                    x += ch.taps[size_t(d)] * (f * frame.symbols.col(n - d));
                }
                signal_power += x.squaredNorm();
                samples += x.size();
            }
        }
    }
    const double per_antenna = signal_power / double(samples);
    // rho = 1, sigma_n^2 = 1: the ratio should be 0 dB within 0.5 dB
    CHECK(std::abs(10.0 * std::log10(per_antenna / 1.0)) < 0.5);
}

TEST_CASE("vectorize_channel: layout, Khatri-Rao identity and round trip") {
    const ArrayGeometry tx{2, 0.5};
    const ArrayGeometry rx{2, 0.5};
    const PulseShape pulse{};
    Rng rng(59);
    const PathSet paths = sample_path_set(rng, 2, 1, pulse, 1.0);
    const WidebandChannel ch = build_channel(paths, tx, rx, 1, pulse);

    const VectorXcd v = vectorize_channel(ch);
    CHECK(v(0) == ch.taps[0](0, 0));
    CHECK(v(1) == ch.taps[0](1, 0));
    CHECK(v(2) == ch.taps[0](0, 1));
    CHECK(v(3) == ch.taps[0](1, 1));

    // vec(H_d) = (conj(A_t) KR A_r) diag(Lambda_d) on random instances
    for (int rep = 0; rep < 20; ++rep) {
        const PathSet p = sample_path_set(rng, 3, 2, pulse, 1.0);
        const WidebandChannel c2 = build_channel(p, tx, rx, 2, pulse);
        for (int d = 0; d < 2; ++d) {
            const FactorizedTap f = factorized_tap(p, tx, rx, d, 2, pulse);
            const MatrixXcd kr =
                oracles::khatri_rao(f.tx_steering.conjugate(), f.rx_steering);
            const VectorXcd expected = kr * f.scaled_gains;
            CHECK((oracles::vec(c2.taps[size_t(d)]) - expected).norm() < 1e-12);
        }
    }

    const MatrixXcd back = devectorize_channel(v, 2, 2, 1);
    CHECK((back - ch.concatenated).norm() == 0.0);
}

TEST_CASE("two-path consistency: time domain vs matrix path on grid") {
    const ArrayGeometry tx{8, 0.5};
    const ArrayGeometry rx{4, 0.5};
    const PulseShape pulse{};
    const Dictionary dict = build_dictionary(tx, rx, 16, 8, 3);
    Rng rng(61);
    for (int rep = 0; rep < 10; ++rep) {
        const PathSet paths =
            snap_paths_to_grid(sample_path_set(rng, 2, 3, pulse, 1.0), dict, tx, rx);
        const WidebandChannel ch = build_channel(paths, tx, rx, 3, pulse);
        const auto frames = draw_frames(rng, 5, 8, 4, 2, 2, 6);
        Rng noise_rng(rep);
        const SensingSystem sys =
            simulate_observations(ch, frames, 1.7, 0.0, AdcSpec::infinite(), noise_rng);
        const VectorXcd h = on_grid_sparse_vector(paths, dict, tx, rx, pulse);
        const VectorXcd via_dict = std::sqrt(1.7) * sys.phi.apply(dict.synthesize(h));
        CHECK((sys.observations - via_dict).norm() <= 1e-8 * via_dict.norm());
    }
}

TEST_CASE("simulate_observations: parameter validation") {
    const ArrayGeometry tx{4, 0.5};
    const ArrayGeometry rx{3, 0.5};
    const PulseShape pulse{};
    Rng rng(67);
    const PathSet paths = sample_path_set(rng, 1, 2, pulse, 1.0);
    const WidebandChannel ch = build_channel(paths, tx, rx, 2, pulse);
    const auto frames = draw_frames(rng, 2, 4, 3, 2, 2, 4);
    Rng noise_rng(1);
    CHECK_THROWS_AS(
        simulate_observations(ch, frames, -1.0, 1.0, AdcSpec::infinite(), noise_rng),
        ParameterError);
    CHECK_THROWS_AS(
        simulate_observations(ch, frames, 1.0, -1.0, AdcSpec::infinite(), noise_rng),
        ParameterError);
    CHECK_THROWS_AS(simulate_observations(ch, {}, 1.0, 1.0, AdcSpec::infinite(), noise_rng),
                    ParameterError);
}
