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

#include "mmce/sensing.hpp"

#include <cmath>
#include <numbers>

#include "mmce/errors.hpp"

namespace mmce {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

Index Dictionary::atom_index(int tap, int tx_bin, int rx_bin) const {
    if (tap < 0 || tap >= n_taps || tx_bin < 0 || tx_bin >= g_tx() || rx_bin < 0 ||
        rx_bin >= g_rx()) {
        throw ParameterError("Dictionary::atom_index: coordinates out of range");
    }
    return (static_cast<Index>(tap) * g_tx() + tx_bin) * g_rx() + rx_bin;
}

Dictionary::AtomCoords Dictionary::atom_coords(Index atom) const {
    if (atom < 0 || atom >= n_atoms()) {
        throw ParameterError("Dictionary::atom_coords: atom index out of range");
    }
    AtomCoords c;
    c.rx_bin = static_cast<int>(atom % g_rx());
    const Index rest = atom / g_rx();
    c.tx_bin = static_cast<int>(rest % g_tx());
    c.tap = static_cast<int>(rest / g_tx());
    return c;
}

VectorXcd Dictionary::synthesize(const VectorXcd &h) const {
    if (h.size() != n_atoms()) {
        throw ParameterError("Dictionary::synthesize: coefficient length mismatch");
    }
    VectorXcd out(vec_len());
    const Index grid_block = g_tx() * g_rx();
    const Index tap_block = n_tx() * n_rx();
    for (int d = 0; d < n_taps; ++d) {
        Eigen::Map<const MatrixXcd> virt(h.data() + static_cast<Index>(d) * grid_block, g_rx(),
                                         g_tx());
        // vec(U_r V U_t^H) = (conj(U_t) (x) U_r) vec(V)
        Eigen::Map<MatrixXcd> tap(out.data() + static_cast<Index>(d) * tap_block, n_rx(),
                                  n_tx());
        tap.noalias() = rx_grid * virt * tx_grid.adjoint();
    }
    return out;
}

VectorXcd Dictionary::analyze(const VectorXcd &vec_h) const {
    if (vec_h.size() != vec_len()) {
        throw ParameterError("Dictionary::analyze: vector length mismatch");
    }
    VectorXcd out(n_atoms());
    const Index grid_block = g_tx() * g_rx();
    const Index tap_block = n_tx() * n_rx();
    for (int d = 0; d < n_taps; ++d) {
        Eigen::Map<const MatrixXcd> tap(vec_h.data() + static_cast<Index>(d) * tap_block,
                                        n_rx(), n_tx());
        Eigen::Map<MatrixXcd> virt(out.data() + static_cast<Index>(d) * grid_block, g_rx(),
                                   g_tx());
        virt.noalias() = rx_grid.adjoint() * tap * tx_grid;
    }
    return out;
}

MatrixXcd Dictionary::materialize() const {
    MatrixXcd psi = MatrixXcd::Zero(vec_len(), n_atoms());
    VectorXcd unit = VectorXcd::Zero(n_atoms());
    for (Index j = 0; j < n_atoms(); ++j) {
        unit(j) = 1.0;
        psi.col(j) = synthesize(unit);
        unit(j) = 0.0;
    }
    return psi;
}

Dictionary build_dictionary(const ArrayGeometry &tx, const ArrayGeometry &rx, int g_tx,
                            int g_rx, int n_taps) {
    if (n_taps < 1) {
        throw ParameterError("build_dictionary: n_taps must be >= 1");
    }
    if (g_tx < tx.n_elements || g_rx < rx.n_elements) {
        throw ParameterError("build_dictionary: grids must not undersample the arrays");
    }
    Dictionary dict;
    dict.n_taps = n_taps;
    dict.tx_grid.resize(tx.n_elements, g_tx);
    dict.rx_grid.resize(rx.n_elements, g_rx);
    dict.grid_freq_tx.resize(g_tx);
    dict.grid_freq_rx.resize(g_rx);
    for (int g = 0; g < g_tx; ++g) {
        dict.grid_freq_tx(g) = -0.5 + static_cast<double>(g) / g_tx;
        dict.tx_grid.col(g) = steering_vector(tx.n_elements, dict.grid_freq_tx(g));
    }
    for (int g = 0; g < g_rx; ++g) {
        dict.grid_freq_rx(g) = -0.5 + static_cast<double>(g) / g_rx;
        dict.rx_grid.col(g) = steering_vector(rx.n_elements, dict.grid_freq_rx(g));
    }
    return dict;
}

PhiOperator::PhiOperator(const std::vector<FrameConfig> &frames, int n_taps) {
    if (frames.empty()) {
        throw ParameterError("PhiOperator: at least one frame required");
    }
    if (n_taps < 1) {
        throw ParameterError("PhiOperator: n_taps must be >= 1");
    }
    n_taps_ = n_taps;
    n_tx_ = static_cast<int>(frames.front().rf_precoder.rows());
    n_rx_ = static_cast<int>(frames.front().rf_combiner.rows());
    n_rx_chains_ = static_cast<int>(frames.front().rf_combiner.cols());
    frame_len_ = static_cast<int>(frames.front().symbols.cols());

    frames_.reserve(frames.size());
    for (const FrameConfig &f : frames) {
        if (f.rf_precoder.rows() != n_tx_ || f.rf_combiner.rows() != n_rx_ ||
            f.rf_combiner.cols() != n_rx_chains_ || f.symbols.cols() != frame_len_ ||
            f.rf_precoder.cols() != f.bb_precoder.rows() ||
            f.bb_precoder.cols() != f.symbols.rows()) {
            throw ParameterError("PhiOperator: inconsistent frame dimensions");
        }
        const MatrixXcd precoder = f.precoder(); // n_tx x n_streams
        const MatrixXcd stacked = build_toeplitz_symbols(f.symbols, n_taps);
        Frame frame;
        frame.combiner = f.rf_combiner;
        frame.mixed_symbols.resize(static_cast<Index>(n_taps) * n_tx_, frame_len_);
        const Index n_streams = f.symbols.rows();
        for (int d = 0; d < n_taps; ++d) {
            frame.mixed_symbols.middleRows(static_cast<Index>(d) * n_tx_, n_tx_).noalias() =
                precoder * stacked.middleRows(static_cast<Index>(d) * n_streams, n_streams);
        }
        frames_.push_back(std::move(frame));
    }
}

VectorXcd PhiOperator::apply(const VectorXcd &vec_h) const {
    if (vec_h.size() != cols()) {
        throw ParameterError("PhiOperator::apply: vector length mismatch");
    }
    Eigen::Map<const MatrixXcd> channel(vec_h.data(), n_rx_,
                                        static_cast<Index>(n_taps_) * n_tx_);
    VectorXcd out(rows());
    const Index block = static_cast<Index>(frame_len_) * n_rx_chains_;
    MatrixXcd received(n_rx_chains_, frame_len_);
    for (std::size_t m = 0; m < frames_.size(); ++m) {
        received.noalias() =
            frames_[m].combiner.adjoint() * channel * frames_[m].mixed_symbols;
        Eigen::Map<MatrixXcd>(out.data() + static_cast<Index>(m) * block, n_rx_chains_,
                              frame_len_) = received;
    }
    return out;
}

VectorXcd PhiOperator::apply_adjoint(const VectorXcd &y) const {
    if (y.size() != rows()) {
        throw ParameterError("PhiOperator::apply_adjoint: vector length mismatch");
    }
    MatrixXcd grad = MatrixXcd::Zero(n_rx_, static_cast<Index>(n_taps_) * n_tx_);
    const Index block = static_cast<Index>(frame_len_) * n_rx_chains_;
    for (std::size_t m = 0; m < frames_.size(); ++m) {
        Eigen::Map<const MatrixXcd> received(y.data() + static_cast<Index>(m) * block,
                                             n_rx_chains_, frame_len_);
        grad.noalias() +=
            frames_[m].combiner * received * frames_[m].mixed_symbols.adjoint();
    }
    return Eigen::Map<const VectorXcd>(grad.data(), grad.size());
}

VectorXcd PhiOperator::apply_rank_one(int tap, const VectorXcd &rx_atom,
                                      const VectorXcd &tx_atom) const {
    if (tap < 0 || tap >= n_taps_) {
        throw ParameterError("PhiOperator::apply_rank_one: tap out of range");
    }
    if (rx_atom.size() != n_rx_ || tx_atom.size() != n_tx_) {
        throw ParameterError("PhiOperator::apply_rank_one: atom length mismatch");
    }
    VectorXcd out(rows());
    const Index block = static_cast<Index>(frame_len_) * n_rx_chains_;
    for (std::size_t m = 0; m < frames_.size(); ++m) {
        const VectorXcd combined = frames_[m].combiner.adjoint() * rx_atom; // L_r
        const Eigen::RowVectorXcd mixed =
            tx_atom.adjoint() *
            frames_[m].mixed_symbols.middleRows(static_cast<Index>(tap) * n_tx_, n_tx_);
        Eigen::Map<MatrixXcd>(out.data() + static_cast<Index>(m) * block, n_rx_chains_,
                              frame_len_)
            .noalias() = combined * mixed;
    }
    return out;
}

MatrixXcd PhiOperator::materialize() const {
    MatrixXcd phi(rows(), cols());
    const Index block = static_cast<Index>(frame_len_) * n_rx_chains_;
    for (std::size_t m = 0; m < frames_.size(); ++m) {
        const MatrixXcd combiner_adj = frames_[m].combiner.adjoint(); // L_r x n_rx
        const MatrixXcd &mixed = frames_[m].mixed_symbols;            // (Nc Nt) x N
        // kron(T^T, W^H) laid out block-by-block
        for (Index i = 0; i < frame_len_; ++i) {
            for (Index j = 0; j < mixed.rows(); ++j) {
                phi.block(static_cast<Index>(m) * block + i * n_rx_chains_, j * n_rx_,
                          n_rx_chains_, n_rx_) = mixed(j, i) * combiner_adj;
            }
        }
    }
    return phi;
}

MatrixXcd frame_block(const FrameConfig &frame, int n_taps) {
    return PhiOperator({frame}, n_taps).materialize();
}

SensingSystem simulate_observations(const WidebandChannel &channel,
                                    const std::vector<FrameConfig> &frames, double rho,
                                    double noise_var, const AdcSpec &adc, Rng &rng) {
    if (rho < 0.0) {
        throw ParameterError("simulate_observations: rho must be >= 0");
    }
    if (noise_var < 0.0) {
        throw ParameterError("simulate_observations: noise_var must be >= 0");
    }
    if (frames.empty()) {
        throw ParameterError("simulate_observations: at least one frame required");
    }
    const int n_taps = channel.n_taps();
    const int n_rx = channel.n_rx();
    const int n_tx = channel.n_tx();
    if (frames.front().rf_precoder.rows() != n_tx || frames.front().rf_combiner.rows() != n_rx) {
        throw ParameterError("simulate_observations: frame and channel dimensions disagree");
    }

    const int n_rx_chains = static_cast<int>(frames.front().rf_combiner.cols());
    const int frame_len = static_cast<int>(frames.front().symbols.cols());
    const double sqrt_rho = std::sqrt(rho);

    SensingSystem sys;
    sys.rho = rho;
    sys.noise_var = noise_var;
    sys.adc = adc;
    sys.frames = frames;
    sys.analog.resize(static_cast<Index>(frames.size()) * frame_len * n_rx_chains);

    const Index block = static_cast<Index>(frame_len) * n_rx_chains;
    VectorXcd superposed(n_rx);
    VectorXcd noisy(n_rx);
    for (std::size_t m = 0; m < frames.size(); ++m) {
        const MatrixXcd precoder = frames[m].precoder();
        const MatrixXcd precoded = precoder * frames[m].symbols; // n_tx x N, F s[n] per column
        const MatrixXcd combiner_adj = frames[m].rf_combiner.adjoint();
        Eigen::Map<MatrixXcd> received(sys.analog.data() + static_cast<Index>(m) * block,
                                       n_rx_chains, frame_len);
        for (int n = 0; n < frame_len; ++n) {
            superposed.setZero();
            const int d_max = std::min(n, n_taps - 1);
            for (int d = 0; d <= d_max; ++d) {
                superposed.noalias() += channel.taps[d] * precoded.col(n - d);
            }
            for (int r = 0; r < n_rx; ++r) {
                noisy(r) = sqrt_rho * superposed(r) + rng.complex_normal(noise_var);
            }
            received.col(n).noalias() = combiner_adj * noisy;
        }
    }
    // ADC range from ensemble statistics, not from the realization: per
    // real component the expected power is (rho * unit signal power +
    // noise_var) / 2 under the unit-energy channel normalization and
    // unit-norm combiner columns. Amplitude information about the realized
    // channel therefore reaches the estimator only through the
    // measurements themselves.
    const double expected_component_power = (rho + noise_var) / 2.0;
    sys.observations = quantize_complex_vector(sys.analog, adc, expected_component_power);
    sys.phi = PhiOperator(frames, n_taps);
    return sys;
}

VectorXcd vectorize_channel(const WidebandChannel &channel) {
    return Eigen::Map<const VectorXcd>(channel.concatenated.data(),
                                       channel.concatenated.size());
}

MatrixXcd devectorize_channel(const VectorXcd &vec_h, int n_rx, int n_tx, int n_taps) {
    if (vec_h.size() != static_cast<Index>(n_rx) * n_tx * n_taps) {
        throw ParameterError("devectorize_channel: vector length mismatch");
    }
    return Eigen::Map<const MatrixXcd>(vec_h.data(), n_rx,
                                       static_cast<Index>(n_taps) * n_tx);
}

namespace {

// Nearest grid bin for a spatial frequency, with wrap-around on the
// period-1 raster.
int nearest_bin(double spatial_freq, const Eigen::VectorXd &grid) {
    const int g = static_cast<int>(grid.size());
    long idx = std::lround((spatial_freq + 0.5) * g);
    idx %= g;
    if (idx < 0) {
        idx += g;
    }
    return static_cast<int>(idx);
}

} // namespace

PathSet snap_paths_to_grid(const PathSet &paths, const Dictionary &dictionary,
                           const ArrayGeometry &tx, const ArrayGeometry &rx) {
    PathSet snapped = paths;
    for (int l = 0; l < paths.n_paths(); ++l) {
        const double freq_rx = rx.spacing_over_wavelength * std::sin(paths.aoa_rad(l));
        const double freq_tx = tx.spacing_over_wavelength * std::sin(paths.aod_rad(l));
        const int rx_bin = nearest_bin(freq_rx, dictionary.grid_freq_rx);
        const int tx_bin = nearest_bin(freq_tx, dictionary.grid_freq_tx);
        double theta_r = std::asin(dictionary.grid_freq_rx(rx_bin) / rx.spacing_over_wavelength);
        double theta_t = std::asin(dictionary.grid_freq_tx(tx_bin) / tx.spacing_over_wavelength);
        if (theta_r < 0.0) {
            theta_r += 2.0 * std::numbers::pi;
        }
        if (theta_t < 0.0) {
            theta_t += 2.0 * std::numbers::pi;
        }
        snapped.aoa_rad(l) = theta_r;
        snapped.aod_rad(l) = theta_t;
    }
    return snapped;
}

VectorXcd on_grid_sparse_vector(const PathSet &paths, const Dictionary &dictionary,
                                const ArrayGeometry &tx, const ArrayGeometry &rx,
                                const PulseShape &pulse) {
    VectorXcd h = VectorXcd::Zero(dictionary.n_atoms());
    const double scale = std::sqrt(static_cast<double>(tx.n_elements) *
                                   static_cast<double>(rx.n_elements) / paths.n_paths());
    for (int l = 0; l < paths.n_paths(); ++l) {
        const double freq_rx = rx.spacing_over_wavelength * std::sin(paths.aoa_rad(l));
        const double freq_tx = tx.spacing_over_wavelength * std::sin(paths.aod_rad(l));
        const int rx_bin = nearest_bin(freq_rx, dictionary.grid_freq_rx);
        const int tx_bin = nearest_bin(freq_tx, dictionary.grid_freq_tx);
        if (std::abs(dictionary.grid_freq_rx(rx_bin) - freq_rx) > 1e-9 ||
            std::abs(dictionary.grid_freq_tx(tx_bin) - freq_tx) > 1e-9) {
            throw ParameterError("on_grid_sparse_vector: path angles are not on the grid");
        }
        for (int d = 0; d < dictionary.n_taps; ++d) {
            const double p =
                pulse_value(pulse, d * pulse.sample_period_s - paths.delays_s(l));
            h(dictionary.atom_index(d, tx_bin, rx_bin)) += scale * paths.gains(l) * p;
        }
    }
    return h;
}

} // namespace mmce
