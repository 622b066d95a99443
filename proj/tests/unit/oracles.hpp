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
//
// Brute-force reference implementations used as independent oracles in
// tests. Everything here is scalar loops and explicit matrices on
// purpose; none of it shares code with the library paths it checks.

#ifndef MMCE_TESTS_ORACLES_HPP
#define MMCE_TESTS_ORACLES_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "mmce/beamforming.hpp"
#include "mmce/channel.hpp"

namespace oracles {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

// Scalar-loop evaluation of the tapped-delay-line channel: every matrix
// entry from first principles.
inline MatrixXcd channel_tap(const mmce::PathSet &paths, const mmce::ArrayGeometry &tx,
                             const mmce::ArrayGeometry &rx, int tap,
                             const mmce::PulseShape &pulse) {
    const int n_paths = paths.n_paths();
    const double scale =
        std::sqrt(double(tx.n_elements) * double(rx.n_elements) / double(n_paths));
    MatrixXcd h = MatrixXcd::Zero(rx.n_elements, tx.n_elements);
    for (int r = 0; r < rx.n_elements; ++r) {
        for (int c = 0; c < tx.n_elements; ++c) {
            std::complex<double> acc = 0.0;
            for (int l = 0; l < n_paths; ++l) {
                const double vr = rx.spacing_over_wavelength * std::sin(paths.aoa_rad(l));
                const double vt = tx.spacing_over_wavelength * std::sin(paths.aod_rad(l));
                const std::complex<double> ar =
                    std::polar(1.0 / std::sqrt(double(rx.n_elements)),
                               -2.0 * std::numbers::pi * r * vr);
                const std::complex<double> at =
                    std::polar(1.0 / std::sqrt(double(tx.n_elements)),
                               -2.0 * std::numbers::pi * c * vt);
                const double p = mmce::pulse_value(
                    pulse, tap * pulse.sample_period_s - paths.delays_s(l));
                acc += scale * paths.gains(l) * p * ar * std::conj(at);
            }
            h(r, c) = acc;
        }
    }
    return h;
}

// Column-wise Kronecker (Khatri-Rao) product by scalar loops.
inline MatrixXcd khatri_rao(const MatrixXcd &a, const MatrixXcd &b) {
    MatrixXcd out(a.rows() * b.rows(), a.cols());
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            for (Eigen::Index j = 0; j < b.rows(); ++j) {
                out(i * b.rows() + j, c) = a(i, c) * b(j, c);
            }
        }
    }
    return out;
}

// Dense Kronecker product by scalar loops.
inline MatrixXcd kronecker(const MatrixXcd &a, const MatrixXcd &b) {
    MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

// Column-major vectorization.
inline VectorXcd vec(const MatrixXcd &m) {
    return Eigen::Map<const VectorXcd>(m.data(), m.size());
}

// Noise-free received frame computed as a literal convolution,
// sample by sample and chain by chain.
inline MatrixXcd received_frame(const std::vector<MatrixXcd> &taps,
                                const mmce::FrameConfig &frame, double sqrt_rho) {
    const MatrixXcd f = frame.precoder();
    const int n_rx = int(taps.front().rows());
    const int n_chains = int(frame.rf_combiner.cols());
    const int frame_len = int(frame.symbols.cols());
    MatrixXcd out = MatrixXcd::Zero(n_chains, frame_len);
    for (int n = 0; n < frame_len; ++n) {
        VectorXcd antenna = VectorXcd::Zero(n_rx);
        for (int d = 0; d < int(taps.size()); ++d) {
            if (n - d < 0) {
                continue;
            }
            antenna += taps[size_t(d)] * (f * frame.symbols.col(n - d));
        }
        out.col(n) = frame.rf_combiner.adjoint() * (sqrt_rho * antenna);
    }
    return out;
}

// Normal-equations least squares, the textbook way.
inline VectorXcd normal_equations_solve(const MatrixXcd &a, const VectorXcd &y) {
    return (a.adjoint() * a).ldlt().solve(a.adjoint() * y);
}

// Empirical SQNR in dB of a mid-rise quantizer with the given step over a
// sample set.
inline double sqnr_db(const std::vector<double> &samples, int bits, double step) {
    double signal = 0.0;
    double noise = 0.0;
    const double top = ((1L << (bits - 1)) - 0.5) * step;
    for (double x : samples) {
        double q = step * (std::floor(x / step) + 0.5);
        q = std::clamp(q, -top, top);
        signal += x * x;
        noise += (x - q) * (x - q);
    }
    return 10.0 * std::log10(signal / noise);
}

// Best SQNR over a dense step grid; the independent tuning oracle.
inline double best_sqnr_db(const std::vector<double> &samples, int bits) {
    double best = -1e300;
    for (int i = 0; i < 400; ++i) {
        const double step = 0.01 + 0.012 * i; // covers [0.01, 4.8] sigma
        best = std::max(best, sqnr_db(samples, bits, step));
    }
    return best;
}

} // namespace oracles

#endif
