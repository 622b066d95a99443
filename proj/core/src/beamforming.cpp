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

#include "mmce/beamforming.hpp"

#include <cmath>
#include <numbers>

#include "mmce/errors.hpp"

namespace mmce {

using Eigen::MatrixXcd;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_bits(int bits) {
    if (bits < 1 || bits > 16) {
        throw ParameterError("phase shifter bits must be in [1, 16]");
    }
}

} // namespace

double quantize_phase(double angle_rad, int bits) {
    check_bits(bits);
    const long levels = 1L << bits;
    const double step = kTwoPi / static_cast<double>(levels);
    long k = std::lround(angle_rad / step) % levels;
    if (k < 0) {
        k += levels;
    }
    return static_cast<double>(k) * step;
}

MatrixXcd random_rf_matrix(Rng &rng, int n_antennas, int n_chains, int bits) {
    check_bits(bits);
    if (n_antennas < 1 || n_chains < 1) {
        throw ParameterError("random_rf_matrix: dimensions must be >= 1");
    }
    if (n_chains > n_antennas) {
        throw ParameterError("random_rf_matrix: n_chains must not exceed n_antennas");
    }
    const std::uint64_t levels = 1ULL << bits;
    const double step = kTwoPi / static_cast<double>(levels);
    const double magnitude = 1.0 / std::sqrt(static_cast<double>(n_antennas));
    MatrixXcd out(n_antennas, n_chains);
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
        for (Eigen::Index r = 0; r < out.rows(); ++r) {
            const double phase = static_cast<double>(rng.uniform_index(levels)) * step;
            out(r, c) = std::polar(magnitude, phase);
        }
    }
    return out;
}

MatrixXcd baseband_scaler(const MatrixXcd &rf_precoder, int n_streams) {
    const Eigen::Index n_chains = rf_precoder.cols();
    if (n_streams < 1 || n_streams > n_chains) {
        throw ParameterError("baseband_scaler: n_streams must be in [1, n_chains]");
    }
    // ||F_RF * [I; 0]||_F is the norm of the first n_streams RF columns.
    const double selected_norm = rf_precoder.leftCols(n_streams).norm();
    if (!(selected_norm > 0.0)) {
        throw DegenerateInputError("baseband_scaler: selected RF columns have zero norm");
    }
    const double c = std::sqrt(static_cast<double>(n_streams)) / selected_norm;
    MatrixXcd bb = MatrixXcd::Zero(n_chains, n_streams);
    bb.topRows(n_streams) = c * MatrixXcd::Identity(n_streams, n_streams);
    return bb;
}

MatrixXcd generate_symbols(Rng &rng, int n_streams, int frame_len) {
    if (n_streams < 1) {
        throw ParameterError("generate_symbols: n_streams must be >= 1");
    }
    if (frame_len < 1) {
        throw ParameterError("generate_symbols: frame_len must be >= 1");
    }
    const double a = 1.0 / std::sqrt(2.0 * n_streams);
    const std::complex<double> constellation[4] = {
        {a, a}, {-a, a}, {-a, -a}, {a, -a}};
    MatrixXcd out(n_streams, frame_len);
    for (Eigen::Index n = 0; n < out.cols(); ++n) {
        for (Eigen::Index s = 0; s < out.rows(); ++s) {
            out(s, n) = constellation[rng.uniform_index(4)];
        }
    }
    return out;
}

MatrixXcd build_toeplitz_symbols(const MatrixXcd &symbols, int n_taps) {
    if (n_taps < 1) {
        throw ParameterError("build_toeplitz_symbols: n_taps must be >= 1");
    }
    const Eigen::Index n_streams = symbols.rows();
    const Eigen::Index frame_len = symbols.cols();
    MatrixXcd stacked = MatrixXcd::Zero(n_taps * n_streams, frame_len);
    for (int d = 0; d < n_taps; ++d) {
        if (d >= frame_len) {
            break; // whole delayed block falls before time zero
        }
        stacked.block(static_cast<Eigen::Index>(d) * n_streams, d, n_streams, frame_len - d) =
            symbols.leftCols(frame_len - d);
    }
    return stacked;
}

FrameConfig draw_frame(Rng &rng, int n_tx, int n_rx, int n_tx_chains, int n_rx_chains,
                       int n_streams, int frame_len, int ps_bits) {
    FrameConfig frame;
    frame.rf_precoder = random_rf_matrix(rng, n_tx, n_tx_chains, ps_bits);
    frame.rf_combiner = random_rf_matrix(rng, n_rx, n_rx_chains, ps_bits);
    frame.bb_precoder = baseband_scaler(frame.rf_precoder, n_streams);
    frame.symbols = generate_symbols(rng, n_streams, frame_len);
    return frame;
}

} // namespace mmce
