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

#ifndef MMCE_BEAMFORMING_HPP
#define MMCE_BEAMFORMING_HPP

#include <Eigen/Dense>

#include "mmce/rng.hpp"

namespace mmce {

/// Phase shifter network resolution in bits per shifter.
struct PhaseShifterSpec {
    int resolution_bits = 6;
};

/// One training frame: RF precoder/combiner drawn on the quantized phase
/// grid, baseband scaling meeting the transmit power constraint, and the
/// raw training symbol block (n_streams x frame_len). The block-Toeplitz
/// layout used by the measurement model is built downstream.
struct FrameConfig {
    Eigen::MatrixXcd rf_precoder; // n_tx x n_tx_chains
    Eigen::MatrixXcd bb_precoder; // n_tx_chains x n_streams
    Eigen::MatrixXcd rf_combiner; // n_rx x n_rx_chains
    Eigen::MatrixXcd symbols;     // n_streams x frame_len

    /// Effective transmit precoder F = F_RF * F_BB.
    Eigen::MatrixXcd precoder() const { return rf_precoder * bb_precoder; }
};

/// Nearest representable phase on the 2^bits grid, in [0, 2pi). Distance
/// is angular, so wrap-around at 2pi is handled.
double quantize_phase(double angle_rad, int bits);

/// Matrix with i.i.d. entries of magnitude 1/sqrt(n_antennas) and phases
/// uniform on the 2^bits grid.
Eigen::MatrixXcd random_rf_matrix(Rng &rng, int n_antennas, int n_chains, int bits);

/// Scaled selector baseband precoder: c * [I; 0] with c chosen so that
/// ||F_RF * F_BB||_F^2 = n_streams.
Eigen::MatrixXcd baseband_scaler(const Eigen::MatrixXcd &rf_precoder, int n_streams);

/// i.i.d. QPSK training symbols with per-entry power 1/n_streams, so that
/// E[s s^H] = I / n_streams.
Eigen::MatrixXcd generate_symbols(Rng &rng, int n_streams, int frame_len);

/// Stack delayed copies of the symbol block: column n holds
/// [s[n]; s[n-1]; ...; s[n-n_taps+1]], zero for negative time indices.
Eigen::MatrixXcd build_toeplitz_symbols(const Eigen::MatrixXcd &symbols, int n_taps);

/// Draw a complete independent frame (precoders, combiner, symbols).
FrameConfig draw_frame(Rng &rng, int n_tx, int n_rx, int n_tx_chains, int n_rx_chains,
                       int n_streams, int frame_len, int ps_bits);

} // namespace mmce

#endif
