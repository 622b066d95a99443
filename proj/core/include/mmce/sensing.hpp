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

#ifndef MMCE_SENSING_HPP
#define MMCE_SENSING_HPP

#include <Eigen/Dense>
#include <vector>

#include "mmce/beamforming.hpp"
#include "mmce/channel.hpp"
#include "mmce/quantizer.hpp"
#include "mmce/rng.hpp"

namespace mmce {

/// Virtual-channel dictionary: truncated DFT grids U_t (n_tx x g_tx) and
/// U_r (n_rx x g_rx) on uniform spatial-frequency rasters, expanded per
/// delay tap. The full synthesis operator is
///
///   Psi = I_{n_taps} (x) conj(U_t) (x) U_r
///
/// and is applied through its Kronecker structure; materialize() builds
/// the explicit matrix for small configurations.
///
/// Atom j <-> (tap, tx_bin, rx_bin) with j = tap*g_tx*g_rx + tx_bin*g_rx
/// + rx_bin; the corresponding rank-one tap matrix is u_r * u_t^H.
struct Dictionary {
    Eigen::MatrixXcd tx_grid; // U_t
    Eigen::MatrixXcd rx_grid; // U_r
    Eigen::VectorXd grid_freq_tx; // spatial frequencies in [-1/2, 1/2)
    Eigen::VectorXd grid_freq_rx;
    int n_taps = 1;

    Eigen::Index n_tx() const { return tx_grid.rows(); }
    Eigen::Index n_rx() const { return rx_grid.rows(); }
    Eigen::Index g_tx() const { return tx_grid.cols(); }
    Eigen::Index g_rx() const { return rx_grid.cols(); }
    Eigen::Index n_atoms() const { return n_taps * g_tx() * g_rx(); }
    Eigen::Index vec_len() const { return n_taps * n_tx() * n_rx(); }

    struct AtomCoords {
        int tap;
        int tx_bin;
        int rx_bin;
    };
    Eigen::Index atom_index(int tap, int tx_bin, int rx_bin) const;
    AtomCoords atom_coords(Eigen::Index atom) const;

    /// Psi * h: sparse-domain vector to vec(H).
    Eigen::VectorXcd synthesize(const Eigen::VectorXcd &h) const;
    /// Psi^H * vec(H): analysis coefficients on the grid.
    Eigen::VectorXcd analyze(const Eigen::VectorXcd &vec_h) const;
    /// Explicit Psi (vec_len x n_atoms); intended for small configurations.
    Eigen::MatrixXcd materialize() const;
};

/// Uniform spatial-frequency dictionary with grid point g at
/// -1/2 + g/G. Grids must not undersample the arrays (G >= N).
Dictionary build_dictionary(const ArrayGeometry &tx, const ArrayGeometry &rx, int g_tx,
                            int g_rx, int n_taps);

/// Stacked measurement operator over M frames,
///
///   Phi = [ S_0^T Ftilde_0^T (x) W_0^H ; ... ; S_{M-1}^T ... ],
///
/// applied to vec(H) through the identity
/// (B^T (x) A) vec(X) = vec(A X B) with A = W_m^H and B = T_m, where
/// T_m = Ftilde_m S_m is precomputed per frame. Rows group as
/// frame-major, then symbol, then RF chain.
class PhiOperator {
  public:
    PhiOperator() = default;
    PhiOperator(const std::vector<FrameConfig> &frames, int n_taps);

    Eigen::Index rows() const {
        return static_cast<Eigen::Index>(frames_.size()) * frame_len_ * n_rx_chains_;
    }
    Eigen::Index cols() const {
        return static_cast<Eigen::Index>(n_taps_) * n_tx_ * n_rx_;
    }
    int n_frames() const { return static_cast<int>(frames_.size()); }
    int n_taps() const { return n_taps_; }
    int n_tx() const { return n_tx_; }
    int n_rx() const { return n_rx_; }
    int n_rx_chains() const { return n_rx_chains_; }
    int frame_len() const { return frame_len_; }

    Eigen::VectorXcd apply(const Eigen::VectorXcd &vec_h) const;
    Eigen::VectorXcd apply_adjoint(const Eigen::VectorXcd &y) const;

    /// Image of a channel whose only content is rx_atom * tx_atom^H at
    /// one delay tap; used for cheap per-atom column generation.
    Eigen::VectorXcd apply_rank_one(int tap, const Eigen::VectorXcd &rx_atom,
                                    const Eigen::VectorXcd &tx_atom) const;

    /// Explicit Phi (rows x cols); intended for small configurations.
    Eigen::MatrixXcd materialize() const;

  private:
    struct Frame {
        Eigen::MatrixXcd combiner;      // W_m, n_rx x n_rx_chains
        Eigen::MatrixXcd mixed_symbols; // T_m, (n_taps * n_tx) x frame_len
    };
    std::vector<Frame> frames_;
    int n_taps_ = 0;
    int n_tx_ = 0;
    int n_rx_ = 0;
    int n_rx_chains_ = 0;
    int frame_len_ = 0;
};

/// Explicit single-frame block (S^T Ftilde^T) (x) W^H.
Eigen::MatrixXcd frame_block(const FrameConfig &frame, int n_taps);

/// One sounding campaign: operator, pre-quantization observations and
/// their quantized counterpart.
struct SensingSystem {
    PhiOperator phi;
    Eigen::VectorXcd observations; // y = Q(analog)
    Eigen::VectorXcd analog;       // r, before the ADCs
    double rho = 1.0;
    double noise_var = 1.0;
    AdcSpec adc;
    std::vector<FrameConfig> frames;
};

/// Run the sounding in the time domain, frame by frame and sample by
/// sample:
///
///   r_m[n] = W_m^H ( sqrt(rho) sum_d H_d F_m s_m[n-d] + z_m[n] )
///
/// with z i.i.d. CN(0, noise_var I) per receive antenna, applied before
/// combining. The Phi operator held by the result reproduces the same
/// analog vector algebraically; the simulation itself never goes through
/// it, which keeps the two computation paths (convolutional and
/// vectorized) independently checkable.
SensingSystem simulate_observations(const WidebandChannel &channel,
                                    const std::vector<FrameConfig> &frames, double rho,
                                    double noise_var, const AdcSpec &adc, Rng &rng);

/// Column-major vectorization of the concatenated channel, tap blocks in
/// delay order.
Eigen::VectorXcd vectorize_channel(const WidebandChannel &channel);

/// Inverse of vectorize_channel: n_rx x (n_taps * n_tx) matrix.
Eigen::MatrixXcd devectorize_channel(const Eigen::VectorXcd &vec_h, int n_rx, int n_tx,
                                     int n_taps);

/// Snap path angles to the nearest dictionary bin (spatial frequency
/// raster), for exact-recovery experiments.
PathSet snap_paths_to_grid(const PathSet &paths, const Dictionary &dictionary,
                           const ArrayGeometry &tx, const ArrayGeometry &rx);

/// Sparse coefficient vector h with vec(H) = Psi h for a PathSet whose
/// angles lie exactly on the dictionary grids: one coefficient per
/// (path, tap), equal to sqrt(n_tx n_rx / n_paths) * gain * pulse value.
Eigen::VectorXcd on_grid_sparse_vector(const PathSet &paths, const Dictionary &dictionary,
                                       const ArrayGeometry &tx, const ArrayGeometry &rx,
                                       const PulseShape &pulse);

} // namespace mmce

#endif
