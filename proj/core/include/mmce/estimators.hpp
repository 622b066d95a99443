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

#ifndef MMCE_ESTIMATORS_HPP
#define MMCE_ESTIMATORS_HPP

#include <Eigen/Dense>
#include <vector>

#include "mmce/sensing.hpp"

namespace mmce {

/// Composite operator A = sqrt(rho) * Phi * Psi mapping grid coefficients
/// to stacked observations. Forward, adjoint and per-column access all go
/// through the Kronecker structure of the factors; nothing is
/// materialized.
class MeasurementOperator {
  public:
    MeasurementOperator(const PhiOperator &phi, const Dictionary &dictionary, double rho);

    Eigen::Index rows() const { return phi_->rows(); }
    Eigen::Index cols() const { return dictionary_->n_atoms(); }
    const Dictionary &dictionary() const { return *dictionary_; }
    double rho() const { return rho_; }

    Eigen::VectorXcd apply(const Eigen::VectorXcd &h) const;
    Eigen::VectorXcd apply_adjoint(const Eigen::VectorXcd &y) const;
    Eigen::VectorXcd column(Eigen::Index atom) const;

  private:
    const PhiOperator *phi_;
    const Dictionary *dictionary_;
    double rho_;
    double sqrt_rho_;
};

enum class StopRule { fixed_atoms, residual_threshold, hybrid };

struct OmpConfig {
    int max_atoms = 1;
    /// Residual threshold relative to ||y||_2 (used by residual_threshold
    /// and hybrid rules).
    double residual_tol = 0.0;
    StopRule stop_rule = StopRule::fixed_atoms;
};

struct EstimateResult {
    /// OMP: sparse grid coefficients (length = n_atoms).
    /// LS: dense vec(H) estimate (length = n_taps * n_tx * n_rx).
    Eigen::VectorXcd h_hat;
    std::vector<Eigen::Index> support; // OMP only, in selection order
    Eigen::MatrixXcd channel_hat;      // n_rx x (n_taps * n_tx)
    int iterations = 0;
};

/// Orthogonal matching pursuit. Per iteration: correlate the residual
/// with all atoms through the adjoint operator, select the max-magnitude
/// index (ties broken toward the lowest index), extend an incrementally
/// updated QR factorization of the selected columns, and re-solve the
/// support-restricted least-squares problem.
EstimateResult omp(const Eigen::VectorXcd &y, const MeasurementOperator &measurement,
                   const OmpConfig &config);

struct LsOptions {
    /// Convergence tolerance on ||Phi^H r|| relative to ||Phi^H y||
    /// for the iterative path.
    double rtol = 1e-10;
    /// 0 = automatic (3 * cols + 10).
    int max_iterations = 0;
    /// Systems with rows*cols at or below this are solved densely with a
    /// rank-revealing QR; larger ones run matrix-free CGLS.
    Eigen::Index dense_threshold = Eigen::Index(1) << 21;
};

/// Unstructured least squares against the stacked measurement matrix:
/// argmin_x ||y - sqrt(rho) Phi x||_2 with x = vec(H). The dictionary is
/// never involved.
EstimateResult ls_estimate(const Eigen::VectorXcd &y, const PhiOperator &phi, double rho,
                           const LsOptions &options = {});

/// Minimum-norm least-squares solution of a dense overdetermined system,
/// with a rank check.
Eigen::VectorXcd solve_dense_least_squares(const Eigen::MatrixXcd &a,
                                           const Eigen::VectorXcd &y);

/// Map grid coefficients back to the channel matrix through the
/// structured dictionary: devectorize(Psi * h_hat).
Eigen::MatrixXcd reconstruct_channel(const Eigen::VectorXcd &h_hat,
                                     const Dictionary &dictionary);

} // namespace mmce

#endif
