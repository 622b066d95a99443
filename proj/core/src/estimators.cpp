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

#include "mmce/estimators.hpp"

#include <cmath>

#include "mmce/errors.hpp"

namespace mmce {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

MeasurementOperator::MeasurementOperator(const PhiOperator &phi, const Dictionary &dictionary,
                                         double rho)
    : phi_(&phi), dictionary_(&dictionary), rho_(rho), sqrt_rho_(std::sqrt(rho)) {
    if (rho < 0.0) {
        throw ParameterError("MeasurementOperator: rho must be >= 0");
    }
    if (phi.cols() != dictionary.vec_len()) {
        throw ParameterError("MeasurementOperator: Phi and Psi dimensions disagree");
    }
}

VectorXcd MeasurementOperator::apply(const VectorXcd &h) const {
    return sqrt_rho_ * phi_->apply(dictionary_->synthesize(h));
}

VectorXcd MeasurementOperator::apply_adjoint(const VectorXcd &y) const {
    return sqrt_rho_ * dictionary_->analyze(phi_->apply_adjoint(y));
}

VectorXcd MeasurementOperator::column(Index atom) const {
    const Dictionary::AtomCoords c = dictionary_->atom_coords(atom);
    return sqrt_rho_ * phi_->apply_rank_one(c.tap, dictionary_->rx_grid.col(c.rx_bin),
                                            dictionary_->tx_grid.col(c.tx_bin));
}

namespace {

// Solve the upper-triangular system R x = b by back substitution.
VectorXcd back_substitute(const MatrixXcd &r, const VectorXcd &b, Index k) {
    VectorXcd x(k);
    for (Index i = k - 1; i >= 0; --i) {
        std::complex<double> acc = b(i);
        for (Index j = i + 1; j < k; ++j) {
            acc -= r(i, j) * x(j);
        }
        x(i) = acc / r(i, i);
    }
    return x;
}

} // namespace

EstimateResult omp(const VectorXcd &y, const MeasurementOperator &measurement,
                   const OmpConfig &config) {
    if (y.size() != measurement.rows()) {
        throw ParameterError("omp: observation length does not match operator rows");
    }
    if (config.max_atoms < 1 || config.max_atoms > measurement.cols()) {
        throw ParameterError("omp: max_atoms must be in [1, n_atoms]");
    }
    if (config.residual_tol < 0.0) {
        throw ParameterError("omp: residual_tol must be >= 0");
    }
    if (measurement.cols() == 0) {
        throw DegenerateInputError("omp: operator has no atoms");
    }

    const Dictionary &dict = measurement.dictionary();
    EstimateResult result;
    result.h_hat = VectorXcd::Zero(measurement.cols());

    const double y_norm = y.norm();
    const Index atom_budget =
        std::min<Index>(config.max_atoms, std::min(measurement.rows(), measurement.cols()));

    MatrixXcd q(y.size(), atom_budget);        // orthonormal basis of selected columns
    MatrixXcd r_fact(atom_budget, atom_budget); // upper-triangular factor
    VectorXcd beta(atom_budget);                // Q^H y accumulated on the fly
    std::vector<char> selected(static_cast<std::size_t>(measurement.cols()), 0);

    VectorXcd residual = y;
    double residual_norm = y_norm;
    Index n_selected = 0;

    auto stop_reached = [&]() {
        switch (config.stop_rule) {
        case StopRule::fixed_atoms:
            return n_selected >= atom_budget;
        case StopRule::residual_threshold:
            return residual_norm <= config.residual_tol * y_norm || n_selected >= atom_budget;
        case StopRule::hybrid:
            return residual_norm <= config.residual_tol * y_norm || n_selected >= atom_budget;
        }
        return true;
    };

    while (y_norm > 0.0 && !stop_reached()) {
        const VectorXcd correlation = measurement.apply_adjoint(residual);
        Index best = -1;
        double best_mag = 0.0;
        for (Index j = 0; j < correlation.size(); ++j) {
            if (selected[static_cast<std::size_t>(j)]) {
                continue;
            }
            const double mag = std::norm(correlation(j));
            if (mag > best_mag) {
                best_mag = mag;
                best = j;
            }
        }
        if (best < 0 || best_mag == 0.0) {
            break; // nothing correlates with the residual
        }

        const VectorXcd column = measurement.column(best);
        const double column_norm = column.norm();
        if (!(column_norm > 0.0)) {
            throw DegenerateInputError("omp: selected atom has zero norm");
        }

        // Modified Gram-Schmidt with one re-orthogonalization pass.
        VectorXcd v = column;
        VectorXcd proj = VectorXcd::Zero(atom_budget);
        if (n_selected > 0) {
            auto basis = q.leftCols(n_selected);
            proj.head(n_selected) = basis.adjoint() * v;
            v.noalias() -= basis * proj.head(n_selected);
            const VectorXcd correction = basis.adjoint() * v;
            v.noalias() -= basis * correction;
            proj.head(n_selected) += correction;
        }
        const double v_norm = v.norm();
        if (v_norm <= 1e-12 * column_norm) {
            throw NumericalError("omp: selected atom is numerically dependent on the support",
                                 std::vector<std::int64_t>(result.support.begin(),
                                                           result.support.end()));
        }

        q.col(n_selected) = v / v_norm;
        r_fact.col(n_selected).head(n_selected) = proj.head(n_selected);
        r_fact(n_selected, n_selected) = v_norm;
        beta(n_selected) = q.col(n_selected).dot(residual); // q^H r
        residual.noalias() -= q.col(n_selected) * beta(n_selected);
        residual_norm = residual.norm();

        selected[static_cast<std::size_t>(best)] = 1;
        result.support.push_back(best);
        ++n_selected;
    }

    result.iterations = static_cast<int>(n_selected);
    if (n_selected > 0) {
        const VectorXcd coeffs = back_substitute(r_fact, beta, n_selected);
        for (Index k = 0; k < n_selected; ++k) {
            result.h_hat(result.support[static_cast<std::size_t>(k)]) = coeffs(k);
        }
    }
    result.channel_hat = devectorize_channel(dict.synthesize(result.h_hat),
                                             static_cast<int>(dict.n_rx()),
                                             static_cast<int>(dict.n_tx()), dict.n_taps);
    return result;
}

VectorXcd solve_dense_least_squares(const MatrixXcd &a, const VectorXcd &y) {
    if (a.rows() != y.size()) {
        throw ParameterError("solve_dense_least_squares: dimension mismatch");
    }
    Eigen::ColPivHouseholderQR<MatrixXcd> qr(a);
    if (qr.rank() < a.cols()) {
        throw SingularSystemError("least squares: matrix is rank deficient (rank " +
                                      std::to_string(qr.rank()) + " of " +
                                      std::to_string(a.cols()) + " columns)",
                                  qr.rank(), a.cols());
    }
    return qr.solve(y);
}

namespace {

// Conjugate gradient on the normal equations (CGLS). Converges on the
// residual of the normal system, which reaches zero at the LS solution
// even for inconsistent right-hand sides.
VectorXcd cgls(const PhiOperator &phi, const VectorXcd &b, double rtol, int max_iterations,
               int *iterations_out) {
    VectorXcd x = VectorXcd::Zero(phi.cols());
    VectorXcd residual = b;
    VectorXcd grad = phi.apply_adjoint(residual);
    VectorXcd direction = grad;
    const double grad0 = grad.norm();
    double gamma = grad.squaredNorm();
    int it = 0;
    while (it < max_iterations && gamma > 0.0 && std::sqrt(gamma) > rtol * grad0) {
        const VectorXcd forward = phi.apply(direction);
        const double denom = forward.squaredNorm();
        if (!(denom > 0.0)) {
            break;
        }
        const double alpha = gamma / denom;
        x.noalias() += alpha * direction;
        residual.noalias() -= alpha * forward;
        grad = phi.apply_adjoint(residual);
        const double gamma_next = grad.squaredNorm();
        direction = grad + (gamma_next / gamma) * direction;
        gamma = gamma_next;
        ++it;
    }
    if (iterations_out != nullptr) {
        *iterations_out = it;
    }
    if (std::sqrt(gamma) > 1e-5 * grad0) {
        throw NumericalError("ls_estimate: CGLS stalled before reaching the requested "
                             "tolerance; the system may be near rank deficient");
    }
    return x;
}

} // namespace

EstimateResult ls_estimate(const VectorXcd &y, const PhiOperator &phi, double rho,
                           const LsOptions &options) {
    if (y.size() != phi.rows()) {
        throw ParameterError("ls_estimate: observation length does not match Phi rows");
    }
    if (!(rho > 0.0)) {
        throw ParameterError("ls_estimate: rho must be > 0");
    }
    if (phi.rows() < phi.cols()) {
        throw ParameterError(
            "ls_estimate: underdetermined system (" + std::to_string(phi.rows()) + " rows < " +
            std::to_string(phi.cols()) +
            " unknowns); increase frames, symbols or RF chains until "
            "n_frames * frame_len * n_rx_chains >= n_taps * n_tx * n_rx");
    }

    EstimateResult result;
    const double sqrt_rho = std::sqrt(rho);
    if (phi.rows() * phi.cols() <= options.dense_threshold) {
        result.h_hat = solve_dense_least_squares(phi.materialize(), y) / sqrt_rho;
        result.iterations = 0;
    } else {
        const int cap = options.max_iterations > 0
                            ? options.max_iterations
                            : static_cast<int>(3 * phi.cols() + 10);
        int used = 0;
        result.h_hat = cgls(phi, y / sqrt_rho, options.rtol, cap, &used);
        result.iterations = used;
    }
    result.channel_hat =
        devectorize_channel(result.h_hat, phi.n_rx(), phi.n_tx(), phi.n_taps());
    return result;
}

MatrixXcd reconstruct_channel(const VectorXcd &h_hat, const Dictionary &dictionary) {
    if (h_hat.size() != dictionary.n_atoms()) {
        throw ParameterError("reconstruct_channel: coefficient length mismatch");
    }
    return devectorize_channel(dictionary.synthesize(h_hat),
                               static_cast<int>(dictionary.n_rx()),
                               static_cast<int>(dictionary.n_tx()), dictionary.n_taps);
}

} // namespace mmce
