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

#ifndef MMCE_CHANNEL_HPP
#define MMCE_CHANNEL_HPP

#include <Eigen/Dense>
#include <vector>

#include "mmce/rng.hpp"

namespace mmce {

/// Uniform linear array. Only the element count and the spacing-to-
/// wavelength ratio d/lambda enter the steering vectors.
struct ArrayGeometry {
    int n_elements = 1;
    double spacing_over_wavelength = 0.5;
};

enum class PulseKind { raised_cosine };

/// Pulse shaping filter. The raised cosine is normalized to p(0) = 1 and
/// has Nyquist zero crossings at nonzero integer multiples of the sample
/// period.
struct PulseShape {
    PulseKind kind = PulseKind::raised_cosine;
    double rolloff = 0.35;
    double sample_period_s = 1.0;
};

/// One multipath realization: per-path complex gain, delay and azimuth
/// angles of arrival/departure.
struct PathSet {
    Eigen::VectorXcd gains;
    Eigen::VectorXd delays_s;
    Eigen::VectorXd aoa_rad;
    Eigen::VectorXd aod_rad;

    int n_paths() const { return static_cast<int>(gains.size()); }
};

/// Frequency-selective channel as a tapped delay line: one n_rx x n_tx
/// matrix per delay tap, plus the column-wise concatenation of all taps.
struct WidebandChannel {
    std::vector<Eigen::MatrixXcd> taps;
    Eigen::MatrixXcd concatenated; // n_rx x (n_taps * n_tx)

    int n_taps() const { return static_cast<int>(taps.size()); }
    int n_rx() const { return taps.empty() ? 0 : static_cast<int>(taps.front().rows()); }
    int n_tx() const { return taps.empty() ? 0 : static_cast<int>(taps.front().cols()); }
};

/// Per-tap factorization H_d = A_r * diag(scaled_gains) * A_t^H with one
/// steering column per path.
struct FactorizedTap {
    Eigen::MatrixXcd rx_steering;  // n_rx x n_paths
    Eigen::VectorXcd scaled_gains; // n_paths
    Eigen::MatrixXcd tx_steering;  // n_tx x n_paths

    Eigen::MatrixXcd product() const {
        return rx_steering * scaled_gains.asDiagonal() * tx_steering.adjoint();
    }
};

/// Unit-norm ULA response at a given spatial frequency:
/// (1/sqrt(N)) [1, e^{-j2pi v}, ..., e^{-j2pi (N-1) v}]^T.
Eigen::VectorXcd steering_vector(int n_elements, double spatial_freq);

/// Steering vector at a physical azimuth angle; the spatial frequency is
/// (d/lambda) sin(theta).
Eigen::VectorXcd array_response(const ArrayGeometry &geometry, double theta_rad);

/// Pulse amplitude at t seconds; removable singularities of the raised
/// cosine are evaluated by their analytic limits.
double pulse_value(const PulseShape &pulse, double t_s);

/// E over tau ~ U[0, (n_taps-1) Ts] of sum_d p(d Ts - tau)^2, by
/// quadrature. This is the fraction of path energy that the modeled taps
/// capture.
double mean_pulse_energy(const PulseShape &pulse, int n_taps);

/// Gain variance that makes the tap-summed channel energy average to
/// n_tx * n_rx: the inverse of mean_pulse_energy.
double default_gain_variance(const PulseShape &pulse, int n_taps);

/// Draw one multipath realization: gains CN(0, gain_variance), angles
/// uniform in [0, 2pi), delays uniform in [0, (n_taps-1) Ts].
PathSet sample_path_set(Rng &rng, int n_paths, int n_taps, const PulseShape &pulse,
                        double gain_variance);

/// Evaluate the tapped-delay-line channel
///   H_d = sqrt(n_tx n_rx / n_paths) sum_l gain_l p(d Ts - tau_l)
///         a_r(aoa_l) a_t(aod_l)^H
/// for d = 0 .. n_taps-1, accumulating rank-one terms per path.
WidebandChannel build_channel(const PathSet &paths, const ArrayGeometry &tx,
                              const ArrayGeometry &rx, int n_taps, const PulseShape &pulse);

/// Factorized form of one tap (same content as build_channel, different
/// evaluation route).
FactorizedTap factorized_tap(const PathSet &paths, const ArrayGeometry &tx,
                             const ArrayGeometry &rx, int tap_index, int n_taps,
                             const PulseShape &pulse);

} // namespace mmce

#endif
