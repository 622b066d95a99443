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

#include "mmce/channel.hpp"

#include <cmath>
#include <numbers>

#include "mmce/errors.hpp"

namespace mmce {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double sinc(double x) {
    if (std::abs(x) < 1e-12) {
        return 1.0;
    }
    const double px = std::numbers::pi * x;
    return std::sin(px) / px;
}

void check_geometry(const ArrayGeometry &g, const char *name) {
    if (g.n_elements < 1) {
        throw ParameterError(std::string(name) + ": n_elements must be >= 1");
    }
    if (!(g.spacing_over_wavelength > 0.0)) {
        throw ParameterError(std::string(name) + ": spacing_over_wavelength must be > 0");
    }
}

void check_pulse(const PulseShape &p) {
    if (!(p.sample_period_s > 0.0)) {
        throw ParameterError("PulseShape: sample_period_s must be > 0");
    }
    if (p.rolloff < 0.0 || p.rolloff > 1.0) {
        throw ParameterError("PulseShape: rolloff must be in [0, 1]");
    }
}

void check_paths(const PathSet &paths) {
    const Eigen::Index n = paths.gains.size();
    if (n < 1) {
        throw ParameterError("PathSet: at least one path required");
    }
    if (paths.delays_s.size() != n || paths.aoa_rad.size() != n || paths.aod_rad.size() != n) {
        throw ParameterError("PathSet: gains, delays and angle sequences must have equal length");
    }
}

} // namespace

VectorXcd steering_vector(int n_elements, double spatial_freq) {
    if (n_elements < 1) {
        throw ParameterError("steering_vector: n_elements must be >= 1");
    }
    VectorXcd v(n_elements);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n_elements));
    for (int i = 0; i < n_elements; ++i) {
        v(i) = std::polar(scale, -kTwoPi * i * spatial_freq);
    }
    return v;
}

VectorXcd array_response(const ArrayGeometry &geometry, double theta_rad) {
    check_geometry(geometry, "array_response");
    return steering_vector(geometry.n_elements,
                           geometry.spacing_over_wavelength * std::sin(theta_rad));
}

double pulse_value(const PulseShape &pulse, double t_s) {
    check_pulse(pulse);
    const double beta = pulse.rolloff;
    const double x = t_s / pulse.sample_period_s;
    if (beta == 0.0) {
        return sinc(x);
    }
    // cos / (1 - (2 beta x)^2) has a removable singularity at |x| = 1/(2 beta).
    if (std::abs(std::abs(x) - 1.0 / (2.0 * beta)) < 1e-9) {
        return (std::numbers::pi / 4.0) * sinc(1.0 / (2.0 * beta));
    }
    const double den = 1.0 - (2.0 * beta * x) * (2.0 * beta * x);
    return sinc(x) * std::cos(std::numbers::pi * beta * x) / den;
}

double mean_pulse_energy(const PulseShape &pulse, int n_taps) {
    check_pulse(pulse);
    if (n_taps < 1) {
        throw ParameterError("mean_pulse_energy: n_taps must be >= 1");
    }
    const double ts = pulse.sample_period_s;
    const double span = (n_taps - 1) * ts;
    if (span == 0.0) {
        return 1.0; // single tap, delay fixed at zero, p(0)^2 = 1
    }
    auto tap_sum = [&](double tau) {
        double acc = 0.0;
        for (int d = 0; d < n_taps; ++d) {
            const double p = pulse_value(pulse, d * ts - tau);
            acc += p * p;
        }
        return acc;
    };
    // Composite Simpson over the delay distribution support.
    const int panels = 128 * (n_taps - 1);
    const double h = span / panels;
    double acc = tap_sum(0.0) + tap_sum(span);
    for (int i = 1; i < panels; ++i) {
        acc += (i % 2 == 1 ? 4.0 : 2.0) * tap_sum(i * h);
    }
    return acc * h / 3.0 / span;
}

double default_gain_variance(const PulseShape &pulse, int n_taps) {
    return 1.0 / mean_pulse_energy(pulse, n_taps);
}

PathSet sample_path_set(Rng &rng, int n_paths, int n_taps, const PulseShape &pulse,
                        double gain_variance) {
    if (n_paths < 1) {
        throw ParameterError("sample_path_set: n_paths must be >= 1");
    }
    if (n_taps < 1) {
        throw ParameterError("sample_path_set: n_taps must be >= 1");
    }
    if (!(gain_variance > 0.0)) {
        throw ParameterError("sample_path_set: gain_variance must be > 0");
    }
    check_pulse(pulse);

    PathSet out;
    out.gains.resize(n_paths);
    out.delays_s.resize(n_paths);
    out.aoa_rad.resize(n_paths);
    out.aod_rad.resize(n_paths);
    const double delay_hi = (n_taps - 1) * pulse.sample_period_s;
    for (int l = 0; l < n_paths; ++l) {
        out.gains(l) = rng.complex_normal(gain_variance);
    }
    for (int l = 0; l < n_paths; ++l) {
        out.delays_s(l) = delay_hi > 0.0 ? rng.uniform(0.0, delay_hi) : 0.0;
    }
    for (int l = 0; l < n_paths; ++l) {
        out.aoa_rad(l) = rng.uniform(0.0, kTwoPi);
    }
    for (int l = 0; l < n_paths; ++l) {
        out.aod_rad(l) = rng.uniform(0.0, kTwoPi);
    }
    return out;
}

WidebandChannel build_channel(const PathSet &paths, const ArrayGeometry &tx,
                              const ArrayGeometry &rx, int n_taps, const PulseShape &pulse) {
    check_paths(paths);
    check_geometry(tx, "build_channel(tx)");
    check_geometry(rx, "build_channel(rx)");
    check_pulse(pulse);
    if (n_taps < 1) {
        throw ParameterError("build_channel: n_taps must be >= 1");
    }

    const int n_paths = paths.n_paths();
    const double scale = std::sqrt(static_cast<double>(tx.n_elements) *
                                   static_cast<double>(rx.n_elements) / n_paths);

    std::vector<VectorXcd> rx_vec(n_paths);
    std::vector<VectorXcd> tx_vec(n_paths);
    for (int l = 0; l < n_paths; ++l) {
        rx_vec[l] = array_response(rx, paths.aoa_rad(l));
        tx_vec[l] = array_response(tx, paths.aod_rad(l));
    }

    WidebandChannel channel;
    channel.taps.resize(n_taps);
    channel.concatenated.resize(rx.n_elements, static_cast<Eigen::Index>(n_taps) * tx.n_elements);
    for (int d = 0; d < n_taps; ++d) {
        MatrixXcd tap = MatrixXcd::Zero(rx.n_elements, tx.n_elements);
        for (int l = 0; l < n_paths; ++l) {
            const double p = pulse_value(pulse, d * pulse.sample_period_s - paths.delays_s(l));
            const std::complex<double> coeff = scale * paths.gains(l) * p;
            tap.noalias() += coeff * rx_vec[l] * tx_vec[l].adjoint();
        }
        channel.concatenated.middleCols(static_cast<Eigen::Index>(d) * tx.n_elements,
                                        tx.n_elements) = tap;
        channel.taps[d] = std::move(tap);
    }
    return channel;
}

FactorizedTap factorized_tap(const PathSet &paths, const ArrayGeometry &tx,
                             const ArrayGeometry &rx, int tap_index, int n_taps,
                             const PulseShape &pulse) {
    check_paths(paths);
    check_geometry(tx, "factorized_tap(tx)");
    check_geometry(rx, "factorized_tap(rx)");
    check_pulse(pulse);
    if (tap_index < 0 || tap_index >= n_taps) {
        throw ParameterError("factorized_tap: tap_index out of range");
    }

    const int n_paths = paths.n_paths();
    const double scale = std::sqrt(static_cast<double>(tx.n_elements) *
                                   static_cast<double>(rx.n_elements) / n_paths);

    FactorizedTap out;
    out.rx_steering.resize(rx.n_elements, n_paths);
    out.tx_steering.resize(tx.n_elements, n_paths);
    out.scaled_gains.resize(n_paths);
    for (int l = 0; l < n_paths; ++l) {
        out.rx_steering.col(l) = array_response(rx, paths.aoa_rad(l));
        out.tx_steering.col(l) = array_response(tx, paths.aod_rad(l));
        const double p =
            pulse_value(pulse, tap_index * pulse.sample_period_s - paths.delays_s(l));
        out.scaled_gains(l) = scale * paths.gains(l) * p;
    }
    return out;
}

} // namespace mmce
