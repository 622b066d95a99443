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

#include "mmce/experiments.hpp"

#include <atomic>
#include <cmath>
#include <optional>
#include <sstream>
#include <thread>

#include "mmce/errors.hpp"

namespace mmce {

using Eigen::MatrixXcd;

const char *const kSnrConventionNote =
    "snr_db = 10*log10(rho / sigma_n^2), sigma_n^2 = 1 per receive antenna component, "
    "pre-combining; E[sum_d ||H_d||_F^2] = n_tx * n_rx";

std::string estimator_name(EstimatorKind kind) {
    return kind == EstimatorKind::omp ? "omp" : "ls";
}

void TrialSpec::validate() const {
    auto positive = [](int v, const char *name) {
        if (v < 1) {
            throw ParameterError(std::string("TrialSpec: ") + name + " must be >= 1");
        }
    };
    positive(n_tx, "n_tx");
    positive(n_rx, "n_rx");
    positive(n_taps, "n_taps");
    positive(n_frames, "n_frames");
    positive(n_chains, "n_chains");
    positive(n_paths, "n_paths");
    positive(frame_len, "frame_len");
    positive(omp_leak_factor, "omp_leak_factor");
    if (!std::isfinite(snr_db)) {
        throw ParameterError("TrialSpec: snr_db must be finite");
    }
    if (n_chains > n_tx || n_chains > n_rx) {
        throw ParameterError("TrialSpec: n_chains must not exceed either array size");
    }
    if (n_streams < 0) {
        throw ParameterError("TrialSpec: n_streams must be >= 0 (0 selects n_chains)");
    }
    if (effective_streams() > n_chains) {
        throw ParameterError("TrialSpec: n_streams must be in [1, min(L_t, L_r)]");
    }
    if (g_tx < n_tx || g_rx < n_rx) {
        throw ParameterError("TrialSpec: dictionary grids must satisfy g >= n (no undersampling)");
    }
    if (ps_bits < 1 || ps_bits > 16) {
        throw ParameterError("TrialSpec: ps_bits must be in [1, 16]");
    }
    if (adc_bits != AdcSpec::kInfiniteBits && (adc_bits < 1 || adc_bits > 16)) {
        throw ParameterError("TrialSpec: adc_bits must be in [1, 16] or infinite");
    }
    if (adc_clip_scale < 0.0) {
        throw ParameterError("TrialSpec: adc_clip_scale must be >= 0");
    }
    if (estimator == EstimatorKind::ls) {
        const long rows = static_cast<long>(n_frames) * frame_len * n_chains;
        const long cols = static_cast<long>(n_taps) * n_tx * n_rx;
        if (rows < cols) {
            throw ParameterError(
                "TrialSpec: LS needs n_frames * frame_len * n_chains >= n_taps * n_tx * n_rx (" +
                std::to_string(rows) + " < " + std::to_string(cols) + ")");
        }
    }
}

double nmse(const MatrixXcd &h_true, const MatrixXcd &h_hat) {
    if (h_true.rows() != h_hat.rows() || h_true.cols() != h_hat.cols()) {
        throw ParameterError("nmse: dimension mismatch");
    }
    const double denom = h_true.squaredNorm();
    if (!(denom > 0.0)) {
        throw DegenerateInputError("nmse: true channel has zero norm, metric undefined");
    }
    return (h_true - h_hat).squaredNorm() / denom;
}

double linear_to_db(double x) { return 10.0 * std::log10(x); }

TrialResult run_trial(const TrialSpec &spec) {
    spec.validate();
    Rng rng(spec.seed);

    const ArrayGeometry tx{spec.n_tx, 0.5};
    const ArrayGeometry rx{spec.n_rx, 0.5};
    const PulseShape pulse{};
    const double gain_variance = default_gain_variance(pulse, spec.n_taps);

    const PathSet paths =
        sample_path_set(rng, spec.n_paths, spec.n_taps, pulse, gain_variance);
    const WidebandChannel channel = build_channel(paths, tx, rx, spec.n_taps, pulse);

    std::vector<FrameConfig> frames;
    frames.reserve(static_cast<std::size_t>(spec.n_frames));
    for (int m = 0; m < spec.n_frames; ++m) {
        frames.push_back(draw_frame(rng, spec.n_tx, spec.n_rx, spec.n_chains, spec.n_chains,
                                    spec.effective_streams(), spec.frame_len, spec.ps_bits));
    }

    const double rho = std::pow(10.0, spec.snr_db / 10.0);
    const double noise_var = 1.0;
    const SensingSystem sys =
        simulate_observations(channel, frames, rho, noise_var, spec.adc(), rng);

    EstimateResult estimate;
    if (spec.estimator == EstimatorKind::omp) {
        const Dictionary dict = build_dictionary(tx, rx, spec.g_tx, spec.g_rx, spec.n_taps);
        const MeasurementOperator measurement(sys.phi, dict, rho);
        OmpConfig cfg;
        cfg.max_atoms = static_cast<int>(
            std::min<Eigen::Index>(static_cast<Eigen::Index>(spec.omp_leak_factor) *
                                       spec.n_paths * spec.n_taps,
                                   dict.n_atoms()));
        cfg.stop_rule = StopRule::fixed_atoms;
        estimate = omp(sys.observations, measurement, cfg);
    } else {
        LsOptions options;
        options.rtol = 1e-8;
        estimate = ls_estimate(sys.observations, sys.phi, rho, options);
    }

    TrialResult result;
    result.nmse = nmse(channel.concatenated, estimate.channel_hat);
    result.seed = spec.seed;
    result.iterations = estimate.iterations;
    result.estimator = spec.estimator;
    return result;
}

SweepResult run_sweep(const std::vector<TrialSpec> &points, const SweepOptions &options) {
    if (points.empty()) {
        throw ParameterError("run_sweep: empty point grid");
    }
    if (options.n_trials < 1) {
        throw ParameterError("run_sweep: n_trials must be >= 1");
    }
    for (const TrialSpec &p : points) {
        p.validate(); // fail before any compute
    }

    const std::size_t n_points = points.size();
    const std::size_t n_trials = static_cast<std::size_t>(options.n_trials);
    const std::size_t n_tasks = n_points * n_trials;

    std::vector<std::optional<TrialResult>> results(n_tasks);
    std::vector<std::string> errors(n_tasks);

    int workers = options.parallelism > 0
                      ? options.parallelism
                      : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(workers), n_tasks));

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t task = next.fetch_add(1);
            if (task >= n_tasks) {
                return;
            }
            const std::size_t p = task / n_trials;
            const std::size_t t = task % n_trials;
            TrialSpec spec = points[p];
            spec.seed = derive_seed(options.base_seed, p, t);
            try {
                results[task] = run_trial(spec);
            } catch (const std::exception &e) {
                std::ostringstream msg;
                msg << "point " << p << " trial " << t << " (seed " << spec.seed
                    << "): " << e.what();
                errors[task] = msg.str();
            }
        }
    };

    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back(worker);
        }
        for (std::thread &th : pool) {
            th.join();
        }
    }

    SweepResult sweep;
    sweep.base_seed = options.base_seed;
    sweep.snr_convention = kSnrConventionNote;
    sweep.rows.reserve(n_points);
    for (std::size_t p = 0; p < n_points; ++p) {
        SweepRow row;
        row.point = points[p];
        double sum = 0.0;
        std::vector<double> values;
        values.reserve(n_trials);
        for (std::size_t t = 0; t < n_trials; ++t) {
            const std::size_t task = p * n_trials + t;
            if (results[task].has_value()) {
                values.push_back(results[task]->nmse);
                sum += results[task]->nmse;
            } else {
                row.failures.push_back(errors[task]);
            }
        }
        if (!row.failures.empty() && !options.skip_failed_trials) {
            std::ostringstream msg;
            msg << "run_sweep: point " << p << " failed (" << row.failures.size() << " of "
                << n_trials << " trials); first failure: " << row.failures.front();
            throw NumericalError(msg.str());
        }
        row.n_trials = static_cast<int>(values.size());
        if (!values.empty()) {
            row.mean_nmse = sum / static_cast<double>(values.size());
            if (values.size() > 1) {
                double ss = 0.0;
                for (double v : values) {
                    ss += (v - row.mean_nmse) * (v - row.mean_nmse);
                }
                const double var = ss / static_cast<double>(values.size() - 1);
                row.stderr_nmse = std::sqrt(var / static_cast<double>(values.size()));
            }
        }
        sweep.rows.push_back(std::move(row));
    }

    // Content-addressed id of the sweep definition (FNV-1a over a canonical
    // print of points and options).
    std::ostringstream canon;
    canon << options.base_seed << '|' << options.n_trials;
    for (const TrialSpec &p : points) {
        canon << ';' << p.snr_db << ',' << p.adc_bits << ',' << p.n_frames << ','
              << p.n_chains << ',' << p.n_paths << ',' << estimator_name(p.estimator) << ','
              << p.n_tx << ',' << p.n_rx << ',' << p.g_tx << ',' << p.g_rx << ',' << p.n_taps
              << ',' << p.frame_len << ',' << p.effective_streams() << ',' << p.ps_bits << ','
              << p.omp_leak_factor << ',' << p.adc_clip_scale;
    }
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (char c : canon.str()) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 0x100000001b3ULL;
    }
    std::ostringstream hex;
    hex << std::hex << hash;
    sweep.config_hash = hex.str();
    return sweep;
}

std::vector<Eigen::MatrixXd> dump_virtual_channel(const WidebandChannel &channel,
                                                  const Dictionary &dictionary) {
    if (channel.n_rx() != dictionary.n_rx() || channel.n_tx() != dictionary.n_tx() ||
        channel.n_taps() != dictionary.n_taps) {
        throw ParameterError("dump_virtual_channel: channel and dictionary dimensions disagree");
    }
    std::vector<Eigen::MatrixXd> grids;
    grids.reserve(channel.taps.size());
    for (const MatrixXcd &tap : channel.taps) {
        grids.push_back(
            (dictionary.rx_grid.adjoint() * tap * dictionary.tx_grid).cwiseAbs());
    }
    return grids;
}

} // namespace mmce
