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

#ifndef MMCE_EXPERIMENTS_HPP
#define MMCE_EXPERIMENTS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "mmce/estimators.hpp"
#include "mmce/quantizer.hpp"
#include "mmce/sensing.hpp"

namespace mmce {

enum class EstimatorKind { omp, ls };

std::string estimator_name(EstimatorKind kind);

/// SNR is rho / sigma_n^2 with sigma_n^2 = 1 per receive antenna
/// component, measured before combining; the channel is normalized so the
/// tap-summed energy averages n_tx * n_rx.
extern const char *const kSnrConventionNote;

/// Complete description of one Monte Carlo trial. Defaults are the
/// standard working point of the study: 32x16 arrays, 2x oversampled
/// grids, 4 RF chains and streams, 4 taps, 2 paths, 80 frames of 16
/// symbols, 6-bit phase shifters.
struct TrialSpec {
    double snr_db = 0.0;
    int adc_bits = AdcSpec::kInfiniteBits;
    int n_frames = 80;
    int n_chains = 4; // L_t = L_r
    int n_paths = 2;
    EstimatorKind estimator = EstimatorKind::omp;
    std::uint64_t seed = 0;

    int n_tx = 32;
    int n_rx = 16;
    int g_tx = 64;
    int g_rx = 32;
    int n_taps = 4;
    int frame_len = 16;
    int n_streams = 0; // 0: use n_chains (the largest allowed)
    int ps_bits = 6;

    /// OMP atom budget = leak factor * n_paths * n_taps; off-grid paths
    /// spread energy over neighboring bins, so the budget exceeds the
    /// nominal sparsity.
    int omp_leak_factor = 2;
    /// 0 selects the per-bit-depth default.
    double adc_clip_scale = 0.0;

    int effective_streams() const { return n_streams > 0 ? n_streams : n_chains; }
    AdcSpec adc() const {
        return adc_bits == AdcSpec::kInfiniteBits ? AdcSpec::infinite()
                                                  : AdcSpec::finite(adc_bits, adc_clip_scale);
    }
    void validate() const; // throws ParameterError with the offending field
};

struct TrialResult {
    double nmse = 0.0;
    std::uint64_t seed = 0;
    int iterations = 0;
    EstimatorKind estimator = EstimatorKind::omp;
};

/// Single-trial squared estimation error ratio ||H - Hhat||_F^2 /
/// ||H||_F^2. Averaging over trials is done by the sweep layer.
double nmse(const Eigen::MatrixXcd &h_true, const Eigen::MatrixXcd &h_hat);

/// Run one seeded trial end to end: sample a channel, draw frames,
/// simulate quantized observations, estimate, evaluate. Bit-reproducible
/// for a fixed spec.
TrialResult run_trial(const TrialSpec &spec);

struct SweepOptions {
    int n_trials = 200;
    int parallelism = 0; // 0: hardware concurrency
    std::uint64_t base_seed = 1;
    /// When set, failed trials are recorded per point instead of aborting
    /// the sweep.
    bool skip_failed_trials = false;
};

struct SweepRow {
    TrialSpec point;      // per-trial seeds are derived, not taken from here
    double mean_nmse = 0.0;
    double stderr_nmse = 0.0; // standard error of the mean, linear scale
    int n_trials = 0;         // successful trials aggregated
    std::vector<std::string> failures;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::uint64_t base_seed = 0;
    std::string config_hash;
    std::string snr_convention;
};

/// Monte Carlo over a grid of points. Trial (p, t) runs with the stream
/// derive_seed(base_seed, p, t), independent of scheduling; results are
/// reduced in fixed trial order, so the outcome does not depend on the
/// level of parallelism.
SweepResult run_sweep(const std::vector<TrialSpec> &points, const SweepOptions &options);

double linear_to_db(double x);

/// Magnitude of the virtual (beamspace) channel per tap: |U_r^H H_d U_t|,
/// a g_rx x g_tx grid. On exact bins with square grids the energy sits in
/// single cells; off-grid paths leak into neighbors.
std::vector<Eigen::MatrixXd> dump_virtual_channel(const WidebandChannel &channel,
                                                  const Dictionary &dictionary);

} // namespace mmce

#endif
