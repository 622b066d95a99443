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

#ifndef MMCE_RUN_CONFIG_HPP
#define MMCE_RUN_CONFIG_HPP

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mmce/experiments.hpp"

namespace mmce {

enum class Preset {
    none,
    fig3_ls_vs_omp,
    fig4_frames_chains,
    fig5_frames_infbit,
    fig6_frames_bits,
    fig7_sparsity,
};

std::string preset_name(Preset preset);
Preset preset_from_name(const std::string &name);
std::vector<std::string> preset_names();

/// A run definition: scalar dimensions plus swept axes. Parsed from a
/// flat key = value config file with flag overrides on top; a preset
/// fills in the axes the user left untouched.
struct RunConfig {
    TrialSpec base; // scalar parameters; axis fields here are ignored

    std::vector<double> snr_db_axis = {0.0};
    std::vector<int> adc_bits_axis = {AdcSpec::kInfiniteBits};
    std::vector<int> n_frames_axis = {80};
    std::vector<int> n_chains_axis = {4};
    std::vector<int> n_paths_axis = {2};
    std::vector<EstimatorKind> estimator_axis = {EstimatorKind::omp};

    int n_trials = 200;
    std::uint64_t seed = 1;
    int parallelism = 0;
    std::string out_dir = ".";
    Preset preset = Preset::none;

    std::set<std::string> explicit_keys;

    bool is_explicit(const std::string &key) const { return explicit_keys.count(key) > 0; }

    /// Cartesian product of the axes in a fixed nesting order
    /// (estimator, bits, chains, frames, paths, snr innermost).
    std::vector<TrialSpec> build_grid() const;

    /// Validates every grid point before any compute.
    void validate() const;
};

/// Parse a config file (empty path = defaults only) and apply
/// "key=value" overrides on top. Unknown keys, malformed values and
/// invariant violations raise ParameterError naming the key.
RunConfig parse_config(const std::string &file_path,
                       const std::vector<std::string> &overrides);

/// Fill the axes a preset sweeps, where the user has not set them
/// explicitly.
void apply_preset(RunConfig &config);

/// Human-readable trial plan for dry runs.
std::string describe_grid(const RunConfig &config);

struct PresetOutput {
    std::filesystem::path csv_path;
    SweepResult sweep;
};

/// Run the sweep for a preset (or a generic config when Preset::none) and
/// write one CSV artifact atomically. Returns the artifact path and the
/// in-memory result.
PresetOutput run_preset(Preset preset, RunConfig config);

/// Parsed CSV artifact: '#'-prefixed metadata, column names, data rows.
struct CsvDocument {
    std::map<std::string, std::string> metadata;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

void write_sweep_csv(const std::filesystem::path &path, const RunConfig &config,
                     const SweepResult &sweep);
CsvDocument read_sweep_csv(const std::filesystem::path &path);

} // namespace mmce

#endif
