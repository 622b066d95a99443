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

#include <CLI11.hpp>
#include <iostream>

#include "mmce/errors.hpp"
#include "mmce/run_config.hpp"

int main(int argc, char **argv) {
    CLI::App app{
        "mmce: Monte Carlo channel estimation sweeps for wideband mmWave MIMO systems\n"
        "with hybrid beamforming and low-resolution ADCs"};

    std::string config_path;
    std::string preset_arg;
    std::vector<std::string> overrides;
    int trials = -1;
    long long seed = -1;
    int parallel = -1;
    std::string out_dir;
    bool dry_run = false;

    app.add_option("--config", config_path, "Flat key = value config file");
    app.add_option("--preset", preset_arg,
                   "Named sweep: fig3_ls_vs_omp, fig4_frames_chains, fig5_frames_infbit, "
                   "fig6_frames_bits, fig7_sparsity");
    app.add_option("--set", overrides, "Override a config key, e.g. --set snr_db=[-20..15 step 5]");
    app.add_option("--trials", trials, "Monte Carlo trials per sweep point");
    app.add_option("--seed", seed, "Base seed for the trial streams");
    app.add_option("--parallel", parallel, "Worker threads (0 = hardware concurrency)");
    app.add_option("--out", out_dir, "Output directory for CSV artifacts");
    app.add_flag("--dry-run", dry_run, "Print the trial grid without computing");

    CLI11_PARSE(app, argc, argv);

    try {
        // Named flags sit on top of --set overrides, which sit on top of the file.
        if (trials >= 0) {
            overrides.push_back("n_trials=" + std::to_string(trials));
        }
        if (seed >= 0) {
            overrides.push_back("seed=" + std::to_string(seed));
        }
        if (parallel >= 0) {
            overrides.push_back("parallel=" + std::to_string(parallel));
        }
        if (!out_dir.empty()) {
            overrides.push_back("out_dir=" + out_dir);
        }
        if (!preset_arg.empty()) {
            overrides.push_back("preset=" + preset_arg);
        }

        mmce::RunConfig config = mmce::parse_config(config_path, overrides);
        mmce::apply_preset(config);

        if (dry_run) {
            config.validate();
            std::cout << mmce::describe_grid(config);
            return 0;
        }

        const mmce::PresetOutput output = mmce::run_preset(config.preset, config);
        std::size_t failed_points = 0;
        for (const mmce::SweepRow &row : output.sweep.rows) {
            if (!row.failures.empty()) {
                ++failed_points;
            }
        }
        std::cout << "wrote " << output.csv_path.string() << " (" << output.sweep.rows.size()
                  << " points, config " << output.sweep.config_hash << ")\n";
        if (failed_points > 0) {
            std::cerr << failed_points << " points had failed trials:\n";
            for (std::size_t i = 0; i < output.sweep.rows.size(); ++i) {
                for (const std::string &msg : output.sweep.rows[i].failures) {
                    std::cerr << "  " << msg << "\n";
                }
            }
            return 2;
        }
        return 0;
    } catch (const mmce::ParameterError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
