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

#include "mmce/run_config.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "mmce/errors.hpp"

namespace mmce {

namespace {

std::string trim(const std::string &s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) {
        return "";
    }
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string &key, const std::string &value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) {
            throw std::invalid_argument(value);
        }
        return v;
    } catch (const std::exception &) {
        throw ParameterError("config key '" + key + "': expected a number, got '" + value + "'");
    }
}

long parse_long(const std::string &key, const std::string &value) {
    try {
        std::size_t used = 0;
        const long v = std::stol(value, &used);
        if (used != value.size()) {
            throw std::invalid_argument(value);
        }
        return v;
    } catch (const std::exception &) {
        throw ParameterError("config key '" + key + "': expected an integer, got '" + value +
                             "'");
    }
}

int parse_bits(const std::string &key, const std::string &value) {
    if (value == "inf" || value == "infinite") {
        return AdcSpec::kInfiniteBits;
    }
    return static_cast<int>(parse_long(key, value));
}

EstimatorKind parse_estimator(const std::string &key, const std::string &value) {
    if (value == "omp") {
        return EstimatorKind::omp;
    }
    if (value == "ls") {
        return EstimatorKind::ls;
    }
    throw ParameterError("config key '" + key + "': expected 'omp' or 'ls', got '" + value +
                         "'");
}

// Axis values: a bare scalar, a "[a,b,c]" list, or a "[lo..hi step s]"
// inclusive range.
std::vector<std::string> split_axis_tokens(const std::string &key, const std::string &value) {
    if (value.empty()) {
        throw ParameterError("config key '" + key + "': empty value");
    }
    if (value.front() != '[') {
        return {value};
    }
    if (value.back() != ']') {
        throw ParameterError("config key '" + key + "': unterminated list '" + value + "'");
    }
    const std::string inner = trim(value.substr(1, value.size() - 2));
    if (inner.empty()) {
        throw ParameterError("config key '" + key + "': empty list");
    }
    const auto range_pos = inner.find("..");
    if (range_pos != std::string::npos) {
        const std::string lo = trim(inner.substr(0, range_pos));
        std::string rest = trim(inner.substr(range_pos + 2));
        std::string step = "1";
        const auto step_pos = rest.find("step");
        if (step_pos != std::string::npos) {
            step = trim(rest.substr(step_pos + 4));
            rest = trim(rest.substr(0, step_pos));
        }
        const double lo_v = parse_double(key, lo);
        const double hi_v = parse_double(key, rest);
        const double step_v = parse_double(key, step);
        if (!(step_v > 0.0) || hi_v < lo_v) {
            throw ParameterError("config key '" + key + "': bad range '" + value + "'");
        }
        std::vector<std::string> out;
        const int count = static_cast<int>(std::floor((hi_v - lo_v) / step_v + 1e-9)) + 1;
        for (int i = 0; i < count; ++i) {
            std::ostringstream v;
            v << std::setprecision(15) << lo_v + i * step_v;
            out.push_back(v.str());
        }
        return out;
    }
    std::vector<std::string> out;
    std::stringstream ss(inner);
    std::string token;
    while (std::getline(ss, token, ',')) {
        token = trim(token);
        if (token.empty()) {
            throw ParameterError("config key '" + key + "': empty list element");
        }
        out.push_back(token);
    }
    return out;
}

std::vector<double> parse_double_axis(const std::string &key, const std::string &value) {
    std::vector<double> out;
    for (const std::string &tok : split_axis_tokens(key, value)) {
        out.push_back(parse_double(key, tok));
    }
    return out;
}

std::vector<int> parse_int_axis(const std::string &key, const std::string &value) {
    std::vector<int> out;
    for (const std::string &tok : split_axis_tokens(key, value)) {
        out.push_back(static_cast<int>(parse_long(key, tok)));
    }
    return out;
}

std::vector<int> parse_bits_axis(const std::string &key, const std::string &value) {
    std::vector<int> out;
    for (const std::string &tok : split_axis_tokens(key, value)) {
        out.push_back(parse_bits(key, tok));
    }
    return out;
}

std::vector<EstimatorKind> parse_estimator_axis(const std::string &key,
                                                const std::string &value) {
    std::vector<EstimatorKind> out;
    for (const std::string &tok : split_axis_tokens(key, value)) {
        out.push_back(parse_estimator(key, tok));
    }
    return out;
}

int parse_scalar_int(const std::string &key, const std::string &value) {
    return static_cast<int>(parse_long(key, value));
}

void apply_key(RunConfig &cfg, const std::string &key, const std::string &value) {
    if (key == "snr_db") {
        cfg.snr_db_axis = parse_double_axis(key, value);
    } else if (key == "adc_bits") {
        cfg.adc_bits_axis = parse_bits_axis(key, value);
    } else if (key == "n_frames") {
        cfg.n_frames_axis = parse_int_axis(key, value);
    } else if (key == "n_chains") {
        cfg.n_chains_axis = parse_int_axis(key, value);
    } else if (key == "n_paths") {
        cfg.n_paths_axis = parse_int_axis(key, value);
    } else if (key == "estimator") {
        cfg.estimator_axis = parse_estimator_axis(key, value);
    } else if (key == "n_tx") {
        cfg.base.n_tx = parse_scalar_int(key, value);
    } else if (key == "n_rx") {
        cfg.base.n_rx = parse_scalar_int(key, value);
    } else if (key == "g_tx") {
        cfg.base.g_tx = parse_scalar_int(key, value);
    } else if (key == "g_rx") {
        cfg.base.g_rx = parse_scalar_int(key, value);
    } else if (key == "n_taps") {
        cfg.base.n_taps = parse_scalar_int(key, value);
    } else if (key == "frame_len") {
        cfg.base.frame_len = parse_scalar_int(key, value);
    } else if (key == "n_streams") {
        cfg.base.n_streams = parse_scalar_int(key, value);
    } else if (key == "ps_bits") {
        cfg.base.ps_bits = parse_scalar_int(key, value);
    } else if (key == "omp_leak_factor") {
        cfg.base.omp_leak_factor = parse_scalar_int(key, value);
    } else if (key == "adc_clip_scale") {
        cfg.base.adc_clip_scale = parse_double(key, value);
    } else if (key == "n_trials") {
        cfg.n_trials = parse_scalar_int(key, value);
    } else if (key == "seed") {
        cfg.seed = static_cast<std::uint64_t>(parse_long(key, value));
    } else if (key == "parallel") {
        cfg.parallelism = parse_scalar_int(key, value);
    } else if (key == "out_dir") {
        cfg.out_dir = value;
    } else if (key == "preset") {
        cfg.preset = preset_from_name(value);
    } else {
        throw ParameterError("unknown config key '" + key + "'");
    }
    cfg.explicit_keys.insert(key);
}

void apply_line(RunConfig &cfg, std::string line, const std::string &where) {
    const auto comment = line.find('#');
    if (comment != std::string::npos) {
        line = line.substr(0, comment);
    }
    line = trim(line);
    if (line.empty()) {
        return;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
        throw ParameterError(where + ": expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
        throw ParameterError(where + ": missing key in '" + line + "'");
    }
    apply_key(cfg, key, value);
}

} // namespace

std::string preset_name(Preset preset) {
    switch (preset) {
    case Preset::none:
        return "none";
    case Preset::fig3_ls_vs_omp:
        return "fig3_ls_vs_omp";
    case Preset::fig4_frames_chains:
        return "fig4_frames_chains";
    case Preset::fig5_frames_infbit:
        return "fig5_frames_infbit";
    case Preset::fig6_frames_bits:
        return "fig6_frames_bits";
    case Preset::fig7_sparsity:
        return "fig7_sparsity";
    }
    return "none";
}

std::vector<std::string> preset_names() {
    return {"fig3_ls_vs_omp", "fig4_frames_chains", "fig5_frames_infbit", "fig6_frames_bits",
            "fig7_sparsity"};
}

Preset preset_from_name(const std::string &name) {
    if (name == "none") {
        return Preset::none;
    }
    if (name == "fig3_ls_vs_omp") {
        return Preset::fig3_ls_vs_omp;
    }
    if (name == "fig4_frames_chains") {
        return Preset::fig4_frames_chains;
    }
    if (name == "fig5_frames_infbit") {
        return Preset::fig5_frames_infbit;
    }
    if (name == "fig6_frames_bits") {
        return Preset::fig6_frames_bits;
    }
    if (name == "fig7_sparsity") {
        return Preset::fig7_sparsity;
    }
    throw ParameterError("unknown preset '" + name + "'");
}

std::vector<TrialSpec> RunConfig::build_grid() const {
    std::vector<TrialSpec> grid;
    for (EstimatorKind est : estimator_axis) {
        for (int bits : adc_bits_axis) {
            for (int chains : n_chains_axis) {
                for (int frames : n_frames_axis) {
                    for (int paths : n_paths_axis) {
                        for (double snr : snr_db_axis) {
                            TrialSpec spec = base;
                            spec.estimator = est;
                            spec.adc_bits = bits;
                            spec.n_chains = chains;
                            spec.n_frames = frames;
                            spec.n_paths = paths;
                            spec.snr_db = snr;
                            grid.push_back(spec);
                        }
                    }
                }
            }
        }
    }
    return grid;
}

void RunConfig::validate() const {
    if (n_trials < 1) {
        throw ParameterError("config key 'n_trials': must be >= 1");
    }
    if (parallelism < 0) {
        throw ParameterError("config key 'parallel': must be >= 0");
    }
    if (out_dir.empty()) {
        throw ParameterError("config key 'out_dir': must not be empty");
    }
    const std::vector<TrialSpec> grid = build_grid();
    if (grid.empty()) {
        throw ParameterError("config: empty sweep grid");
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        try {
            grid[i].validate();
        } catch (const ParameterError &e) {
            throw ParameterError("grid point " + std::to_string(i) + ": " + e.what());
        }
    }
}

RunConfig parse_config(const std::string &file_path,
                       const std::vector<std::string> &overrides) {
    RunConfig cfg;
    if (!file_path.empty()) {
        std::ifstream in(file_path);
        if (!in) {
            throw ParameterError("config file '" + file_path + "' cannot be opened");
        }
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            apply_line(cfg, line, file_path + ":" + std::to_string(line_no));
        }
    }
    for (const std::string &override_kv : overrides) {
        apply_line(cfg, override_kv, "override '" + override_kv + "'");
    }
    return cfg;
}

void apply_preset(RunConfig &config) {
    auto set_axis = [&](const std::string &key, auto &field, auto value) {
        if (!config.is_explicit(key)) {
            field = value;
        }
    };
    const std::vector<double> full_snr = {-20, -15, -10, -5, 0, 5, 10, 15};
    const std::vector<int> frames_decades = {10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
    switch (config.preset) {
    case Preset::none:
        return;
    case Preset::fig3_ls_vs_omp:
        set_axis("snr_db", config.snr_db_axis, full_snr);
        set_axis("adc_bits", config.adc_bits_axis,
                 std::vector<int>{1, 2, 3, 4, AdcSpec::kInfiniteBits});
        set_axis("estimator", config.estimator_axis,
                 std::vector<EstimatorKind>{EstimatorKind::omp, EstimatorKind::ls});
        set_axis("n_frames", config.n_frames_axis, std::vector<int>{80});
        set_axis("n_chains", config.n_chains_axis, std::vector<int>{4});
        set_axis("n_paths", config.n_paths_axis, std::vector<int>{2});
        return;
    case Preset::fig4_frames_chains:
        set_axis("snr_db", config.snr_db_axis, full_snr);
        set_axis("adc_bits", config.adc_bits_axis,
                 std::vector<int>{AdcSpec::kInfiniteBits, 4});
        set_axis("estimator", config.estimator_axis,
                 std::vector<EstimatorKind>{EstimatorKind::omp});
        set_axis("n_frames", config.n_frames_axis, std::vector<int>{10, 100});
        set_axis("n_chains", config.n_chains_axis, std::vector<int>{1, 2, 4});
        set_axis("n_paths", config.n_paths_axis, std::vector<int>{2});
        return;
    case Preset::fig5_frames_infbit:
        set_axis("snr_db", config.snr_db_axis, std::vector<double>{-20, 0, 15});
        set_axis("adc_bits", config.adc_bits_axis, std::vector<int>{AdcSpec::kInfiniteBits});
        set_axis("estimator", config.estimator_axis,
                 std::vector<EstimatorKind>{EstimatorKind::omp});
        set_axis("n_frames", config.n_frames_axis, frames_decades);
        set_axis("n_chains", config.n_chains_axis, std::vector<int>{1, 2, 4});
        set_axis("n_paths", config.n_paths_axis, std::vector<int>{2});
        return;
    case Preset::fig6_frames_bits:
        set_axis("snr_db", config.snr_db_axis, std::vector<double>{-20, 0, 15});
        set_axis("adc_bits", config.adc_bits_axis,
                 std::vector<int>{1, 4, AdcSpec::kInfiniteBits});
        set_axis("estimator", config.estimator_axis,
                 std::vector<EstimatorKind>{EstimatorKind::omp});
        set_axis("n_frames", config.n_frames_axis, frames_decades);
        set_axis("n_chains", config.n_chains_axis, std::vector<int>{4});
        set_axis("n_paths", config.n_paths_axis, std::vector<int>{2});
        return;
    case Preset::fig7_sparsity:
        set_axis("snr_db", config.snr_db_axis, std::vector<double>{5});
        set_axis("adc_bits", config.adc_bits_axis,
                 std::vector<int>{2, 3, 4, AdcSpec::kInfiniteBits});
        set_axis("estimator", config.estimator_axis,
                 std::vector<EstimatorKind>{EstimatorKind::omp});
        set_axis("n_frames", config.n_frames_axis, std::vector<int>{80});
        set_axis("n_chains", config.n_chains_axis, std::vector<int>{4});
        set_axis("n_paths", config.n_paths_axis, std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8});
        return;
    }
}

namespace {

std::string bits_label(int bits) {
    return bits == AdcSpec::kInfiniteBits ? "inf" : std::to_string(bits);
}

std::string format_double(double v) {
    std::ostringstream out;
    out << std::setprecision(12) << v;
    return out.str();
}

} // namespace

std::string describe_grid(const RunConfig &config) {
    const std::vector<TrialSpec> grid = config.build_grid();
    std::ostringstream out;
    out << "preset " << preset_name(config.preset) << ": " << grid.size() << " points x "
        << config.n_trials << " trials = " << grid.size() * config.n_trials << " trials total\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const TrialSpec &p = grid[i];
        out << "  point " << i << ": snr_db=" << format_double(p.snr_db)
            << " adc_bits=" << bits_label(p.adc_bits) << " estimator="
            << estimator_name(p.estimator) << " n_chains=" << p.n_chains
            << " n_frames=" << p.n_frames << " n_paths=" << p.n_paths << "\n";
    }
    return out.str();
}

void write_sweep_csv(const std::filesystem::path &path, const RunConfig &config,
                     const SweepResult &sweep) {
    const std::filesystem::path dir =
        path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path();
    std::filesystem::create_directories(dir);
    const std::filesystem::path tmp = dir / ("." + path.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write '" + tmp.string() + "'");
        }
        out << std::setprecision(12);
        out << "# preset = " << preset_name(config.preset) << "\n";
        out << "# n_trials = " << config.n_trials << "\n";
        out << "# base_seed = " << sweep.base_seed << "\n";
        out << "# config_hash = " << sweep.config_hash << "\n";
        out << "# snr_convention = " << sweep.snr_convention << "\n";
        out << "# n_tx = " << config.base.n_tx << "\n";
        out << "# n_rx = " << config.base.n_rx << "\n";
        out << "# g_tx = " << config.base.g_tx << "\n";
        out << "# g_rx = " << config.base.g_rx << "\n";
        out << "# n_taps = " << config.base.n_taps << "\n";
        out << "# frame_len = " << config.base.frame_len << "\n";
        out << "# n_streams = " << config.base.effective_streams() << "\n";
        out << "# ps_bits = " << config.base.ps_bits << "\n";
        out << "# omp_leak_factor = " << config.base.omp_leak_factor << "\n";
        out << "# adc_clip_scale = " << config.base.adc_clip_scale << "\n";
        out << "snr_db,n_paths,estimator,adc_bits,n_chains,n_frames,mean_nmse,mean_nmse_db,"
               "stderr_db,n_trials,seed\n";
        for (const SweepRow &row : sweep.rows) {
            const double mean_db =
                row.mean_nmse > 0.0
                    ? linear_to_db(row.mean_nmse)
                    : -std::numeric_limits<double>::infinity();
            const double stderr_db = row.mean_nmse > 0.0
                                         ? (10.0 / std::log(10.0)) *
                                               (row.stderr_nmse / row.mean_nmse)
                                         : 0.0;
            out << format_double(row.point.snr_db) << ',' << row.point.n_paths << ','
                << estimator_name(row.point.estimator) << ',' << bits_label(row.point.adc_bits)
                << ',' << row.point.n_chains << ',' << row.point.n_frames << ','
                << format_double(row.mean_nmse) << ',' << format_double(mean_db) << ','
                << format_double(stderr_db) << ',' << row.n_trials << ',' << sweep.base_seed
                << "\n";
        }
    }
    std::filesystem::rename(tmp, path);
}

CsvDocument read_sweep_csv(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ParameterError("CSV file '" + path.string() + "' cannot be opened");
    }
    CsvDocument doc;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '#') {
            const std::string body = trim(line.substr(1));
            const auto eq = body.find('=');
            if (eq != std::string::npos) {
                doc.metadata[trim(body.substr(0, eq))] = trim(body.substr(eq + 1));
            }
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) {
            fields.push_back(trim(field));
        }
        if (!have_header) {
            doc.columns = std::move(fields);
            have_header = true;
        } else {
            if (fields.size() != doc.columns.size()) {
                throw ParameterError("CSV row has " + std::to_string(fields.size()) +
                                     " fields, header has " +
                                     std::to_string(doc.columns.size()));
            }
            doc.rows.push_back(std::move(fields));
        }
    }
    return doc;
}

PresetOutput run_preset(Preset preset, RunConfig config) {
    config.preset = preset;
    apply_preset(config);
    config.validate();

    const std::vector<TrialSpec> grid = config.build_grid();
    SweepOptions options;
    options.n_trials = config.n_trials;
    options.parallelism = config.parallelism;
    options.base_seed = config.seed;
    const SweepResult sweep = run_sweep(grid, options);

    const std::string stem = preset == Preset::none ? "sweep" : preset_name(preset);
    PresetOutput out;
    out.csv_path = std::filesystem::path(config.out_dir) / (stem + ".csv");
    write_sweep_csv(out.csv_path, config, sweep);
    out.sweep = sweep;
    return out;
}

} // namespace mmce
