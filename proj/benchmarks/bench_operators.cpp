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

#include <benchmark/benchmark.h>

#include "mmce/estimators.hpp"
#include "mmce/experiments.hpp"

using namespace mmce;

namespace {

struct DefaultSystem {
    Dictionary dict;
    std::vector<FrameConfig> frames;
    PhiOperator phi;
    WidebandChannel channel;
    Eigen::VectorXcd observations;

    DefaultSystem() {
        Rng rng(7);
        const ArrayGeometry tx{32, 0.5};
        const ArrayGeometry rx{16, 0.5};
        const PulseShape pulse{};
        dict = build_dictionary(tx, rx, 64, 32, 4);
        const PathSet paths =
            sample_path_set(rng, 2, 4, pulse, default_gain_variance(pulse, 4));
        channel = build_channel(paths, tx, rx, 4, pulse);
        for (int m = 0; m < 80; ++m) {
            frames.push_back(draw_frame(rng, 32, 16, 4, 4, 4, 16, 6));
        }
        const SensingSystem sys =
            simulate_observations(channel, frames, 1.0, 1.0, AdcSpec::finite(4), rng);
        phi = sys.phi;
        observations = sys.observations;
    }
};

DefaultSystem &system_fixture() {
    static DefaultSystem fixture;
    return fixture;
}

} // namespace

static void BM_PhiApply(benchmark::State &state) {
    DefaultSystem &sys = system_fixture();
    const Eigen::VectorXcd vec_h = vectorize_channel(sys.channel);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sys.phi.apply(vec_h));
    }
}
BENCHMARK(BM_PhiApply);

static void BM_PhiAdjoint(benchmark::State &state) {
    DefaultSystem &sys = system_fixture();
    for (auto _ : state) {
        benchmark::DoNotOptimize(sys.phi.apply_adjoint(sys.observations));
    }
}
BENCHMARK(BM_PhiAdjoint);

static void BM_MeasurementAdjoint(benchmark::State &state) {
    DefaultSystem &sys = system_fixture();
    const MeasurementOperator a(sys.phi, sys.dict, 1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(a.apply_adjoint(sys.observations));
    }
}
BENCHMARK(BM_MeasurementAdjoint);

static void BM_OmpSolve(benchmark::State &state) {
    DefaultSystem &sys = system_fixture();
    const MeasurementOperator a(sys.phi, sys.dict, 1.0);
    OmpConfig cfg;
    cfg.max_atoms = int(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(omp(sys.observations, a, cfg));
    }
}
BENCHMARK(BM_OmpSolve)->Arg(8)->Arg(16)->Arg(32);

static void BM_LsSolve(benchmark::State &state) {
    DefaultSystem &sys = system_fixture();
    LsOptions options;
    options.rtol = 1e-8;
    for (auto _ : state) {
        benchmark::DoNotOptimize(ls_estimate(sys.observations, sys.phi, 1.0, options));
    }
}
BENCHMARK(BM_LsSolve);

static void BM_RunTrial(benchmark::State &state) {
    TrialSpec spec;
    spec.adc_bits = 4;
    spec.snr_db = 0.0;
    std::uint64_t seed = 1;
    for (auto _ : state) {
        spec.seed = seed++;
        benchmark::DoNotOptimize(run_trial(spec));
    }
}
BENCHMARK(BM_RunTrial);

static void BM_QuantizeVector(benchmark::State &state) {
    Rng rng(3);
    Eigen::VectorXcd v(5120);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        v(i) = rng.complex_normal(1.0);
    }
    const AdcSpec adc = AdcSpec::finite(int(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(quantize_complex_vector(v, adc, 1.0));
    }
}
BENCHMARK(BM_QuantizeVector)->Arg(1)->Arg(4);

BENCHMARK_MAIN();
