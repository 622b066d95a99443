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

#include <doctest.h>

#include <set>

#include "mmce/errors.hpp"
#include "mmce/quantizer.hpp"
#include "mmce/rng.hpp"
#include "oracles.hpp"

using namespace mmce;

TEST_CASE("quantize_real: one bit is a scaled sign") {
    const double step = 0.8;
    CHECK(quantize_real(2.7, 1, step) == doctest::Approx(step / 2.0));
    CHECK(quantize_real(1e-9, 1, step) == doctest::Approx(step / 2.0));
    CHECK(quantize_real(-1e-9, 1, step) == doctest::Approx(-step / 2.0));
    CHECK(quantize_real(-42.0, 1, step) == doctest::Approx(-step / 2.0));
}

TEST_CASE("quantize_real: two-bit levels and clamping") {
    // levels with step 1: {-1.5, -0.5, 0.5, 1.5}
    CHECK(quantize_real(0.3, 2, 1.0) == doctest::Approx(0.5));
    CHECK(quantize_real(1.7, 2, 1.0) == doctest::Approx(1.5));
    CHECK(quantize_real(-0.2, 2, 1.0) == doctest::Approx(-0.5));
    CHECK(quantize_real(-9.0, 2, 1.0) == doctest::Approx(-1.5));
}

TEST_CASE("quantize_real: cell bound inside the unclipped range") {
    Rng rng(31);
    const int bits = 3;
    const double step = 0.25;
    const double top_edge = (1 << (bits - 1)) * step;
    for (int i = 0; i < 2000; ++i) {
        const double x = rng.uniform(-top_edge, top_edge);
        CHECK(std::abs(quantize_real(x, bits, step) - x) <= step / 2.0 + 1e-15);
    }
}

TEST_CASE("quantize_real: monotone and odd-symmetric") {
    Rng rng(32);
    for (int bits : {1, 2, 3, 4}) {
        for (int i = 0; i < 2000; ++i) {
            const double a = rng.uniform(-4.0, 4.0);
            const double b = rng.uniform(-4.0, 4.0);
            const double qa = quantize_real(a, bits, 0.3);
            const double qb = quantize_real(b, bits, 0.3);
            if (a <= b) {
                CHECK(qa <= qb);
            } else {
                CHECK(qb <= qa);
            }
            if (a != 0.0) {
                CHECK(quantize_real(-a, bits, 0.3) == doctest::Approx(-qa));
            }
        }
    }
}

TEST_CASE("quantize_real: exactly 2^bits output levels over a dense sweep") {
    for (int bits : {1, 2, 3, 4, 5}) {
        std::set<double> levels;
        for (double x = -12.0; x <= 12.0; x += 0.001) {
            levels.insert(quantize_real(x, bits, 0.7));
        }
        CHECK(int(levels.size()) == (1 << bits));
    }
}

TEST_CASE("auto_step: closed form and error paths") {
    CHECK(auto_step(1.0, 1, 2.0) == doctest::Approx(2.0));
    CHECK(auto_step(4.0, 3, 2.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(auto_step(1.0, AdcSpec::kInfiniteBits, 2.0), ParameterError);
    CHECK_THROWS_AS(auto_step(-1.0, 2, 2.0), ParameterError);
    CHECK_THROWS_AS(quantize_real(0.5, 2, 0.0), ParameterError);
}

TEST_CASE("quantize_complex_vector: infinite resolution is a bit-exact passthrough") {
    Rng rng(7);
    Eigen::VectorXcd v(64);
    for (int i = 0; i < 64; ++i) {
        v(i) = rng.complex_normal(3.0);
    }
    const Eigen::VectorXcd out = quantize_complex_vector(v, AdcSpec::infinite());
    CHECK(out == v);
}

TEST_CASE("quantize_complex_vector: one bit maps components to +-step/2") {
    Rng rng(8);
    Eigen::VectorXcd v(128);
    for (int i = 0; i < 128; ++i) {
        v(i) = rng.complex_normal(1.0);
    }
    const AdcSpec adc = AdcSpec::finite(1);
    const Eigen::VectorXcd out = quantize_complex_vector(v, adc, 1.0);
    const double half = auto_step(1.0, 1, adc.effective_clip_scale()) / 2.0;
    for (int i = 0; i < 128; ++i) {
        CHECK(std::abs(std::abs(out(i).real()) - half) < 1e-12);
        CHECK(std::abs(std::abs(out(i).imag()) - half) < 1e-12);
        CHECK(out(i).real() * v(i).real() >= 0.0);
        CHECK(out(i).imag() * v(i).imag() >= 0.0);
    }
}

TEST_CASE("quantize_complex_vector: all-zero input stays finite") {
    const Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(16);
    const Eigen::VectorXcd out = quantize_complex_vector(zero, AdcSpec::finite(2));
    for (int i = 0; i < 16; ++i) {
        CHECK(std::isfinite(out(i).real()));
        CHECK(std::isfinite(out(i).imag()));
    }
}

TEST_CASE("default clip scales: SQNR within 2 dB of the step-sweep optimum") {
    Rng rng(99);
    std::vector<double> samples(200000);
    for (double &x : samples) {
        x = rng.normal();
    }
    for (int bits : {1, 2, 3, 4}) {
        const double chosen_step = auto_step(1.0, bits, default_clip_scale(bits));
        const double chosen = oracles::sqnr_db(samples, bits, chosen_step);
        const double best = oracles::best_sqnr_db(samples, bits);
        INFO("bits ", bits, ": chosen ", chosen, " dB vs best ", best, " dB");
        CHECK(best - chosen <= 2.0);
    }
}
