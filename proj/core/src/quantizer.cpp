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

#include "mmce/quantizer.hpp"

#include <algorithm>
#include <cmath>

#include "mmce/errors.hpp"

namespace mmce {

namespace {

void check_finite_bits(int bits) {
    if (bits < 1 || bits > 16) {
        throw ParameterError("ADC bits must be in [1, 16]");
    }
}

} // namespace

double default_clip_scale(int bits) {
    check_finite_bits(bits);
    if (bits == 1) {
        return 2.5;
    }
    return bits == 2 ? 2.0 : 3.0;
}

double quantize_real(double x, int bits, double step) {
    check_finite_bits(bits);
    if (!(step > 0.0)) {
        throw ParameterError("quantize_real: step must be > 0");
    }
    const double top = ((1L << (bits - 1)) - 0.5) * step;
    const double q = step * (std::floor(x / step) + 0.5);
    return std::clamp(q, -top, top);
}

double auto_step(double signal_power_per_component, int bits, double clip_scale) {
    if (bits == AdcSpec::kInfiniteBits) {
        throw ParameterError("auto_step: not applicable to infinite resolution");
    }
    check_finite_bits(bits);
    if (signal_power_per_component < 0.0) {
        throw ParameterError("auto_step: power must be >= 0");
    }
    if (!(clip_scale > 0.0)) {
        throw ParameterError("auto_step: clip_scale must be > 0");
    }
    return clip_scale * std::sqrt(signal_power_per_component) /
           static_cast<double>(1L << (bits - 1));
}

Eigen::VectorXcd quantize_complex_vector(const Eigen::VectorXcd &analog, const AdcSpec &adc,
                                         double power_per_component) {
    if (adc.is_infinite()) {
        return analog;
    }
    check_finite_bits(adc.bits);
    if (!(power_per_component > 0.0)) {
        power_per_component = 1.0; // degenerate zero-power input
    }
    const double step = auto_step(power_per_component, adc.bits, adc.effective_clip_scale());
    Eigen::VectorXcd out(analog.size());
    for (Eigen::Index i = 0; i < analog.size(); ++i) {
        out(i) = {quantize_real(analog(i).real(), adc.bits, step),
                  quantize_real(analog(i).imag(), adc.bits, step)};
    }
    return out;
}

Eigen::VectorXcd quantize_complex_vector(const Eigen::VectorXcd &analog, const AdcSpec &adc) {
    if (adc.is_infinite()) {
        return analog;
    }
    double power = 0.0;
    if (analog.size() > 0) {
        power = analog.squaredNorm() / (2.0 * static_cast<double>(analog.size()));
    }
    return quantize_complex_vector(analog, adc, power);
}

} // namespace mmce
