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

#ifndef MMCE_QUANTIZER_HPP
#define MMCE_QUANTIZER_HPP

#include <Eigen/Dense>

namespace mmce {

/// Default full-scale range in per-component standard deviations, chosen
/// by an SQNR sweep for Gaussian inputs and then frozen.
double default_clip_scale(int bits);

/// Complex-valued ADC pair: a uniform mid-rise quantizer of `bits` bits on
/// each of the real and imaginary components, with a shared step derived
/// from the signal RMS. bits == kInfiniteBits disables quantization.
struct AdcSpec {
    static constexpr int kInfiniteBits = -1;

    int bits = kInfiniteBits;
    double clip_scale = 0.0; // 0 selects default_clip_scale(bits)

    static AdcSpec infinite() { return AdcSpec{}; }
    static AdcSpec finite(int bits, double clip_scale = 0.0) { return AdcSpec{bits, clip_scale}; }

    bool is_infinite() const { return bits == kInfiniteBits; }
    double effective_clip_scale() const {
        return clip_scale > 0.0 ? clip_scale : default_clip_scale(bits);
    }
};

/// Uniform mid-rise quantization of one real value:
/// step * (floor(x/step) + 1/2), clamped to the outermost of the 2^bits
/// levels. There is no zero level; exactly 0 maps to +step/2.
double quantize_real(double x, int bits, double step);

/// Step size giving a full-scale range of clip_scale standard deviations:
/// clip_scale * sqrt(power) / 2^(bits-1).
double auto_step(double signal_power_per_component, int bits, double clip_scale);

/// Quantize real and imaginary parts independently with a common step
/// from auto_step at the given per-component power. Infinite resolution
/// returns the input unchanged; zero power falls back to a unit default.
Eigen::VectorXcd quantize_complex_vector(const Eigen::VectorXcd &analog, const AdcSpec &adc,
                                         double power_per_component);

/// Same, with the per-component power estimated empirically from `analog`
/// itself.
Eigen::VectorXcd quantize_complex_vector(const Eigen::VectorXcd &analog, const AdcSpec &adc);

} // namespace mmce

#endif
