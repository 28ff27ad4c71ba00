// SPDX-License-Identifier: Apache-2.0
//
// Uniform mid-tread converters.
//
//   ADC: code = clamp(round_half_away((v + noise - v_min) / (v_max - v_min) * (2^n - 1)), 0, 2^n - 1)
//   DAC: v    = v_min + code / (2^n - 1) * (v_max - v_min)
//
// Out-of-range inputs saturate. Noise is input-referred Gaussian; the draw for
// sample i comes from SplitMix64(derive_seed(seed, i)), so quantizing a
// sequence is a pure function of (model, values).

#ifndef NEUROSIM_MIXED_SIGNAL_CONVERTERS_HPP
#define NEUROSIM_MIXED_SIGNAL_CONVERTERS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "neurosim/error.hpp"
#include "neurosim/rng.hpp"

namespace neurosim::mixed_signal {

struct AdcModel {
    unsigned bits = 12;
    double v_min = -1.0;
    double v_max = 1.0;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;

    void validate() const {
        if (bits < 4 || bits > 16) {
            throw ConfigError("ADC resolution must be 4..16 bits, got " + std::to_string(bits));
        }
        if (!(v_min < v_max)) {
            throw ConfigError("ADC range requires v_min < v_max");
        }
        if (!(noise_sigma >= 0.0)) {
            throw ConfigError("ADC noise sigma must be nonnegative");
        }
    }

    [[nodiscard]] std::uint32_t max_code() const noexcept { return (1U << bits) - 1U; }
    [[nodiscard]] double lsb() const noexcept { return (v_max - v_min) / static_cast<double>(max_code()); }
};

struct DacModel {
    unsigned bits = 12;
    double v_min = -1.0;
    double v_max = 1.0;

    void validate() const {
        if (bits < 4 || bits > 16) {
            throw ConfigError("DAC resolution must be 4..16 bits, got " + std::to_string(bits));
        }
        if (!(v_min < v_max)) {
            throw ConfigError("DAC range requires v_min < v_max");
        }
    }

    [[nodiscard]] std::uint32_t max_code() const noexcept { return (1U << bits) - 1U; }
    [[nodiscard]] double lsb() const noexcept { return (v_max - v_min) / static_cast<double>(max_code()); }
};

/// Noise-free quantization of v onto an n-bit lattice spanning [v_min, v_max].
inline std::uint32_t quantize(double v, unsigned bits, double v_min, double v_max) {
    const double full = static_cast<double>((1U << bits) - 1U);
    const double scaled = (v - v_min) / (v_max - v_min) * full;
    if (std::isnan(scaled)) {
        throw ContractViolation("cannot quantize NaN");
    }
    // std::round rounds half away from zero
    const double code = std::clamp(std::round(scaled), 0.0, full);
    return static_cast<std::uint32_t>(code);
}

inline std::uint32_t adc_quantize(const AdcModel& model, double v, std::uint64_t sample_index = 0) {
    model.validate();
    double noise = 0.0;
    if (model.noise_sigma > 0.0) {
        SplitMix64 rng(derive_seed(model.seed, sample_index));
        noise = model.noise_sigma * rng.normal();
    }
    return quantize(v + noise, model.bits, model.v_min, model.v_max);
}

inline double dac_reconstruct(const DacModel& model, std::uint32_t code) {
    model.validate();
    require(code <= model.max_code(), "DAC code " + std::to_string(code) + " exceeds " +
                                          std::to_string(model.bits) + "-bit range");
    return model.v_min + static_cast<double>(code) / static_cast<double>(model.max_code()) * (model.v_max - model.v_min);
}

/// Reconstruction of an ADC code on the ADC's own lattice.
inline double adc_code_voltage(const AdcModel& model, std::uint32_t code) {
    return dac_reconstruct(DacModel{model.bits, model.v_min, model.v_max}, code);
}

} // namespace neurosim::mixed_signal

#endif // NEUROSIM_MIXED_SIGNAL_CONVERTERS_HPP
