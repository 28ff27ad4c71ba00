// SPDX-License-Identifier: Apache-2.0

#ifndef NEUROSIM_HW_MACS_HPP
#define NEUROSIM_HW_MACS_HPP

#include <cstdint>
#include <vector>

#include "neurosim/snn/network.hpp"

namespace neurosim::hw {

struct MacCount {
    std::vector<std::uint64_t> per_layer; // one entry per layer, one timestep
    std::uint64_t total_macs = 0;         // per timestep
    std::uint64_t timesteps = 1;

    /// Multiply-accumulates of a full T-step inference, in units of 1e9.
    [[nodiscard]] double total_gop() const noexcept {
        return static_cast<double>(total_macs) * static_cast<double>(timesteps) / 1e9;
    }
};

/// conv2d: out_h * out_w * out_c * in_c * k^2; linear: in * out; lif and
/// flatten: 0.
inline MacCount count_macs(const snn::NetworkSpec& spec) {
    const auto shapes = snn::layer_output_shapes(spec);
    MacCount count;
    count.timesteps = spec.timesteps;
    for (std::size_t i = 0; i < spec.layers.size(); ++i) {
        std::uint64_t macs = 0;
        if (const auto* conv = std::get_if<snn::Conv2dLayer>(&spec.layers[i])) {
            macs = static_cast<std::uint64_t>(shapes[i][1]) * shapes[i][2] * conv->out_channels * conv->in_channels *
                   conv->kernel * conv->kernel;
        } else if (const auto* lin = std::get_if<snn::LinearLayer>(&spec.layers[i])) {
            macs = static_cast<std::uint64_t>(lin->in_features) * lin->out_features;
        }
        count.per_layer.push_back(macs);
        count.total_macs += macs;
    }
    return count;
}

/// Trainable parameters (weights and biases).
inline std::uint64_t parameter_count(const snn::NetworkSpec& spec) {
    snn::validate(spec);
    std::uint64_t n = 0;
    for (const auto& layer : spec.layers) {
        if (snn::has_parameters(layer)) {
            n += shape_numel(snn::weight_shape(layer)) + shape_numel(snn::bias_shape(layer));
        }
    }
    return n;
}

/// Neurons carrying membrane state (outputs of LIF layers).
inline std::uint64_t state_count(const snn::NetworkSpec& spec) {
    const auto shapes = snn::layer_output_shapes(spec);
    std::uint64_t n = 0;
    for (std::size_t i = 0; i < spec.layers.size(); ++i) {
        if (std::holds_alternative<snn::LifLayer>(spec.layers[i])) {
            n += shape_numel(shapes[i]);
        }
    }
    return n;
}

/// Converter streams at the chip boundary: one per input channel (ADC) plus
/// one per class output (DAC).
inline std::uint64_t stream_count(const snn::NetworkSpec& spec) {
    return spec.input_shape[0] + spec.num_classes;
}

} // namespace neurosim::hw

#endif // NEUROSIM_HW_MACS_HPP
