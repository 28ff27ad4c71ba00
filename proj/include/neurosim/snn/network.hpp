// SPDX-License-Identifier: Apache-2.0
//
// Declarative network description (NetworkSpec) and its parameter container
// (WeightSet). The two shipped instances are the binary BCU classifier and the
// ten-class FCU classifier.

#ifndef NEUROSIM_SNN_NETWORK_HPP
#define NEUROSIM_SNN_NETWORK_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "neurosim/error.hpp"
#include "neurosim/rng.hpp"
#include "neurosim/snn/layers.hpp"
#include "neurosim/tensor.hpp"

namespace neurosim::snn {

struct NetworkSpec {
    std::string name;
    std::vector<LayerSpec> layers;
    std::size_t timesteps = 8;
    std::array<std::size_t, 3> input_shape{1, 1, 1}; // (channels, height, width)
    std::size_t num_classes = 2;

    [[nodiscard]] Shape input_tensor_shape() const { return {input_shape[0], input_shape[1], input_shape[2]}; }

    friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

/// Output shape of every layer, in order. Validates the whole spec: positive
/// dimensions, chaining shapes and a final linear layer with num_classes
/// outputs. Throws ConfigError on the first violation.
inline std::vector<Shape> layer_output_shapes(const NetworkSpec& spec) {
    auto fail = [&](std::size_t index, const std::string& why) {
        throw ConfigError("network '" + spec.name + "' layer " + std::to_string(index) + ": " + why);
    };
    if (spec.timesteps == 0) {
        throw ConfigError("network '" + spec.name + "': timesteps must be positive");
    }
    if (spec.num_classes == 0) {
        throw ConfigError("network '" + spec.name + "': num_classes must be positive");
    }
    for (auto d : spec.input_shape) {
        if (d == 0) {
            throw ConfigError("network '" + spec.name + "': input_shape dimensions must be positive");
        }
    }
    if (spec.layers.empty()) {
        throw ConfigError("network '" + spec.name + "' has no layers");
    }

    std::vector<Shape> shapes;
    shapes.reserve(spec.layers.size());
    Shape current = spec.input_tensor_shape();
    for (std::size_t i = 0; i < spec.layers.size(); ++i) {
        const LayerSpec& layer = spec.layers[i];
        if (const auto* conv = std::get_if<Conv2dLayer>(&layer)) {
            if (conv->in_channels == 0 || conv->out_channels == 0 || conv->kernel == 0 || conv->stride == 0) {
                fail(i, "conv2d dimensions and stride must be positive");
            }
            if (current.size() != 3) {
                fail(i, "conv2d expects a [C,H,W] input, got " + shape_to_string(current));
            }
            if (current[0] != conv->in_channels) {
                fail(i, "conv2d in_channels " + std::to_string(conv->in_channels) + " but input has " +
                            std::to_string(current[0]) + " channels");
            }
            if (conv->kernel > current[1] + 2 * conv->padding || conv->kernel > current[2] + 2 * conv->padding) {
                fail(i, "conv2d kernel larger than padded input");
            }
            current = {conv->out_channels, conv_out_dim(current[1], conv->kernel, conv->stride, conv->padding),
                       conv_out_dim(current[2], conv->kernel, conv->stride, conv->padding)};
        } else if (const auto* lif = std::get_if<LifLayer>(&layer)) {
            try {
                lif->params.validate();
            } catch (const ConfigError& e) {
                fail(i, e.what());
            }
        } else if (std::holds_alternative<FlattenLayer>(layer)) {
            current = {shape_numel(current)};
        } else if (const auto* lin = std::get_if<LinearLayer>(&layer)) {
            if (lin->in_features == 0 || lin->out_features == 0) {
                fail(i, "linear dimensions must be positive");
            }
            if (current.size() != 1 || current[0] != lin->in_features) {
                fail(i, "linear in_features " + std::to_string(lin->in_features) + " but input is " +
                            shape_to_string(current));
            }
            current = {lin->out_features};
        }
        shapes.push_back(current);
    }
    const auto* last = std::get_if<LinearLayer>(&spec.layers.back());
    if (last == nullptr) {
        throw ConfigError("network '" + spec.name + "': last layer must be linear");
    }
    if (last->out_features != spec.num_classes) {
        throw ConfigError("network '" + spec.name + "': last layer has " + std::to_string(last->out_features) +
                          " outputs but num_classes is " + std::to_string(spec.num_classes));
    }
    return shapes;
}

inline void validate(const NetworkSpec& spec) { (void)layer_output_shapes(spec); }

/// conv2d(3->8,k3,s1,p1) -> lif -> conv2d(8->16,k3,s2,p1) -> lif -> flatten -> linear(->10)
inline NetworkSpec fcu_spec(std::size_t height = 16, std::size_t width = 16, std::size_t timesteps = 8) {
    NetworkSpec spec;
    spec.name = "fcu";
    spec.timesteps = timesteps;
    spec.input_shape = {3, height, width};
    spec.num_classes = 10;
    spec.layers = {Conv2dLayer{3, 8, 3, 1, 1}, LifLayer{}, Conv2dLayer{8, 16, 3, 2, 1}, LifLayer{}, FlattenLayer{}};
    const std::size_t oh = conv_out_dim(height, 3, 2, 1);
    const std::size_t ow = conv_out_dim(width, 3, 2, 1);
    spec.layers.emplace_back(LinearLayer{16 * oh * ow, 10});
    return spec;
}

/// conv2d(1->8,k3,s2,p1) -> lif -> flatten -> linear(->2)
inline NetworkSpec bcu_spec(std::size_t height = 16, std::size_t width = 16, std::size_t timesteps = 8) {
    NetworkSpec spec;
    spec.name = "bcu";
    spec.timesteps = timesteps;
    spec.input_shape = {1, height, width};
    spec.num_classes = 2;
    spec.layers = {Conv2dLayer{1, 8, 3, 2, 1}, LifLayer{}, FlattenLayer{}};
    const std::size_t oh = conv_out_dim(height, 3, 2, 1);
    const std::size_t ow = conv_out_dim(width, 3, 2, 1);
    spec.layers.emplace_back(LinearLayer{8 * oh * ow, 2});
    return spec;
}

struct LayerWeights {
    Tensor weight;
    Tensor bias;
    friend bool operator==(const LayerWeights&, const LayerWeights&) = default;
};

/// Parameters keyed by layer index; only conv2d and linear layers have entries.
struct WeightSet {
    std::map<std::size_t, LayerWeights> layers;

    [[nodiscard]] std::size_t parameter_count() const {
        std::size_t n = 0;
        for (const auto& [index, lw] : layers) {
            n += lw.weight.size() + lw.bias.size();
        }
        return n;
    }

    friend bool operator==(const WeightSet&, const WeightSet&) = default;
};

inline Shape weight_shape(const LayerSpec& layer) {
    if (const auto* conv = std::get_if<Conv2dLayer>(&layer)) {
        return {conv->out_channels, conv->in_channels, conv->kernel, conv->kernel};
    }
    const auto& lin = std::get<LinearLayer>(layer);
    return {lin.out_features, lin.in_features};
}

inline Shape bias_shape(const LayerSpec& layer) {
    if (const auto* conv = std::get_if<Conv2dLayer>(&layer)) {
        return {conv->out_channels};
    }
    return {std::get<LinearLayer>(layer).out_features};
}

inline WeightSet zero_weights(const NetworkSpec& spec) {
    validate(spec);
    WeightSet ws;
    for (std::size_t i = 0; i < spec.layers.size(); ++i) {
        if (has_parameters(spec.layers[i])) {
            ws.layers.emplace(i, LayerWeights{Tensor(weight_shape(spec.layers[i])), Tensor(bias_shape(spec.layers[i]))});
        }
    }
    return ws;
}

/// Glorot-uniform weights in +-sqrt(6/(fan_in+fan_out)), zero biases. Each
/// layer draws from its own SplitMix64 stream derived from (seed, layer index).
inline WeightSet init_weights(const NetworkSpec& spec, std::uint64_t seed) {
    WeightSet ws = zero_weights(spec);
    for (auto& [index, lw] : ws.layers) {
        const Shape& s = lw.weight.shape();
        const std::size_t receptive = s.size() == 4 ? s[2] * s[3] : 1;
        const double fan_in = static_cast<double>(s[1] * receptive);
        const double fan_out = static_cast<double>(s[0] * receptive);
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        SplitMix64 rng(derive_seed(seed, index));
        for (auto& w : lw.weight.values()) {
            w = rng.uniform(-limit, limit);
        }
    }
    return ws;
}

/// Throws ConfigError unless `weights` has exactly the tensors `spec` needs.
inline void check_weights(const NetworkSpec& spec, const WeightSet& weights) {
    validate(spec);
    std::size_t expected = 0;
    for (std::size_t i = 0; i < spec.layers.size(); ++i) {
        if (!has_parameters(spec.layers[i])) {
            continue;
        }
        ++expected;
        auto it = weights.layers.find(i);
        if (it == weights.layers.end()) {
            throw ConfigError("weight set has no parameters for layer " + std::to_string(i));
        }
        if (it->second.weight.shape() != weight_shape(spec.layers[i]) ||
            it->second.bias.shape() != bias_shape(spec.layers[i])) {
            throw ConfigError("weight set shapes for layer " + std::to_string(i) + " do not match the network");
        }
        if (!it->second.weight.all_finite() || !it->second.bias.all_finite()) {
            throw ConfigError("weight set for layer " + std::to_string(i) + " contains non-finite values");
        }
    }
    if (weights.layers.size() != expected) {
        throw ConfigError("weight set has parameters for layers the network does not define");
    }
}

} // namespace neurosim::snn

#endif // NEUROSIM_SNN_NETWORK_HPP
