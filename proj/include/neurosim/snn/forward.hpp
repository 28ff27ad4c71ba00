// SPDX-License-Identifier: Apache-2.0
//
// Timestep loop of the spiking network. The static input is injected as
// current at every step (direct coding); LIF layers start from zero state;
// the final linear layer is a non-spiking readout whose output is averaged
// over the T steps to form the logits.

#ifndef NEUROSIM_SNN_FORWARD_HPP
#define NEUROSIM_SNN_FORWARD_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include "neurosim/error.hpp"
#include "neurosim/snn/layers.hpp"
#include "neurosim/snn/network.hpp"
#include "neurosim/tensor.hpp"

namespace neurosim::snn {

struct ForwardOptions {
    /// Treat every LIF layer as the identity (spike = input current). Used to
    /// check gradients on the smooth part of a network.
    bool bypass_lif = false;
};

struct ForwardResult {
    Tensor logits;
    /// Total spikes emitted by each LIF layer, in layer order.
    std::vector<std::size_t> spike_counts;
};

/// Activations recorded for backpropagation through time, indexed
/// [timestep][layer].
struct ForwardTrace {
    std::vector<std::vector<Tensor>> layer_inputs;
    std::vector<std::vector<Tensor>> membrane; // LIF layers only, post-update v
    std::vector<std::vector<Tensor>> spikes;   // LIF layers only
};

namespace detail {

inline ForwardResult run_forward(const NetworkSpec& spec, const WeightSet& weights, const Tensor& input,
                                 const ForwardOptions& options, ForwardTrace* trace) {
    check_weights(spec, weights);
    if (input.shape() != spec.input_tensor_shape()) {
        throw ContractViolation("network '" + spec.name + "' expects input " +
                                shape_to_string(spec.input_tensor_shape()) + ", got " +
                                shape_to_string(input.shape()));
    }
    const std::vector<Shape> shapes = layer_output_shapes(spec);
    const std::size_t n_layers = spec.layers.size();
    const std::size_t steps = spec.timesteps;

    std::vector<std::optional<LifState>> states(n_layers);
    std::vector<std::size_t> lif_counts(n_layers, 0);
    for (std::size_t l = 0; l < n_layers; ++l) {
        if (std::holds_alternative<LifLayer>(spec.layers[l])) {
            states[l] = LifState::zeros(shapes[l]);
        }
    }
    if (trace != nullptr) {
        trace->layer_inputs.assign(steps, std::vector<Tensor>(n_layers));
        trace->membrane.assign(steps, std::vector<Tensor>(n_layers));
        trace->spikes.assign(steps, std::vector<Tensor>(n_layers));
    }

    Tensor accumulated({spec.num_classes});
    for (std::size_t t = 0; t < steps; ++t) {
        Tensor x = input;
        for (std::size_t l = 0; l < n_layers; ++l) {
            if (trace != nullptr) {
                trace->layer_inputs[t][l] = x;
            }
            const LayerSpec& layer = spec.layers[l];
            if (const auto* conv = std::get_if<Conv2dLayer>(&layer)) {
                const LayerWeights& lw = weights.layers.at(l);
                x = conv2d_forward(x, lw.weight, lw.bias, *conv);
            } else if (const auto* lif = std::get_if<LifLayer>(&layer)) {
                if (options.bypass_lif) {
                    continue;
                }
                *states[l] = lif_step(*states[l], x, lif->params);
                x = states[l]->s_prev;
                for (double s : x.values()) {
                    lif_counts[l] += s != 0.0 ? 1 : 0;
                }
                if (trace != nullptr) {
                    trace->membrane[t][l] = states[l]->v;
                    trace->spikes[t][l] = x;
                }
            } else if (std::holds_alternative<FlattenLayer>(layer)) {
                x = x.reshaped({x.size()});
            } else {
                const LayerWeights& lw = weights.layers.at(l);
                x = linear_forward(x, lw.weight, lw.bias);
            }
        }
        for (std::size_t k = 0; k < spec.num_classes; ++k) {
            accumulated[k] += x[k];
        }
    }

    ForwardResult result;
    result.logits = Tensor({spec.num_classes});
    for (std::size_t k = 0; k < spec.num_classes; ++k) {
        result.logits[k] = accumulated[k] / static_cast<double>(steps);
    }
    for (std::size_t l = 0; l < n_layers; ++l) {
        if (std::holds_alternative<LifLayer>(spec.layers[l])) {
            result.spike_counts.push_back(lif_counts[l]);
        }
    }
    return result;
}

} // namespace detail

inline ForwardResult network_forward(const NetworkSpec& spec, const WeightSet& weights, const Tensor& input,
                                     const ForwardOptions& options = {}) {
    return detail::run_forward(spec, weights, input, options, nullptr);
}

/// Class with the largest logit; ties go to the lowest index.
inline std::size_t predict_class(const Tensor& logits) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < logits.size(); ++k) {
        if (logits[k] > logits[best]) {
            best = k;
        }
    }
    return best;
}

} // namespace neurosim::snn

#endif // NEUROSIM_SNN_FORWARD_HPP
