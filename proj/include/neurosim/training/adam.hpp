// SPDX-License-Identifier: Apache-2.0

#ifndef NEUROSIM_TRAINING_ADAM_HPP
#define NEUROSIM_TRAINING_ADAM_HPP

#include <cmath>
#include <cstdint>

#include "neurosim/error.hpp"
#include "neurosim/snn/network.hpp"

namespace neurosim::training {

struct AdamState {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    snn::WeightSet m; // first moments, shaped like the weights
    snn::WeightSet v; // second moments
    std::uint64_t t = 0;

    /// Fresh state with zero moments mirroring `weights`.
    static AdamState for_weights(const snn::WeightSet& weights, double lr = 1e-3) {
        AdamState state;
        state.lr = lr;
        for (const auto& [index, lw] : weights.layers) {
            state.m.layers.emplace(index, snn::LayerWeights{Tensor(lw.weight.shape()), Tensor(lw.bias.shape())});
        }
        state.v = state.m;
        return state;
    }
};

namespace detail {

inline void adam_tensor(Tensor& w, const Tensor& g, Tensor& m, Tensor& v, const AdamState& s, double c1, double c2) {
    require_same_shape(w, g, "adam gradient");
    require_same_shape(w, m, "adam first moment");
    require_same_shape(w, v, "adam second moment");
    for (std::size_t i = 0; i < w.size(); ++i) {
        m[i] = s.beta1 * m[i] + (1.0 - s.beta1) * g[i];
        v[i] = s.beta2 * v[i] + (1.0 - s.beta2) * g[i] * g[i];
        const double m_hat = m[i] / c1;
        const double v_hat = v[i] / c2;
        w[i] -= s.lr * m_hat / (std::sqrt(v_hat) + s.eps);
    }
}

} // namespace detail

/// One bias-corrected Adam step, in place.
inline void adam_update(snn::WeightSet& weights, const snn::WeightSet& grads, AdamState& state) {
    require(weights.layers.size() == grads.layers.size() && weights.layers.size() == state.m.layers.size(),
            "adam: weights, gradients and moments cover different layers");
    state.t += 1;
    const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
    for (auto& [index, lw] : weights.layers) {
        const auto g = grads.layers.find(index);
        const auto m = state.m.layers.find(index);
        const auto v = state.v.layers.find(index);
        require(g != grads.layers.end() && m != state.m.layers.end() && v != state.v.layers.end(),
                "adam: missing layer " + std::to_string(index));
        detail::adam_tensor(lw.weight, g->second.weight, m->second.weight, v->second.weight, state, c1, c2);
        detail::adam_tensor(lw.bias, g->second.bias, m->second.bias, v->second.bias, state, c1, c2);
    }
}

} // namespace neurosim::training

#endif // NEUROSIM_TRAINING_ADAM_HPP
