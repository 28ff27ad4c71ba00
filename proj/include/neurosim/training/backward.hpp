// SPDX-License-Identifier: Apache-2.0
//
// Backpropagation through the T-step unrolled network.
//
// The Heaviside spike is replaced in the backward pass by a rectangular
// surrogate, dS/dv = 1/(2w) for |v - theta| < w and 0 otherwise. The reset
// factor is detached: in reset_to_zero mode dv[t+1]/dv[t] = beta * (1 - s[t])
// with s[t] held constant, in subtract_threshold mode it is beta.

#ifndef NEUROSIM_TRAINING_BACKWARD_HPP
#define NEUROSIM_TRAINING_BACKWARD_HPP

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "neurosim/error.hpp"
#include "neurosim/snn/forward.hpp"
#include "neurosim/snn/network.hpp"
#include "neurosim/tensor.hpp"
#include "neurosim/training/loss.hpp"

namespace neurosim::training {

struct SurrogateParams {
    double width = 0.5;

    [[nodiscard]] double derivative(double v, double theta) const noexcept {
        return std::abs(v - theta) < width ? 1.0 / (2.0 * width) : 0.0;
    }

    void validate() const {
        if (!(width > 0.0)) {
            throw ConfigError("surrogate width must be positive");
        }
    }
};

struct GradientResult {
    double loss = 0.0;
    snn::WeightSet grads;
    Tensor logits;
};

namespace detail {

// Accumulates weight/bias gradients of a convolution and, when grad_input is
// non-null, the gradient with respect to its input. Zero entries of grad_out
// are skipped; spiking networks produce many.
inline void conv2d_backward(const Tensor& input, const Tensor& weights, const Tensor& grad_out,
                            const snn::Conv2dLayer& spec, snn::LayerWeights& grads, Tensor* grad_input) {
    const std::size_t c_in = spec.in_channels;
    const std::size_t h = input.dim(1);
    const std::size_t w = input.dim(2);
    const std::size_t k = spec.kernel;
    const std::size_t oh = grad_out.dim(1);
    const std::size_t ow = grad_out.dim(2);
    const auto pad = static_cast<std::ptrdiff_t>(spec.padding);
    const double* in = input.data().data();
    const double* wt = weights.data().data();
    double* gw = grads.weight.data().data();
    double* gi = grad_input != nullptr ? grad_input->data().data() : nullptr;

    for (std::size_t oc = 0; oc < spec.out_channels; ++oc) {
        for (std::size_t oy = 0; oy < oh; ++oy) {
            for (std::size_t ox = 0; ox < ow; ++ox) {
                const double g = grad_out[(oc * oh + oy) * ow + ox];
                if (g == 0.0) {
                    continue;
                }
                grads.bias[oc] += g;
                const std::ptrdiff_t y0 = static_cast<std::ptrdiff_t>(oy * spec.stride) - pad;
                const std::ptrdiff_t x0 = static_cast<std::ptrdiff_t>(ox * spec.stride) - pad;
                for (std::size_t c = 0; c < c_in; ++c) {
                    const std::size_t wbase = (oc * c_in + c) * k * k;
                    const std::size_t ibase = c * h * w;
                    for (std::size_t ky = 0; ky < k; ++ky) {
                        const std::ptrdiff_t iy = y0 + static_cast<std::ptrdiff_t>(ky);
                        if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(h)) {
                            continue;
                        }
                        for (std::size_t kx = 0; kx < k; ++kx) {
                            const std::ptrdiff_t ix = x0 + static_cast<std::ptrdiff_t>(kx);
                            if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(w)) {
                                continue;
                            }
                            const std::size_t ii = ibase + static_cast<std::size_t>(iy) * w + static_cast<std::size_t>(ix);
                            gw[wbase + ky * k + kx] += g * in[ii];
                            if (gi != nullptr) {
                                gi[ii] += g * wt[wbase + ky * k + kx];
                            }
                        }
                    }
                }
            }
        }
    }
}

inline void linear_backward(const Tensor& input, const Tensor& weights, const Tensor& grad_out,
                            snn::LayerWeights& grads, Tensor* grad_input) {
    const std::size_t m = weights.dim(0);
    const std::size_t n = weights.dim(1);
    const double* x = input.data().data();
    for (std::size_t i = 0; i < m; ++i) {
        const double g = grad_out[i];
        if (g == 0.0) {
            continue;
        }
        grads.bias[i] += g;
        double* gw = grads.weight.data().data() + i * n;
        const double* row = weights.data().data() + i * n;
        for (std::size_t j = 0; j < n; ++j) {
            gw[j] += g * x[j];
        }
        if (grad_input != nullptr) {
            double* gi = grad_input->data().data();
            for (std::size_t j = 0; j < n; ++j) {
                gi[j] += g * row[j];
            }
        }
    }
}

} // namespace detail

/// Loss and parameter gradients for one sample.
inline GradientResult backward(const snn::NetworkSpec& spec, const snn::WeightSet& weights, const Tensor& input,
                               std::size_t label, const SurrogateParams& surrogate = {},
                               const snn::ForwardOptions& options = {}) {
    surrogate.validate();
    snn::ForwardTrace trace;
    const snn::ForwardResult fwd = snn::detail::run_forward(spec, weights, input, options, &trace);
    LossResult loss = cross_entropy(fwd.logits, label);

    GradientResult result;
    result.loss = loss.loss;
    result.logits = fwd.logits;
    result.grads = snn::zero_weights(spec);

    const std::size_t n_layers = spec.layers.size();
    const std::size_t steps = spec.timesteps;
    const double inv_steps = 1.0 / static_cast<double>(steps);

    // dL/dv[t+1] carried backwards in time for every LIF layer
    std::vector<std::optional<Tensor>> carry(n_layers);

    for (std::size_t t = steps; t-- > 0;) {
        Tensor grad({spec.num_classes});
        for (std::size_t k = 0; k < spec.num_classes; ++k) {
            grad[k] = loss.dlogits[k] * inv_steps;
        }
        for (std::size_t l = n_layers; l-- > 0;) {
            const snn::LayerSpec& layer = spec.layers[l];
            const Tensor& layer_input = trace.layer_inputs[t][l];
            const bool need_input_grad = l > 0;
            if (const auto* conv = std::get_if<snn::Conv2dLayer>(&layer)) {
                Tensor grad_in = need_input_grad ? Tensor(layer_input.shape()) : Tensor();
                detail::conv2d_backward(layer_input, weights.layers.at(l).weight, grad, *conv,
                                        result.grads.layers.at(l), need_input_grad ? &grad_in : nullptr);
                grad = std::move(grad_in);
            } else if (std::holds_alternative<snn::LinearLayer>(layer)) {
                Tensor grad_in = need_input_grad ? Tensor(layer_input.shape()) : Tensor();
                detail::linear_backward(layer_input, weights.layers.at(l).weight, grad, result.grads.layers.at(l),
                                        need_input_grad ? &grad_in : nullptr);
                grad = std::move(grad_in);
            } else if (std::holds_alternative<snn::FlattenLayer>(layer)) {
                grad = grad.reshaped(layer_input.shape());
            } else if (!options.bypass_lif) {
                const snn::LifParams& p = std::get<snn::LifLayer>(layer).params;
                const Tensor& v = trace.membrane[t][l];
                const Tensor& s = trace.spikes[t][l];
                Tensor grad_v(v.shape());
                const Tensor* next = carry[l] ? &*carry[l] : nullptr;
                for (std::size_t i = 0; i < v.size(); ++i) {
                    double g = surrogate.derivative(v[i], p.theta) * grad[i];
                    if (next != nullptr) {
                        const double decay = p.reset == snn::ResetMode::reset_to_zero ? p.beta * (1.0 - s[i]) : p.beta;
                        g += decay * (*next)[i];
                    }
                    grad_v[i] = g;
                }
                carry[l] = grad_v;
                grad = std::move(grad_v);
            }
        }
    }
    return result;
}

struct BatchGradient {
    double mean_loss = 0.0;
    snn::WeightSet grads;       // mean over the batch
    std::vector<Tensor> logits; // per sample, batch order
};

/// Mean loss and gradient over a batch. Per-sample gradients may be computed
/// on up to `threads` workers; they are always reduced in sample order, so
/// the result does not depend on the thread count.
inline BatchGradient batch_backward(const snn::NetworkSpec& spec, const snn::WeightSet& weights,
                                    std::span<const Tensor* const> inputs, std::span<const std::size_t> labels,
                                    const SurrogateParams& surrogate = {}, std::size_t threads = 1,
                                    const snn::ForwardOptions& options = {}) {
    require(inputs.size() == labels.size(), "batch inputs and labels differ in length");
    require(!inputs.empty(), "batch must not be empty");
    const std::size_t n = inputs.size();
    std::vector<GradientResult> per_sample(n);
    auto work = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t i = begin; i < n; i += stride) {
            per_sample[i] = backward(spec, weights, *inputs[i], labels[i], surrogate, options);
        }
    };
    threads = std::max<std::size_t>(1, std::min(threads, n));
    if (threads == 1) {
        work(0, 1);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t tid = 0; tid < threads; ++tid) {
            pool.emplace_back(work, tid, threads);
        }
    }

    BatchGradient out;
    out.grads = snn::zero_weights(spec);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.mean_loss += per_sample[i].loss;
        for (auto& [index, lw] : out.grads.layers) {
            const auto& src = per_sample[i].grads.layers.at(index);
            for (std::size_t j = 0; j < lw.weight.size(); ++j) {
                lw.weight[j] += src.weight[j];
            }
            for (std::size_t j = 0; j < lw.bias.size(); ++j) {
                lw.bias[j] += src.bias[j];
            }
        }
        out.logits.push_back(std::move(per_sample[i].logits));
    }
    out.mean_loss *= inv_n;
    for (auto& [index, lw] : out.grads.layers) {
        for (auto& g : lw.weight.values()) {
            g *= inv_n;
        }
        for (auto& g : lw.bias.values()) {
            g *= inv_n;
        }
    }
    return out;
}

} // namespace neurosim::training

#endif // NEUROSIM_TRAINING_BACKWARD_HPP
