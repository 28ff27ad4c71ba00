// SPDX-License-Identifier: Apache-2.0
//
// Per-layer forward kernels of the spiking network: leaky integrate-and-fire
// dynamics, 2-D cross-correlation and the dense readout.

#ifndef NEUROSIM_SNN_LAYERS_HPP
#define NEUROSIM_SNN_LAYERS_HPP

#include <cstddef>
#include <string>
#include <utility>
#include <variant>

#include "neurosim/error.hpp"
#include "neurosim/tensor.hpp"

namespace neurosim::snn {

enum class ResetMode { reset_to_zero, subtract_threshold };

struct LifParams {
    double beta = 0.9;   // leak factor, (0, 1)
    double theta = 1.0;  // firing threshold, > 0
    ResetMode reset = ResetMode::reset_to_zero;

    void validate() const {
        if (!(beta > 0.0 && beta < 1.0)) {
            throw ConfigError("lif beta must lie in (0,1), got " + std::to_string(beta));
        }
        if (!(theta > 0.0)) {
            throw ConfigError("lif theta must be positive, got " + std::to_string(theta));
        }
    }

    friend bool operator==(const LifParams&, const LifParams&) = default;
};

/// Membrane potentials and the spikes emitted on the previous step.
struct LifState {
    Tensor v;
    Tensor s_prev;

    static LifState zeros(const Shape& shape) { return {Tensor(shape), Tensor(shape)}; }
};

struct Conv2dLayer {
    std::size_t in_channels = 1;
    std::size_t out_channels = 1;
    std::size_t kernel = 3;
    std::size_t stride = 1;
    std::size_t padding = 0;
    friend bool operator==(const Conv2dLayer&, const Conv2dLayer&) = default;
};

struct LifLayer {
    LifParams params;
    friend bool operator==(const LifLayer&, const LifLayer&) = default;
};

struct FlattenLayer {
    friend bool operator==(const FlattenLayer&, const FlattenLayer&) = default;
};

struct LinearLayer {
    std::size_t in_features = 1;
    std::size_t out_features = 1;
    friend bool operator==(const LinearLayer&, const LinearLayer&) = default;
};

using LayerSpec = std::variant<Conv2dLayer, LifLayer, FlattenLayer, LinearLayer>;

inline const char* layer_kind_name(const LayerSpec& layer) {
    static constexpr const char* names[] = {"conv2d", "lif", "flatten", "linear"};
    return names[layer.index()];
}

inline bool has_parameters(const LayerSpec& layer) {
    return std::holds_alternative<Conv2dLayer>(layer) || std::holds_alternative<LinearLayer>(layer);
}

/// Output extent of a convolution along one axis.
inline std::size_t conv_out_dim(std::size_t in, std::size_t kernel, std::size_t stride, std::size_t padding) {
    require(stride >= 1, "conv2d stride must be >= 1");
    require(kernel >= 1, "conv2d kernel must be >= 1");
    require(kernel <= in + 2 * padding, "conv2d kernel " + std::to_string(kernel) +
                                            " larger than padded input " + std::to_string(in + 2 * padding));
    return (in + 2 * padding - kernel) / stride + 1;
}

/// One discrete LIF step. Returns the new state; the emitted spikes are the
/// new state's s_prev.
///
///   reset_to_zero:      v' = beta * v * (1 - s_prev) + I
///   subtract_threshold: v' = beta * (v - theta * s_prev) + I
///   s = [v' >= theta]
inline LifState lif_step(const LifState& state, const Tensor& input_current, const LifParams& params) {
    require_same_shape(state.v, state.s_prev, "lif_step state");
    require_same_shape(state.v, input_current, "lif_step input");
    LifState next{Tensor(state.v.shape()), Tensor(state.v.shape())};
    const std::size_t n = input_current.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double v = state.v[i];
        const double s = state.s_prev[i];
        const double carried = params.reset == ResetMode::reset_to_zero ? params.beta * v * (1.0 - s)
                                                                         : params.beta * (v - params.theta * s);
        const double v_new = carried + input_current[i];
        next.v[i] = v_new;
        next.s_prev[i] = v_new >= params.theta ? 1.0 : 0.0;
    }
    return next;
}

inline Tensor conv2d_forward(const Tensor& input, const Tensor& weights, const Tensor& bias, const Conv2dLayer& spec) {
    require(input.rank() == 3, "conv2d input must be [C,H,W], got " + shape_to_string(input.shape()));
    require(input.dim(0) == spec.in_channels, "conv2d input channels " + std::to_string(input.dim(0)) +
                                                  " != layer in_channels " + std::to_string(spec.in_channels));
    const Shape wshape{spec.out_channels, spec.in_channels, spec.kernel, spec.kernel};
    require(weights.shape() == wshape, "conv2d weights shape " + shape_to_string(weights.shape()) +
                                           " expected " + shape_to_string(wshape));
    require(bias.shape() == Shape{spec.out_channels}, "conv2d bias shape mismatch");

    const std::size_t c_in = spec.in_channels;
    const std::size_t h = input.dim(1);
    const std::size_t w = input.dim(2);
    const std::size_t k = spec.kernel;
    const std::size_t stride = spec.stride;
    const auto pad = static_cast<std::ptrdiff_t>(spec.padding);
    const std::size_t oh = conv_out_dim(h, k, stride, spec.padding);
    const std::size_t ow = conv_out_dim(w, k, stride, spec.padding);

    Tensor out({spec.out_channels, oh, ow});
    const double* in = input.data().data();
    const double* wt = weights.data().data();
    double* o = out.data().data();
    for (std::size_t oc = 0; oc < spec.out_channels; ++oc) {
        for (std::size_t oy = 0; oy < oh; ++oy) {
            for (std::size_t ox = 0; ox < ow; ++ox) {
                double acc = 0.0;
                const std::ptrdiff_t y0 = static_cast<std::ptrdiff_t>(oy * stride) - pad;
                const std::ptrdiff_t x0 = static_cast<std::ptrdiff_t>(ox * stride) - pad;
                for (std::size_t c = 0; c < c_in; ++c) {
                    const double* wk = wt + (oc * c_in + c) * k * k;
                    const double* ic = in + c * h * w;
                    for (std::size_t ky = 0; ky < k; ++ky) {
                        const std::ptrdiff_t iy = y0 + static_cast<std::ptrdiff_t>(ky);
                        if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(h)) {
                            continue;
                        }
                        const double* row = ic + static_cast<std::size_t>(iy) * w;
                        for (std::size_t kx = 0; kx < k; ++kx) {
                            const std::ptrdiff_t ix = x0 + static_cast<std::ptrdiff_t>(kx);
                            if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(w)) {
                                continue;
                            }
                            acc += wk[ky * k + kx] * row[ix];
                        }
                    }
                }
                o[(oc * oh + oy) * ow + ox] = acc + bias[oc];
            }
        }
    }
    return out;
}

inline Tensor linear_forward(const Tensor& input, const Tensor& weights, const Tensor& bias) {
    require(input.rank() == 1, "linear input must be rank 1, got " + shape_to_string(input.shape()));
    require(weights.rank() == 2, "linear weights must be rank 2");
    const std::size_t m = weights.dim(0);
    const std::size_t n = weights.dim(1);
    require(input.dim(0) == n, "linear input length " + std::to_string(input.dim(0)) + " != in_features " +
                                   std::to_string(n));
    require(bias.shape() == Shape{m}, "linear bias shape mismatch");

    Tensor out({m});
    const double* x = input.data().data();
    for (std::size_t i = 0; i < m; ++i) {
        const double* row = weights.data().data() + i * n;
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            acc += row[j] * x[j];
        }
        out[i] = acc + bias[i];
    }
    return out;
}

} // namespace neurosim::snn

#endif // NEUROSIM_SNN_LAYERS_HPP
