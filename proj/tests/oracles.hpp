// SPDX-License-Identifier: Apache-2.0
//
// Reference implementations used only by the tests. They favour the most
// literal formulation over speed and share no code with the library kernels.

#ifndef NEUROSIM_TESTS_ORACLES_HPP
#define NEUROSIM_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "neurosim/snn/network.hpp"
#include "neurosim/tensor.hpp"

namespace oracle {

using neurosim::Tensor;

/// Explicitly zero-padded copy of a [C,H,W] tensor.
inline std::vector<std::vector<std::vector<double>>> pad(const Tensor& x, std::size_t p) {
    const std::size_t c = x.dim(0), h = x.dim(1), w = x.dim(2);
    std::vector<std::vector<std::vector<double>>> out(c, std::vector<std::vector<double>>(
                                                             h + 2 * p, std::vector<double>(w + 2 * p, 0.0)));
    for (std::size_t ch = 0; ch < c; ++ch)
        for (std::size_t y = 0; y < h; ++y)
            for (std::size_t xx = 0; xx < w; ++xx) out[ch][y + p][xx + p] = x.at(ch, y, xx);
    return out;
}

/// Direct convolution over a padded copy. `macs` counts every multiply-add;
/// `magnitude` receives |b| + sum |w * x| per output, the scale of its rounding error.
inline Tensor conv2d(const Tensor& x, const Tensor& wt, const Tensor& b, const neurosim::snn::Conv2dLayer& spec,
                     std::uint64_t* macs = nullptr, Tensor* magnitude = nullptr) {
    const auto xp = pad(x, spec.padding);
    const std::size_t hp = xp[0].size(), wp = xp[0][0].size();
    const std::size_t oh = (hp - spec.kernel) / spec.stride + 1;
    const std::size_t ow = (wp - spec.kernel) / spec.stride + 1;
    Tensor out({spec.out_channels, oh, ow});
    if (magnitude != nullptr) *magnitude = Tensor(out.shape());
    for (std::size_t oc = 0; oc < spec.out_channels; ++oc) {
        for (std::size_t oy = 0; oy < oh; ++oy) {
            for (std::size_t ox = 0; ox < ow; ++ox) {
                double acc = b[oc];
                double mag = std::abs(b[oc]);
                for (std::size_t ic = 0; ic < spec.in_channels; ++ic) {
                    for (std::size_t ky = 0; ky < spec.kernel; ++ky) {
                        for (std::size_t kx = 0; kx < spec.kernel; ++kx) {
                            const std::size_t widx =
                                ((oc * spec.in_channels + ic) * spec.kernel + ky) * spec.kernel + kx;
                            const double term = wt[widx] * xp[ic][oy * spec.stride + ky][ox * spec.stride + kx];
                            acc += term;
                            mag += std::abs(term);
                            if (macs != nullptr) ++*macs;
                        }
                    }
                }
                out.at(oc, oy, ox) = acc;
                if (magnitude != nullptr) magnitude->at(oc, oy, ox) = mag;
            }
        }
    }
    return out;
}

inline Tensor linear(const Tensor& x, const Tensor& wt, const Tensor& b, std::uint64_t* macs = nullptr,
                     Tensor* magnitude = nullptr) {
    const std::size_t m = wt.dim(0), n = wt.dim(1);
    Tensor out({m});
    if (magnitude != nullptr) *magnitude = Tensor({m});
    for (std::size_t i = 0; i < m; ++i) {
        double acc = b[i];
        double mag = std::abs(b[i]);
        for (std::size_t j = 0; j < n; ++j) {
            acc += wt[i * n + j] * x[j];
            mag += std::abs(wt[i * n + j] * x[j]);
            if (macs != nullptr) ++*macs;
        }
        out[i] = acc;
        if (magnitude != nullptr) (*magnitude)[i] = mag;
    }
    return out;
}

/// Runs one timestep of `spec` through the oracle kernels (LIF layers pass
/// their input through) and returns the number of multiply-adds executed.
inline std::uint64_t instrumented_macs(const neurosim::snn::NetworkSpec& spec,
                                       const neurosim::snn::WeightSet& weights) {
    using namespace neurosim::snn;
    std::uint64_t macs = 0;
    Tensor x(spec.input_tensor_shape(), 0.5);
    for (std::size_t l = 0; l < spec.layers.size(); ++l) {
        const auto& layer = spec.layers[l];
        if (const auto* c = std::get_if<Conv2dLayer>(&layer)) {
            x = conv2d(x, weights.layers.at(l).weight, weights.layers.at(l).bias, *c, &macs);
        } else if (std::holds_alternative<LinearLayer>(layer)) {
            x = linear(x, weights.layers.at(l).weight, weights.layers.at(l).bias, &macs);
        } else if (std::holds_alternative<FlattenLayer>(layer)) {
            x = x.reshaped({x.size()});
        }
    }
    return macs;
}

/// Random valid spec: conv/lif blocks, flatten, optional hidden linear/lif, linear readout.
inline neurosim::snn::NetworkSpec random_spec(std::mt19937_64& gen, std::size_t max_hw = 10) {
    using namespace neurosim::snn;
    auto pick = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(gen); };
    NetworkSpec spec;
    spec.name = "random";
    spec.timesteps = pick(1, 6);
    std::size_t c = pick(1, 3), h = pick(3, max_hw), w = pick(3, max_hw);
    spec.input_shape = {c, h, w};
    const std::size_t convs = pick(0, 2);
    for (std::size_t i = 0; i < convs; ++i) {
        const std::size_t k = pick(1, std::min<std::size_t>(3, std::min(h, w)));
        const std::size_t s = pick(1, 2);
        const std::size_t p = pick(0, k / 2);
        const std::size_t oc = pick(1, 4);
        spec.layers.emplace_back(Conv2dLayer{c, oc, k, s, p});
        spec.layers.emplace_back(LifLayer{});
        c = oc;
        h = conv_out_dim(h, k, s, p);
        w = conv_out_dim(w, k, s, p);
    }
    spec.layers.emplace_back(FlattenLayer{});
    std::size_t features = c * h * w;
    if (pick(0, 1) == 1) {
        const std::size_t hidden = pick(2, 8);
        spec.layers.emplace_back(LinearLayer{features, hidden});
        spec.layers.emplace_back(LifLayer{});
        features = hidden;
    }
    spec.num_classes = pick(2, 5);
    spec.layers.emplace_back(LinearLayer{features, spec.num_classes});
    return spec;
}

/// CRC-8, polynomial 0x07, init 0, one bit at a time, MSB first.
inline std::uint8_t crc8_bitwise(const std::vector<std::uint8_t>& bytes) {
    std::uint8_t crc = 0;
    for (std::uint8_t byte : bytes) {
        for (int bit = 7; bit >= 0; --bit) {
            const bool in = ((byte >> bit) & 1U) != 0;
            const bool top = (crc & 0x80U) != 0;
            crc = static_cast<std::uint8_t>(crc << 1);
            if (in != top) crc ^= 0x07;
        }
    }
    return crc;
}

/// |a - b| relative to `scale` (the summed term magnitudes for dot products).
inline double rel_err(double a, double b, double scale) {
    return scale == 0.0 ? std::abs(a - b) : std::abs(a - b) / scale;
}

inline double rel_err(double a, double b) { return rel_err(a, b, std::max(std::abs(a), std::abs(b))); }

inline Tensor random_tensor(neurosim::Shape shape, std::mt19937_64& gen, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> d(lo, hi);
    Tensor t(std::move(shape));
    for (auto& v : t.values()) v = d(gen);
    return t;
}

} // namespace oracle

#endif // NEUROSIM_TESTS_ORACLES_HPP
