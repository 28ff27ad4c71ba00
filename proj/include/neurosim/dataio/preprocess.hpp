// SPDX-License-Identifier: Apache-2.0

#ifndef NEUROSIM_DATAIO_PREPROCESS_HPP
#define NEUROSIM_DATAIO_PREPROCESS_HPP

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "neurosim/error.hpp"
#include "neurosim/tensor.hpp"

namespace neurosim::dataio {

struct PreprocessSpec {
    std::size_t target_h = 16;
    std::size_t target_w = 16;
    std::vector<double> mean{0.5};
    std::vector<double> std{0.5};

    /// Same mean/std on every channel.
    static PreprocessSpec uniform(std::size_t h, std::size_t w, std::size_t channels, double mean = 0.5,
                                  double stddev = 0.5) {
        return {h, w, std::vector<double>(channels, mean), std::vector<double>(channels, stddev)};
    }
};

/// Bilinear resize with half-pixel centres (align_corners = false). Source
/// coordinates below zero clamp to the first pixel, above the last to the
/// last pixel.
inline Tensor resize_bilinear(const Tensor& image, std::size_t target_h, std::size_t target_w) {
    require(image.rank() == 3, "resize expects a [C,H,W] image");
    require(target_h > 0 && target_w > 0, "resize target dimensions must be positive");
    const std::size_t c = image.dim(0);
    const std::size_t h = image.dim(1);
    const std::size_t w = image.dim(2);
    if (h == target_h && w == target_w) {
        return image;
    }

    struct Tap {
        std::size_t lo, hi;
        double frac;
    };
    auto taps = [](std::size_t in, std::size_t out) {
        std::vector<Tap> result(out);
        const double scale = static_cast<double>(in) / static_cast<double>(out);
        for (std::size_t o = 0; o < out; ++o) {
            double src = (static_cast<double>(o) + 0.5) * scale - 0.5;
            src = std::clamp(src, 0.0, static_cast<double>(in - 1));
            const auto lo = static_cast<std::size_t>(src);
            const std::size_t hi = std::min(lo + 1, in - 1);
            result[o] = {lo, hi, src - static_cast<double>(lo)};
        }
        return result;
    };
    const auto ty = taps(h, target_h);
    const auto tx = taps(w, target_w);

    Tensor out({c, target_h, target_w});
    for (std::size_t ch = 0; ch < c; ++ch) {
        for (std::size_t y = 0; y < target_h; ++y) {
            const auto& [y0, y1, fy] = ty[y];
            for (std::size_t x = 0; x < target_w; ++x) {
                const auto& [x0, x1, fx] = tx[x];
                const double top = image.at(ch, y0, x0) + fx * (image.at(ch, y0, x1) - image.at(ch, y0, x0));
                const double bottom = image.at(ch, y1, x0) + fx * (image.at(ch, y1, x1) - image.at(ch, y1, x0));
                out.at(ch, y, x) = top + fy * (bottom - top);
            }
        }
    }
    return out;
}

/// (x - mean_c) / std_c per channel.
inline Tensor normalize(const Tensor& image, const PreprocessSpec& spec) {
    require(image.rank() == 3, "normalize expects a [C,H,W] image");
    const std::size_t c = image.dim(0);
    if (spec.mean.size() != c || spec.std.size() != c) {
        throw ConfigError("normalize: image has " + std::to_string(c) + " channels but preprocessing defines " +
                          std::to_string(spec.mean.size()) + " means and " + std::to_string(spec.std.size()) +
                          " standard deviations");
    }
    for (double s : spec.std) {
        if (!(s > 0.0)) {
            throw ConfigError("normalize: standard deviations must be positive");
        }
    }
    Tensor out = image;
    const std::size_t plane = image.dim(1) * image.dim(2);
    for (std::size_t ch = 0; ch < c; ++ch) {
        for (std::size_t i = 0; i < plane; ++i) {
            double& v = out[ch * plane + i];
            v = (v - spec.mean[ch]) / spec.std[ch];
        }
    }
    return out;
}

inline Tensor preprocess(const Tensor& image, const PreprocessSpec& spec) {
    return normalize(resize_bilinear(image, spec.target_h, spec.target_w), spec);
}

} // namespace neurosim::dataio

#endif // NEUROSIM_DATAIO_PREPROCESS_HPP
