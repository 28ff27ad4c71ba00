// SPDX-License-Identifier: Apache-2.0
//
// Synthetic Gaussian-blob datasets used as desk-scale stand-ins for the MRI
// (2 classes, grayscale) and CIFAR-style (10 classes, RGB) tasks.
//
// Class c is a blob of amplitude 0.8 over a 0.1 background, centred at a
// class-specific position with a class-specific radius; on RGB images each
// channel is scaled by a class-specific gain. Every pixel gets independent
// N(0, 0.05^2) noise and is clamped to [0, 1].

#ifndef NEUROSIM_DATAIO_SYNTH_HPP
#define NEUROSIM_DATAIO_SYNTH_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <string>

#include "neurosim/dataio/dataset.hpp"
#include "neurosim/dataio/pnm.hpp"
#include "neurosim/error.hpp"
#include "neurosim/rng.hpp"

namespace neurosim::dataio {

inline constexpr double kBlobNoiseSigma = 0.05;

struct BlobGeometry {
    double cy, cx; // centre, as a fraction of height/width
    double radius; // Gaussian sigma, as a fraction of min(H, W)
    std::array<double, 3> gain;
};

inline BlobGeometry blob_geometry(std::size_t cls, std::size_t classes) {
    if (classes == 2) {
        // opposite quadrants, different sizes
        return cls == 0 ? BlobGeometry{0.3, 0.3, 0.12, {1.0, 1.0, 1.0}}
                        : BlobGeometry{0.7, 0.7, 0.18, {1.0, 1.0, 1.0}};
    }
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(cls) / static_cast<double>(classes);
    BlobGeometry g{0.5 + 0.3 * std::sin(angle), 0.5 + 0.3 * std::cos(angle), 0.09 + 0.03 * static_cast<double>(cls % 3),
                   {}};
    for (std::size_t ch = 0; ch < 3; ++ch) {
        g.gain[ch] = 0.6 + 0.4 * std::cos(angle + 2.0 * std::numbers::pi * static_cast<double>(ch) / 3.0);
    }
    return g;
}

struct SynthResult {
    DatasetManifest manifest;
    Dataset dataset;
};

/// n_per_class samples per class, ordered class-major. image_shape is
/// (channels, height, width).
inline SynthResult synth_blobs(std::size_t n_per_class, std::size_t classes, std::array<std::size_t, 3> image_shape,
                               std::uint64_t seed) {
    if (classes != 2 && classes != 10) {
        throw ConfigError("synthetic blobs support 2 or 10 classes, got " + std::to_string(classes));
    }
    if (n_per_class == 0) {
        throw ConfigError("synthetic dataset would be empty (n = 0)");
    }
    const auto [channels, h, w] = image_shape;
    if (channels != 1 && channels != 3) {
        throw ConfigError("synthetic images must have 1 or 3 channels");
    }
    if (h == 0 || w == 0) {
        throw ConfigError("synthetic image dimensions must be positive");
    }

    SynthResult result;
    result.manifest.num_classes = classes;
    result.manifest.channels = channels;
    result.dataset.num_classes = classes;
    result.dataset.channels = channels;
    const char* ext = channels == 1 ? "pgm" : "ppm";
    const double scale = static_cast<double>(std::min(h, w));

    for (std::size_t cls = 0; cls < classes; ++cls) {
        const BlobGeometry g = blob_geometry(cls, classes);
        const double cy = g.cy * static_cast<double>(h);
        const double cx = g.cx * static_cast<double>(w);
        const double sigma = g.radius * scale;
        for (std::size_t i = 0; i < n_per_class; ++i) {
            SplitMix64 rng(derive_seed(seed, cls * 1'000'003ULL + i));
            Tensor image({channels, h, w});
            for (std::size_t ch = 0; ch < channels; ++ch) {
                for (std::size_t y = 0; y < h; ++y) {
                    for (std::size_t x = 0; x < w; ++x) {
                        const double dy = static_cast<double>(y) + 0.5 - cy;
                        const double dx = static_cast<double>(x) + 0.5 - cx;
                        const double blob = std::exp(-(dy * dy + dx * dx) / (2.0 * sigma * sigma));
                        const double v = 0.1 + 0.8 * g.gain[ch] * blob + kBlobNoiseSigma * rng.normal();
                        image.at(ch, y, x) = std::clamp(v, 0.0, 1.0);
                    }
                }
            }
            char name[64];
            std::snprintf(name, sizeof(name), "class%zu/img_%05zu.%s", cls, i, ext);
            result.manifest.entries.push_back({name, cls});
            result.dataset.samples.push_back({std::move(image), cls});
        }
    }
    return result;
}

/// Writes the images and manifest.csv under `dir`.
inline void write_dataset(const std::filesystem::path& dir, SynthResult& synth) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create dataset directory " + dir.string() + ": " + ec.message());
    }
    for (std::size_t cls = 0; cls < synth.manifest.num_classes; ++cls) {
        std::filesystem::create_directories(dir / ("class" + std::to_string(cls)), ec);
        if (ec) {
            throw IoError("cannot create class directory under " + dir.string() + ": " + ec.message());
        }
    }
    for (std::size_t i = 0; i < synth.manifest.entries.size(); ++i) {
        write_pnm(dir / synth.manifest.entries[i].path, synth.dataset.samples[i].image);
    }
    synth.manifest.root = dir;
    write_manifest(dir, synth.manifest);
}

} // namespace neurosim::dataio

#endif // NEUROSIM_DATAIO_SYNTH_HPP
