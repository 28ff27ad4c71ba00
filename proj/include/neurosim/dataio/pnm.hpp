// SPDX-License-Identifier: Apache-2.0
//
// Binary PGM (P5) / PPM (P6) images. Pixels map to [0, 1] by dividing by
// maxval; writing rounds v * 255 half away from zero after clamping to [0, 1].

#ifndef NEUROSIM_DATAIO_PNM_HPP
#define NEUROSIM_DATAIO_PNM_HPP

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <string>
#include <vector>

#include "neurosim/error.hpp"
#include "neurosim/tensor.hpp"

namespace neurosim::dataio {

namespace detail {

inline std::size_t read_header_int(std::istream& in, const std::string& source) {
    int ch = in.get();
    for (;;) {
        while (ch != EOF && std::isspace(ch)) {
            ch = in.get();
        }
        if (ch == '#') {
            while (ch != EOF && ch != '\n') {
                ch = in.get();
            }
            continue;
        }
        break;
    }
    if (ch == EOF || !std::isdigit(ch)) {
        throw ConfigError("malformed PNM header in " + source);
    }
    std::size_t value = 0;
    while (ch != EOF && std::isdigit(ch)) {
        value = value * 10 + static_cast<std::size_t>(ch - '0');
        ch = in.get();
    }
    // exactly one whitespace byte terminates the token
    if (ch == EOF || !std::isspace(ch)) {
        throw ConfigError("malformed PNM header in " + source);
    }
    return value;
}

} // namespace detail

inline Tensor read_pnm(std::istream& in, const std::string& source = "<stream>") {
    char magic[2] = {};
    in.read(magic, 2);
    if (!in || magic[0] != 'P' || (magic[1] != '5' && magic[1] != '6')) {
        throw ConfigError(source + " is not a binary PGM/PPM (P5/P6) image");
    }
    const std::size_t channels = magic[1] == '5' ? 1 : 3;
    const std::size_t width = detail::read_header_int(in, source);
    const std::size_t height = detail::read_header_int(in, source);
    const std::size_t maxval = detail::read_header_int(in, source);
    if (width == 0 || height == 0 || maxval == 0 || maxval > 65535) {
        throw ConfigError("unsupported PNM dimensions or maxval in " + source);
    }
    const std::size_t bytes_per = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw(width * height * channels * bytes_per);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
        throw ConfigError("truncated PNM pixel data in " + source);
    }
    Tensor image({channels, height, width});
    const auto denom = static_cast<double>(maxval);
    for (std::size_t y = 0; y < height; ++y) {
        for (std::size_t x = 0; x < width; ++x) {
            for (std::size_t c = 0; c < channels; ++c) {
                const std::size_t idx = ((y * width + x) * channels + c) * bytes_per;
                const unsigned value = bytes_per == 1 ? raw[idx] : (unsigned{raw[idx]} << 8) | raw[idx + 1];
                image.at(c, y, x) = std::min(1.0, static_cast<double>(value) / denom);
            }
        }
    }
    return image;
}

inline Tensor read_pnm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open image " + path.string());
    }
    return read_pnm(in, path.string());
}

inline std::uint8_t to_byte(double v) {
    return static_cast<std::uint8_t>(std::round(std::clamp(v, 0.0, 1.0) * 255.0));
}

/// [1,H,W] -> P5, [3,H,W] -> P6.
inline std::string encode_pnm(const Tensor& image) {
    require(image.rank() == 3 && (image.dim(0) == 1 || image.dim(0) == 3),
            "PNM images must be [1,H,W] or [3,H,W], got " + shape_to_string(image.shape()));
    const std::size_t c = image.dim(0);
    const std::size_t h = image.dim(1);
    const std::size_t w = image.dim(2);
    std::string out = (c == 1 ? "P5\n" : "P6\n") + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
    out.reserve(out.size() + c * h * w);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            for (std::size_t ch = 0; ch < c; ++ch) {
                out.push_back(static_cast<char>(to_byte(image.at(ch, y, x))));
            }
        }
    }
    return out;
}

inline void write_pnm(const std::filesystem::path& path, const Tensor& image) {
    const std::string bytes = encode_pnm(image);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write image " + path.string());
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoError("failed writing image " + path.string());
    }
}

} // namespace neurosim::dataio

#endif // NEUROSIM_DATAIO_PNM_HPP
