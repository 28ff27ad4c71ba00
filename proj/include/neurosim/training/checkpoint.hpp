// SPDX-License-Identifier: Apache-2.0
//
// Checkpoint file, all integers little-endian:
//
//   "NSNN"                     4-byte magic
//   u32 version                currently 1
//   u32 n, n bytes             UTF-8 JSON network spec
//   tensor records             for every conv2d/linear layer in order:
//                              weight record, then bias record
//     u32 rank, u32 dims[rank], f64 payload[prod(dims)] (IEEE-754)
//
// Nothing may follow the last record.

#ifndef NEUROSIM_TRAINING_CHECKPOINT_HPP
#define NEUROSIM_TRAINING_CHECKPOINT_HPP

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "neurosim/error.hpp"
#include "neurosim/snn/network.hpp"
#include "neurosim/snn/spec_json.hpp"

namespace neurosim::training {

inline constexpr char kCheckpointMagic[4] = {'N', 'S', 'N', 'N'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
    snn::WeightSet weights;
    snn::NetworkSpec spec;
};

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFU));
    }
}

inline void put_f64(std::string& out, double d) {
    const auto bits = std::bit_cast<std::uint64_t>(d);
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFFU));
    }
}

inline void put_tensor(std::string& out, const Tensor& t) {
    put_u32(out, static_cast<std::uint32_t>(t.rank()));
    for (auto d : t.shape()) {
        put_u32(out, static_cast<std::uint32_t>(d));
    }
    for (double v : t.values()) {
        put_f64(out, v);
    }
}

class Reader {
public:
    explicit Reader(const std::string& bytes) : bytes_(bytes) {}

    bool has(std::size_t n) const { return bytes_.size() - pos_ >= n; }
    std::size_t remaining() const { return bytes_.size() - pos_; }

    std::uint32_t u32() {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_++])) << (8 * i);
        }
        return v;
    }

    double f64() {
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i) {
            bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_++])) << (8 * i);
        }
        return std::bit_cast<double>(bits);
    }

    std::string take(std::size_t n) {
        std::string s = bytes_.substr(pos_, n);
        pos_ += n;
        return s;
    }

private:
    const std::string& bytes_;
    std::size_t pos_ = 0;
};

} // namespace detail

inline std::string encode_checkpoint(const snn::WeightSet& weights, const snn::NetworkSpec& spec) {
    snn::check_weights(spec, weights);
    std::string out(kCheckpointMagic, 4);
    detail::put_u32(out, kCheckpointVersion);
    const std::string json = snn::spec_to_json(spec).dump();
    detail::put_u32(out, static_cast<std::uint32_t>(json.size()));
    out += json;
    for (const auto& [index, lw] : weights.layers) {
        detail::put_tensor(out, lw.weight);
        detail::put_tensor(out, lw.bias);
    }
    return out;
}

inline Checkpoint decode_checkpoint(const std::string& bytes) {
    using Kind = DecodeError::Kind;
    detail::Reader in(bytes);
    if (!in.has(4) || std::memcmp(bytes.data(), kCheckpointMagic, 4) != 0) {
        throw DecodeError(Kind::bad_magic, "checkpoint does not start with magic 'NSNN'");
    }
    in.take(4);
    if (!in.has(4)) {
        throw DecodeError(Kind::truncated, "checkpoint truncated in header (version)");
    }
    const std::uint32_t version = in.u32();
    if (version != kCheckpointVersion) {
        throw DecodeError(Kind::version_mismatch, "checkpoint version " + std::to_string(version) +
                                                      " is not supported (expected " +
                                                      std::to_string(kCheckpointVersion) + ")");
    }
    if (!in.has(4)) {
        throw DecodeError(Kind::truncated, "checkpoint truncated in header (spec length)");
    }
    const std::uint32_t json_len = in.u32();
    if (!in.has(json_len)) {
        throw DecodeError(Kind::truncated, "checkpoint truncated in spec blob");
    }
    Checkpoint ck;
    try {
        ck.spec = snn::spec_from_json(nlohmann::json::parse(in.take(json_len)));
    } catch (const nlohmann::json::exception& e) {
        throw DecodeError(Kind::malformed, std::string("checkpoint spec blob is not valid JSON: ") + e.what());
    } catch (const ConfigError& e) {
        throw DecodeError(Kind::malformed, std::string("checkpoint spec blob is invalid: ") + e.what());
    }

    std::size_t record = 0;
    auto read_tensor = [&](const Shape& expected, const std::string& label) {
        const std::string where = "record " + std::to_string(record) + " (" + label + ")";
        if (!in.has(4)) {
            throw DecodeError(Kind::truncated, "checkpoint truncated in tensor " + where);
        }
        const std::uint32_t rank = in.u32();
        if (rank != expected.size()) {
            throw DecodeError(Kind::malformed, "checkpoint tensor " + where + " has rank " + std::to_string(rank) +
                                                   ", expected " + std::to_string(expected.size()));
        }
        if (!in.has(4ULL * rank)) {
            throw DecodeError(Kind::truncated, "checkpoint truncated in tensor " + where);
        }
        Shape shape(rank);
        for (auto& d : shape) {
            d = in.u32();
        }
        if (shape != expected) {
            throw DecodeError(Kind::malformed, "checkpoint tensor " + where + " has shape " + shape_to_string(shape) +
                                                   ", expected " + shape_to_string(expected));
        }
        const std::size_t n = shape_numel(shape);
        if (!in.has(8 * n)) {
            throw DecodeError(Kind::truncated, "checkpoint truncated in tensor " + where);
        }
        std::vector<double> data(n);
        for (auto& v : data) {
            v = in.f64();
        }
        ++record;
        return Tensor(std::move(shape), std::move(data));
    };

    for (std::size_t i = 0; i < ck.spec.layers.size(); ++i) {
        const auto& layer = ck.spec.layers[i];
        if (!snn::has_parameters(layer)) {
            continue;
        }
        const std::string name = "layer " + std::to_string(i) + " " + snn::layer_kind_name(layer);
        Tensor weight = read_tensor(snn::weight_shape(layer), name + " weight");
        Tensor bias = read_tensor(snn::bias_shape(layer), name + " bias");
        ck.weights.layers.emplace(i, snn::LayerWeights{std::move(weight), std::move(bias)});
    }
    if (in.remaining() != 0) {
        throw DecodeError(Kind::malformed,
                          "checkpoint has " + std::to_string(in.remaining()) + " trailing bytes after the last record");
    }
    return ck;
}

inline void save_checkpoint(const snn::WeightSet& weights, const snn::NetworkSpec& spec,
                            const std::filesystem::path& path) {
    const std::string bytes = encode_checkpoint(weights, spec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write checkpoint " + path.string());
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoError("failed writing checkpoint " + path.string());
    }
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open checkpoint " + path.string());
    }
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_checkpoint(bytes);
}

} // namespace neurosim::training

#endif // NEUROSIM_TRAINING_CHECKPOINT_HPP
