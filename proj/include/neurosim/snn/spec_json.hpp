// SPDX-License-Identifier: Apache-2.0
//
// JSON form of a NetworkSpec:
//
//   {
//     "name": "fcu",
//     "timesteps": 8,
//     "input_shape": [3, 16, 16],
//     "num_classes": 10,
//     "layers": [
//       {"kind": "conv2d", "in_channels": 3, "out_channels": 8, "kernel": 3, "stride": 1, "padding": 1},
//       {"kind": "lif", "beta": 0.9, "theta": 1.0, "reset": "reset_to_zero"},
//       {"kind": "flatten"},
//       {"kind": "linear", "in_features": 2048, "out_features": 10}
//     ]
//   }
//
// num_classes may be omitted (taken from the last linear layer). Unknown keys
// such as "notes" are ignored.

#ifndef NEUROSIM_SNN_SPEC_JSON_HPP
#define NEUROSIM_SNN_SPEC_JSON_HPP

#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "neurosim/error.hpp"
#include "neurosim/snn/network.hpp"

namespace neurosim::snn {

inline nlohmann::json layer_to_json(const LayerSpec& layer) {
    nlohmann::json j;
    j["kind"] = layer_kind_name(layer);
    if (const auto* conv = std::get_if<Conv2dLayer>(&layer)) {
        j["in_channels"] = conv->in_channels;
        j["out_channels"] = conv->out_channels;
        j["kernel"] = conv->kernel;
        j["stride"] = conv->stride;
        j["padding"] = conv->padding;
    } else if (const auto* lif = std::get_if<LifLayer>(&layer)) {
        j["beta"] = lif->params.beta;
        j["theta"] = lif->params.theta;
        j["reset"] = lif->params.reset == ResetMode::reset_to_zero ? "reset_to_zero" : "subtract_threshold";
    } else if (const auto* lin = std::get_if<LinearLayer>(&layer)) {
        j["in_features"] = lin->in_features;
        j["out_features"] = lin->out_features;
    }
    return j;
}

inline nlohmann::json spec_to_json(const NetworkSpec& spec) {
    nlohmann::json j;
    j["name"] = spec.name;
    j["timesteps"] = spec.timesteps;
    j["input_shape"] = spec.input_shape;
    j["num_classes"] = spec.num_classes;
    j["layers"] = nlohmann::json::array();
    for (const auto& layer : spec.layers) {
        j["layers"].push_back(layer_to_json(layer));
    }
    return j;
}

namespace detail {

inline std::size_t positive_field(const nlohmann::json& j, const char* key, std::size_t fallback = 0,
                                  bool allow_zero = false) {
    if (!j.contains(key)) {
        if (fallback == 0 && !allow_zero) {
            throw ConfigError(std::string("network spec: missing field '") + key + "'");
        }
        return fallback;
    }
    const auto& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0 || (!allow_zero && v.get<long long>() == 0)) {
        throw ConfigError(std::string("network spec: field '") + key + "' must be a " +
                          (allow_zero ? "nonnegative" : "positive") + " integer");
    }
    return v.get<std::size_t>();
}

} // namespace detail

inline LayerSpec layer_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
        throw ConfigError("network spec: every layer needs a string 'kind'");
    }
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "conv2d") {
        return Conv2dLayer{detail::positive_field(j, "in_channels"), detail::positive_field(j, "out_channels"),
                           detail::positive_field(j, "kernel"), detail::positive_field(j, "stride", 1),
                           detail::positive_field(j, "padding", 0, true)};
    }
    if (kind == "lif") {
        LifParams p;
        p.beta = j.value("beta", p.beta);
        p.theta = j.value("theta", p.theta);
        const std::string reset = j.value("reset", std::string("reset_to_zero"));
        if (reset == "reset_to_zero") {
            p.reset = ResetMode::reset_to_zero;
        } else if (reset == "subtract_threshold") {
            p.reset = ResetMode::subtract_threshold;
        } else {
            throw ConfigError("network spec: unknown lif reset mode '" + reset + "'");
        }
        p.validate();
        return LifLayer{p};
    }
    if (kind == "flatten") {
        return FlattenLayer{};
    }
    if (kind == "linear") {
        return LinearLayer{detail::positive_field(j, "in_features"), detail::positive_field(j, "out_features")};
    }
    throw ConfigError("network spec: unknown layer kind '" + kind + "'");
}

inline NetworkSpec spec_from_json(const nlohmann::json& j) {
    try {
        NetworkSpec spec;
        spec.name = j.value("name", std::string("network"));
        spec.timesteps = detail::positive_field(j, "timesteps", 8);
        const auto& shape = j.at("input_shape");
        if (!shape.is_array() || shape.size() != 3) {
            throw ConfigError("network spec: input_shape must be [channels, height, width]");
        }
        for (std::size_t i = 0; i < 3; ++i) {
            if (!shape[i].is_number_integer() || shape[i].get<long long>() <= 0) {
                throw ConfigError("network spec: input_shape entries must be positive integers");
            }
            spec.input_shape[i] = shape[i].get<std::size_t>();
        }
        if (!j.contains("layers") || !j.at("layers").is_array()) {
            throw ConfigError("network spec: 'layers' must be an array");
        }
        for (const auto& lj : j.at("layers")) {
            spec.layers.push_back(layer_from_json(lj));
        }
        if (j.contains("num_classes")) {
            spec.num_classes = detail::positive_field(j, "num_classes");
        } else if (!spec.layers.empty() && std::holds_alternative<LinearLayer>(spec.layers.back())) {
            spec.num_classes = std::get<LinearLayer>(spec.layers.back()).out_features;
        }
        validate(spec);
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("network spec: ") + e.what());
    }
}

inline NetworkSpec load_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open network spec " + path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("network spec " + path.string() + " is not valid JSON: " + e.what());
    }
    return spec_from_json(j);
}

} // namespace neurosim::snn

#endif // NEUROSIM_SNN_SPEC_JSON_HPP
