// SPDX-License-Identifier: Apache-2.0
//
// Shared plumbing for the neurosim command-line tool.

#ifndef NEUROSIM_TOOLS_CLI_HPP
#define NEUROSIM_TOOLS_CLI_HPP

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "neurosim/error.hpp"
#include "neurosim/snn/network.hpp"
#include "neurosim/snn/spec_json.hpp"

namespace neurosim::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kConfig = 3, kIo = 4 };

/// Bad flag combination detected after parsing; exits 2 like a parse error.
class UsageError : public Error {
public:
    using Error::Error;
};

/// Work to run once argument parsing has finished.
using Action = std::function<void()>;

/// JSON config files: {"train": {"epochs": 5}} sets `train --epochs 5` unless
/// the flag is given on the command line. Arrays become repeated values.
class JsonConfig : public CLI::Config {
public:
    std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}"; }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(input);
        } catch (const nlohmann::json::exception& e) {
            throw CLI::ConfigError(std::string("config file is not valid JSON: ") + e.what());
        }
        if (!j.is_object()) {
            throw CLI::ConfigError("config file must hold a JSON object");
        }
        std::vector<CLI::ConfigItem> items;
        collect(j, {}, items);
        return items;
    }

private:
    static std::string scalar(const nlohmann::json& v) {
        if (v.is_string()) {
            return v.get<std::string>();
        }
        return v.dump();
    }

    static void collect(const nlohmann::json& obj, const std::vector<std::string>& parents,
                        std::vector<CLI::ConfigItem>& items) {
        for (const auto& [key, value] : obj.items()) {
            if (value.is_object()) {
                auto next = parents;
                next.push_back(key);
                collect(value, next, items);
                continue;
            }
            CLI::ConfigItem item;
            item.parents = parents;
            item.name = key;
            if (value.is_array()) {
                for (const auto& v : value) {
                    item.inputs.push_back(scalar(v));
                }
            } else {
                item.inputs.push_back(scalar(value));
            }
            items.push_back(std::move(item));
        }
    }
};

/// Shipped specs and fixtures; NEUROSIM_DATA_DIR overrides the build-time path.
inline std::filesystem::path data_dir() {
    if (const char* env = std::getenv("NEUROSIM_DATA_DIR"); env != nullptr && *env != '\0') {
        return env;
    }
    return NEUROSIM_DATA_DIR;
}

inline void require_file(const std::filesystem::path& path, const std::string& what) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) {
        throw IoError(what + " not found: " + path.string());
    }
}

/// A spec argument is a file path or the name of a shipped spec
/// (bcu-mini, fcu-mini, bcu-ref, fcu-ref).
inline std::filesystem::path resolve_spec_path(const std::string& arg) {
    std::error_code ec;
    if (std::filesystem::is_regular_file(arg, ec)) {
        return arg;
    }
    for (const char* sub : {"specs", "fixtures"}) {
        const auto candidate = data_dir() / sub / (arg + ".json");
        if (std::filesystem::is_regular_file(candidate, ec)) {
            return candidate;
        }
    }
    throw IoError("network spec not found: " + arg);
}

inline snn::NetworkSpec resolve_spec(const std::string& arg) { return snn::load_spec(resolve_spec_path(arg)); }

inline void ensure_directory(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw IoError("cannot create output directory " + dir.string());
    }
}

inline void write_text(const std::filesystem::path& path, const std::string& text, bool binary = false) {
    std::ofstream out(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

/// Effective configuration of a run, saved next to its outputs.
inline void write_run_json(const std::filesystem::path& dir, const std::string& command, nlohmann::json config) {
    config["command"] = command;
    write_text(dir / "run.json", config.dump(2) + "\n");
}

/// Integer flags that must be >= 1.
inline const CLI::Validator kAtLeastOne(
    [](std::string& value) {
        std::size_t pos = 0;
        try {
            if (std::stoll(value, &pos) >= 1 && pos == value.size()) {
                return std::string();
            }
        } catch (const std::exception&) {
        }
        return "value " + value + " must be an integer >= 1";
    },
    ">=1");

inline void seed_option(CLI::App* sub, std::uint64_t& seed) {
    sub->add_option("--seed", seed, "Random seed (falls back to NEUROSIM_SEED)")
        ->envname("NEUROSIM_SEED")
        ->capture_default_str();
}

void register_synth(CLI::App& app, Action& action);
void register_train(CLI::App& app, Action& action);
void register_eval(CLI::App& app, Action& action);
void register_msrun(CLI::App& app, Action& action);
void register_report(CLI::App& app, Action& action);
void register_compare(CLI::App& app, Action& action);
void register_calibrate(CLI::App& app, Action& action);

} // namespace neurosim::cli

#endif // NEUROSIM_TOOLS_CLI_HPP
