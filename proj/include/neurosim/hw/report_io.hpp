// SPDX-License-Identifier: Apache-2.0
//
// JSON (machine) and aligned-text / CSV (human) renderings of the hardware
// model's inputs and outputs.

#ifndef NEUROSIM_HW_REPORT_IO_HPP
#define NEUROSIM_HW_REPORT_IO_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "neurosim/error.hpp"
#include "neurosim/format.hpp"
#include "neurosim/hw/calibrate.hpp"
#include "neurosim/hw/compare.hpp"
#include "neurosim/hw/perf.hpp"
#include "neurosim/hw/resources.hpp"

namespace neurosim::hw {

inline nlohmann::json read_json_file(const std::filesystem::path& path, const char* what) {
    std::ifstream in(path);
    if (!in) {
        throw IoError(std::string("cannot open ") + what + " " + path.string());
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string(what) + " " + path.string() + " is not valid JSON: " + e.what());
    }
}

// --- cost table -------------------------------------------------------------

inline nlohmann::json cost_to_json(const ResourceCostTable& c) {
    return {{"name", c.name},
            {"lut_per_mac_unit", c.lut_per_mac_unit},
            {"dsp_per_mac_unit", c.dsp_per_mac_unit},
            {"mem_bytes_per_weight", c.mem_bytes_per_weight},
            {"mem_bytes_per_state", c.mem_bytes_per_state},
            {"io_base", c.io_base},
            {"io_per_stream", c.io_per_stream},
            {"parallel_units", c.parallel_units},
            {"clock_hz", c.clock_hz},
            {"fixed_overhead_s", c.fixed_overhead_s},
            {"power_w", c.power_w},
            {"calibration_scale", {{"lut", c.scale.lut}, {"dsp", c.scale.dsp}, {"mem", c.scale.mem}}}};
}

inline ResourceCostTable cost_from_json(const nlohmann::json& j) {
    try {
        ResourceCostTable c;
        c.name = j.value("name", c.name);
        c.lut_per_mac_unit = j.value("lut_per_mac_unit", c.lut_per_mac_unit);
        c.dsp_per_mac_unit = j.value("dsp_per_mac_unit", c.dsp_per_mac_unit);
        c.mem_bytes_per_weight = j.value("mem_bytes_per_weight", c.mem_bytes_per_weight);
        c.mem_bytes_per_state = j.value("mem_bytes_per_state", c.mem_bytes_per_state);
        c.io_base = j.value("io_base", c.io_base);
        c.io_per_stream = j.value("io_per_stream", c.io_per_stream);
        c.parallel_units = j.value("parallel_units", c.parallel_units);
        c.clock_hz = j.value("clock_hz", c.clock_hz);
        c.fixed_overhead_s = j.value("fixed_overhead_s", c.fixed_overhead_s);
        c.power_w = j.value("power_w", c.power_w);
        if (j.contains("calibration_scale")) {
            const auto& s = j.at("calibration_scale");
            c.scale.lut = s.value("lut", 1.0);
            c.scale.dsp = s.value("dsp", 1.0);
            c.scale.mem = s.value("mem", 1.0);
        }
        c.validate();
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("cost table: ") + e.what());
    }
}

// --- platform budget --------------------------------------------------------

inline nlohmann::json budget_to_json(const PlatformBudget& b) {
    return {{"name", b.name}, {"lut", b.lut}, {"memory_mb", b.memory_bytes / kBytesPerMB}, {"io", b.io}, {"dsp", b.dsp}};
}

inline PlatformBudget budget_from_json(const nlohmann::json& j) {
    try {
        PlatformBudget b;
        b.name = j.value("name", b.name);
        b.lut = j.value("lut", b.lut);
        b.memory_bytes = j.value("memory_mb", b.memory_bytes / kBytesPerMB) * kBytesPerMB;
        b.io = j.value("io", b.io);
        b.dsp = j.value("dsp", b.dsp);
        b.validate();
        return b;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("platform budget: ") + e.what());
    }
}

// --- calibration targets ----------------------------------------------------
//
// {"lut": 151200, "memory_mb": 11.4, "io": 139, "dsp": 518,
//  "latency_ms": 12, "power_eff_gops_per_w": 20.0}

inline ResourceTargets targets_from_json(const nlohmann::json& j) {
    try {
        ResourceTargets t;
        t.lut = j.value("lut", 0.0);
        t.memory_bytes = j.value("memory_mb", 0.0) * kBytesPerMB;
        t.io = j.value("io", 0.0);
        t.dsp = j.value("dsp", 0.0);
        if (j.contains("latency_ms")) {
            t.latency_s = j.at("latency_ms").get<double>() / 1e3;
        }
        if (j.contains("power_eff_gops_per_w")) {
            t.power_eff_gops_per_w = j.at("power_eff_gops_per_w").get<double>();
        }
        t.validate();
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("calibration targets: ") + e.what());
    }
}

inline nlohmann::json calibration_to_json(const CalibrationResult& r) {
    nlohmann::json residuals = nlohmann::json::array();
    for (const auto& res : r.residuals) {
        residuals.push_back({{"resource", resource_name(res.resource)},
                             {"target", res.target},
                             {"achieved", res.achieved},
                             {"relative_residual", res.relative}});
    }
    return {{"cost", cost_to_json(r.cost)}, {"residuals", residuals}, {"max_abs_relative", r.max_abs_relative}};
}

// --- design points ----------------------------------------------------------

inline DesignPoint design_from_json(const nlohmann::json& j) {
    try {
        DesignPoint d;
        d.name = j.at("name").get<std::string>();
        d.chip_area_mm2 = j.at("chip_area_mm2").get<double>();
        d.latency_ms = j.at("latency_ms").get<double>();
        d.ee_tops_per_w = j.at("ee_tops_per_w").get<double>();
        d.technology = j.value("technology", std::string());
        return d;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("design point: ") + e.what());
    }
}

// --- reports ----------------------------------------------------------------

inline nlohmann::json resource_row_to_json(const ResourceRow& row) {
    const bool mem = row.resource == Resource::memory;
    return {{"resource", resource_name(row.resource)},
            {"used", mem ? row.used / kBytesPerMB : row.used},
            {"available", mem ? row.available / kBytesPerMB : row.available},
            {"unit", mem ? "MB" : "count"},
            {"percent", row.percent},
            {"over_budget", row.over_budget}};
}

inline nlohmann::json report_to_json(const PerfReport& r, const PlatformBudget& budget) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.resources.rows) {
        rows.push_back(resource_row_to_json(row));
    }
    nlohmann::json j = {{"name", r.name},
                        {"accuracy", r.accuracy ? nlohmann::json(*r.accuracy) : nlohmann::json(nullptr)},
                        {"macs_per_step", r.macs_per_step},
                        {"timesteps", r.timesteps},
                        {"mac_gop", r.mac_gop},
                        {"latency_s", r.latency_s},
                        {"latency_ms", r.latency_s * 1e3},
                        {"throughput_gops", r.throughput_gops},
                        {"power_w", r.power_w},
                        {"power_eff_gops_per_w", r.power_eff_gops_per_w},
                        {"platform", budget.name},
                        {"resources", rows}};
    return j;
}

namespace detail {

inline std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), format, v);
    return buf;
}

inline std::string pad_left(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

inline std::string pad_right(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

inline std::string format_used(const ResourceRow& row, double value) {
    return row.resource == Resource::memory ? fmt("%.1fMB", value / kBytesPerMB) : fmt("%.0f", value);
}

} // namespace detail

/// Resource table with one (used, %) column pair per report.
inline std::string format_utilization_table(const std::vector<PerfReport>& reports, const PlatformBudget& budget) {
    using detail::pad_left;
    using detail::pad_right;
    std::string out = "Resource utilization, " + budget.name + "\n";
    out += pad_right("Resource", 10);
    for (const auto& r : reports) {
        out += pad_left(r.name, 14) + pad_left("% " + r.name, 14);
    }
    out += pad_left("Available", 12) + "\n";
    for (std::size_t i = 0; i < 4; ++i) {
        const auto res = static_cast<Resource>(i);
        out += pad_right(resource_name(res), 10);
        for (const auto& r : reports) {
            const ResourceRow& row = r.resources.row(res);
            std::string used = detail::format_used(row, row.used);
            if (row.over_budget) {
                used += "!";
            }
            out += pad_left(used, 14) + pad_left(detail::fmt("%.2f", row.percent), 14);
        }
        const ResourceRow& any = reports.front().resources.row(res);
        out += pad_left(detail::format_used(any, any.available), 12) + "\n";
    }
    return out;
}

/// Accuracy / MAC / latency / efficiency, one column per report.
inline std::string format_performance_table(const std::vector<PerfReport>& reports) {
    using detail::fmt;
    using detail::pad_left;
    using detail::pad_right;
    std::string out = pad_right("Metric", 26);
    for (const auto& r : reports) {
        out += pad_left(r.name, 14);
    }
    out += "\n";
    auto line = [&](const char* label, auto&& cell) {
        out += pad_right(label, 26);
        for (const auto& r : reports) {
            out += pad_left(cell(r), 14);
        }
        out += "\n";
    };
    line("Accuracy (%)", [](const PerfReport& r) { return r.accuracy ? fmt("%.1f", *r.accuracy * 100.0) : "-"; });
    line("MAC (GOP)", [](const PerfReport& r) { return fmt("%.3f", r.mac_gop); });
    line("Latency (ms)", [](const PerfReport& r) { return fmt("%.2f", r.latency_s * 1e3); });
    line("Throughput (GOP/s)", [](const PerfReport& r) { return fmt("%.2f", r.throughput_gops); });
    line("Power (W)", [](const PerfReport& r) { return fmt("%.3f", r.power_w); });
    line("Power efficiency (GOP/s/W)", [](const PerfReport& r) { return fmt("%.1f", r.power_eff_gops_per_w); });
    return out;
}

inline std::string format_comparison_table(const std::vector<ComparisonRow>& rows) {
    using detail::fmt;
    using detail::pad_left;
    using detail::pad_right;
    std::string out = pad_right("Design", 16) + pad_left("Area (mm2)", 12) + pad_left("Latency (ms)", 14) +
                      pad_left("EE (TOPS/W)", 13) + pad_left("Speedup", 10) + pad_left("EE gain", 10) + "\n";
    for (const auto& r : rows) {
        out += pad_right(r.design.name, 16) + pad_left(fmt("%g", r.design.chip_area_mm2), 12) +
               pad_left(fmt("%g", r.design.latency_ms), 14) + pad_left(fmt("%g", r.design.ee_tops_per_w), 13) +
               pad_left(fmt("%.1fx", r.speedup), 10) + pad_left(fmt("%.1fx", r.ee_gain), 10) + "\n";
    }
    return out;
}

inline std::string format_comparison_csv(const std::vector<ComparisonRow>& rows) {
    std::string out = "design,chip_area_mm2,latency_ms,ee_tops_per_w,speedup,ee_gain,area_ratio\n";
    for (const auto& r : rows) {
        out += r.design.name + "," + format_double(r.design.chip_area_mm2) + "," +
               format_double(r.design.latency_ms) + "," + format_double(r.design.ee_tops_per_w) + "," +
               format_double(r.speedup) + "," + format_double(r.ee_gain) + "," +
               format_double(r.area_ratio) + "\n";
    }
    return out;
}

inline nlohmann::json comparison_to_json(const std::vector<ComparisonRow>& rows) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : rows) {
        j.push_back({{"design", r.design.name},
                     {"technology", r.design.technology},
                     {"chip_area_mm2", r.design.chip_area_mm2},
                     {"latency_ms", r.design.latency_ms},
                     {"ee_tops_per_w", r.design.ee_tops_per_w},
                     {"speedup", r.speedup},
                     {"ee_gain", r.ee_gain},
                     {"area_ratio", r.area_ratio}});
    }
    return j;
}

} // namespace neurosim::hw

#endif // NEUROSIM_HW_REPORT_IO_HPP
