// SPDX-License-Identifier: Apache-2.0
//
// Linear FPGA cost model.
//
//   LUT    = round(scale_lut * lut_per_mac_unit * parallel_units)
//   DSP    = ceil(scale_dsp * dsp_per_mac_unit * parallel_units)
//   Memory = scale_mem * (parameters * mem_bytes_per_weight + states * mem_bytes_per_state)   [bytes]
//   IO     = io_base + io_per_stream * streams
//
// Memory is counted in bytes; reports show MB = 2^20 bytes.

#ifndef NEUROSIM_HW_RESOURCES_HPP
#define NEUROSIM_HW_RESOURCES_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <string>

#include "neurosim/error.hpp"
#include "neurosim/hw/macs.hpp"
#include "neurosim/snn/network.hpp"

namespace neurosim::hw {

inline constexpr double kBytesPerMB = 1024.0 * 1024.0;

struct CalibrationScale {
    double lut = 1.0;
    double dsp = 1.0;
    double mem = 1.0;
    friend bool operator==(const CalibrationScale&, const CalibrationScale&) = default;
};

struct ResourceCostTable {
    std::string name;
    double lut_per_mac_unit = 300.0;
    double dsp_per_mac_unit = 1.0;
    double mem_bytes_per_weight = 2.0;
    double mem_bytes_per_state = 4.0;
    double io_base = 0.0;
    double io_per_stream = 4.0;
    std::uint64_t parallel_units = 1;
    double clock_hz = 200e6;
    double fixed_overhead_s = 0.0;
    double power_w = 1.0;
    CalibrationScale scale;

    void validate() const {
        const double coefficients[] = {lut_per_mac_unit, dsp_per_mac_unit, mem_bytes_per_weight, mem_bytes_per_state,
                                       io_base,          io_per_stream,    fixed_overhead_s,     power_w,
                                       scale.lut,        scale.dsp,        scale.mem};
        for (double c : coefficients) {
            if (!std::isfinite(c) || c < 0.0) {
                throw ConfigError("cost table '" + name + "': coefficients must be finite and nonnegative");
            }
        }
        if (parallel_units < 1) {
            throw ConfigError("cost table '" + name + "': parallel_units must be >= 1");
        }
        if (!(clock_hz > 0.0) || !std::isfinite(clock_hz)) {
            throw ConfigError("cost table '" + name + "': clock_hz must be positive");
        }
    }

    friend bool operator==(const ResourceCostTable&, const ResourceCostTable&) = default;
};

/// Zynq UltraScale+ XCZU7EV (ZCU104) fabric.
struct PlatformBudget {
    std::string name = "Zynq UltraScale+ XCZU7EV";
    double lut = 504000;
    double memory_bytes = 38 * kBytesPerMB;
    double io = 464;
    double dsp = 1728;

    void validate() const {
        if (!(lut > 0 && memory_bytes > 0 && io > 0 && dsp > 0)) {
            throw ConfigError("platform budget '" + name + "': all resources must be positive");
        }
    }
};

enum class Resource { lut = 0, memory = 1, io = 2, dsp = 3 };

inline const char* resource_name(Resource r) {
    static constexpr const char* names[] = {"LUT", "Memory", "IO", "DSP"};
    return names[static_cast<int>(r)];
}

struct ResourceRow {
    Resource resource = Resource::lut;
    double used = 0.0;
    double available = 0.0;
    double percent = 0.0;
    bool over_budget = false;
};

struct ResourceEstimate {
    std::array<ResourceRow, 4> rows;

    [[nodiscard]] const ResourceRow& row(Resource r) const { return rows[static_cast<std::size_t>(r)]; }
};

/// Memory footprint before calibration scaling, in bytes.
inline double raw_memory_bytes(const snn::NetworkSpec& spec, const ResourceCostTable& cost) {
    return static_cast<double>(parameter_count(spec)) * cost.mem_bytes_per_weight +
           static_cast<double>(state_count(spec)) * cost.mem_bytes_per_state;
}

inline ResourceEstimate estimate_resources(const snn::NetworkSpec& spec, const ResourceCostTable& cost,
                                           const PlatformBudget& budget) {
    cost.validate();
    budget.validate();
    const double units = static_cast<double>(cost.parallel_units);
    const double used[4] = {
        std::round(cost.scale.lut * cost.lut_per_mac_unit * units),
        cost.scale.mem * raw_memory_bytes(spec, cost),
        cost.io_base + cost.io_per_stream * static_cast<double>(stream_count(spec)),
        std::ceil(cost.scale.dsp * cost.dsp_per_mac_unit * units),
    };
    const double available[4] = {budget.lut, budget.memory_bytes, budget.io, budget.dsp};
    ResourceEstimate est;
    for (std::size_t i = 0; i < 4; ++i) {
        ResourceRow& row = est.rows[i];
        row.resource = static_cast<Resource>(i);
        row.used = used[i];
        row.available = available[i];
        row.percent = 100.0 * used[i] / available[i];
        row.over_budget = used[i] > available[i];
    }
    return est;
}

} // namespace neurosim::hw

#endif // NEUROSIM_HW_RESOURCES_HPP
