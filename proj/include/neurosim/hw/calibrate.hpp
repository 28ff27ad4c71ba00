// SPDX-License-Identifier: Apache-2.0
//
// Fits a ResourceCostTable to target resource totals for one network.
//
// Stage 1 (least squares): parallel_units is the only free parameter shared
// between rows (LUT and DSP both scale with it). It is chosen to minimise the
// sum of squared relative residuals of those two rows,
//
//   P* = (a/L + b/D) / (a^2/L^2 + b^2/D^2),   a = lut_per_mac_unit, b = dsp_per_mac_unit,
//
// then rounded to the nearest integer >= 1. The Memory and IO rows each have
// a single free coefficient and are solved exactly.
//
// Stage 2 (exact match): per-resource calibration scales absorb what is left,
// so every row reproduces its target. Optional latency and power-efficiency
// targets set fixed_overhead_s (or clock_hz when the MAC array alone is too
// slow) and power_w.

#ifndef NEUROSIM_HW_CALIBRATE_HPP
#define NEUROSIM_HW_CALIBRATE_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include "neurosim/error.hpp"
#include "neurosim/hw/macs.hpp"
#include "neurosim/hw/perf.hpp"
#include "neurosim/hw/resources.hpp"

namespace neurosim::hw {

struct ResourceTargets {
    double lut = 0.0;
    double memory_bytes = 0.0;
    double io = 0.0;
    double dsp = 0.0;
    std::optional<double> latency_s;
    std::optional<double> power_eff_gops_per_w;

    void validate() const {
        for (double v : {lut, memory_bytes, io, dsp}) {
            if (!std::isfinite(v) || v < 0.0) {
                throw ConfigError("calibration targets must be finite and nonnegative");
            }
        }
        if (latency_s && !(*latency_s > 0.0)) {
            throw ConfigError("latency target must be positive");
        }
        if (power_eff_gops_per_w && !(*power_eff_gops_per_w > 0.0)) {
            throw ConfigError("power-efficiency target must be positive");
        }
    }
};

struct Residual {
    Resource resource;
    double target;
    double achieved;
    double relative; // (achieved - target) / target, 0 when both are 0
};

struct CalibrationResult {
    ResourceCostTable cost;
    std::array<Residual, 4> residuals;
    double max_abs_relative = 0.0;
};

inline double relative_residual(double achieved, double target) {
    if (target == 0.0) {
        return achieved == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return (achieved - target) / target;
}

inline CalibrationResult calibrate(const snn::NetworkSpec& spec, const ResourceTargets& targets,
                                   ResourceCostTable base = {}) {
    targets.validate();
    base.validate();
    ResourceCostTable cost = base;
    cost.scale = {};

    // Stage 1: parallel units from the LUT and DSP rows.
    double num = 0.0;
    double den = 0.0;
    if (targets.lut > 0.0 && cost.lut_per_mac_unit > 0.0) {
        num += cost.lut_per_mac_unit / targets.lut;
        den += cost.lut_per_mac_unit * cost.lut_per_mac_unit / (targets.lut * targets.lut);
    }
    if (targets.dsp > 0.0 && cost.dsp_per_mac_unit > 0.0) {
        num += cost.dsp_per_mac_unit / targets.dsp;
        den += cost.dsp_per_mac_unit * cost.dsp_per_mac_unit / (targets.dsp * targets.dsp);
    }
    if (den > 0.0) {
        cost.parallel_units = static_cast<std::uint64_t>(std::max(1.0, std::round(num / den)));
    }
    const double units = static_cast<double>(cost.parallel_units);

    // Stage 2: exact-match scaling.
    if (targets.lut == 0.0) {
        cost.lut_per_mac_unit = 0.0;
    } else {
        if (cost.lut_per_mac_unit == 0.0) {
            cost.lut_per_mac_unit = 1.0;
        }
        cost.scale.lut = targets.lut / (cost.lut_per_mac_unit * units);
    }

    if (targets.dsp == 0.0) {
        cost.dsp_per_mac_unit = 0.0;
    } else {
        if (cost.dsp_per_mac_unit == 0.0) {
            cost.dsp_per_mac_unit = 1.0;
        }
        const double per = cost.dsp_per_mac_unit * units;
        double s = targets.dsp / per;
        // DSP is rounded up; keep the product from landing a hair above an integer target.
        const double wanted = std::ceil(targets.dsp);
        for (int guard = 0; guard < 64 && std::ceil(s * per) > wanted; ++guard) {
            s = std::nextafter(s, 0.0);
        }
        for (int guard = 0; guard < 64 && std::ceil(s * per) < wanted; ++guard) {
            s = std::nextafter(s, std::numeric_limits<double>::infinity());
        }
        cost.scale.dsp = s;
    }

    if (targets.memory_bytes == 0.0) {
        cost.mem_bytes_per_weight = 0.0;
        cost.mem_bytes_per_state = 0.0;
    } else {
        double raw = raw_memory_bytes(spec, cost);
        if (raw == 0.0) {
            cost.mem_bytes_per_weight = 1.0;
            raw = raw_memory_bytes(spec, cost);
        }
        if (raw == 0.0) {
            throw ConfigError("network has no parameters or states to attribute memory to");
        }
        cost.scale.mem = targets.memory_bytes / raw;
    }

    const double streams = static_cast<double>(stream_count(spec));
    if (targets.io == 0.0) {
        cost.io_base = 0.0;
        cost.io_per_stream = 0.0;
    } else if (targets.io >= cost.io_per_stream * streams) {
        cost.io_base = targets.io - cost.io_per_stream * streams;
    } else {
        cost.io_base = 0.0;
        cost.io_per_stream = targets.io / streams;
    }

    if (targets.latency_s) {
        const double cycles = static_cast<double>(compute_cycles(count_macs(spec), cost.parallel_units));
        const double compute_s = cycles / cost.clock_hz;
        if (compute_s <= *targets.latency_s) {
            cost.fixed_overhead_s = *targets.latency_s - compute_s;
        } else {
            cost.fixed_overhead_s = 0.0;
            cost.clock_hz = cycles / *targets.latency_s;
        }
    }
    if (targets.power_eff_gops_per_w) {
        const double latency = latency_model(spec, cost);
        const double throughput = count_macs(spec).total_gop() / latency;
        cost.power_w = throughput / *targets.power_eff_gops_per_w;
    }

    CalibrationResult result;
    result.cost = cost;
    const ResourceEstimate est = estimate_resources(spec, cost, PlatformBudget{});
    const double wanted[4] = {targets.lut, targets.memory_bytes, targets.io, targets.dsp};
    for (std::size_t i = 0; i < 4; ++i) {
        const double achieved = est.rows[i].used;
        result.residuals[i] = {static_cast<Resource>(i), wanted[i], achieved, relative_residual(achieved, wanted[i])};
        result.max_abs_relative = std::max(result.max_abs_relative, std::abs(result.residuals[i].relative));
    }
    return result;
}

} // namespace neurosim::hw

#endif // NEUROSIM_HW_CALIBRATE_HPP
