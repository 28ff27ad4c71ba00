// SPDX-License-Identifier: Apache-2.0

#ifndef NEUROSIM_HW_COMPARE_HPP
#define NEUROSIM_HW_COMPARE_HPP

#include <string>
#include <vector>

#include "neurosim/error.hpp"

namespace neurosim::hw {

struct DesignPoint {
    std::string name;
    double chip_area_mm2 = 0.0;
    double latency_ms = 0.0;
    double ee_tops_per_w = 0.0;
    std::string technology; // metadata only, e.g. "16nm"
};

struct ComparisonRow {
    DesignPoint design;
    double speedup = 1.0;    // baseline latency / latency
    double ee_gain = 1.0;    // EE / baseline EE
    double area_ratio = 1.0; // area / baseline area
};

/// Every design relative to the first one.
inline std::vector<ComparisonRow> design_comparison(const std::vector<DesignPoint>& designs) {
    if (designs.size() < 2) {
        throw ConfigError("a comparison needs at least two designs, got " + std::to_string(designs.size()));
    }
    for (const auto& d : designs) {
        if (!(d.chip_area_mm2 > 0.0 && d.latency_ms > 0.0 && d.ee_tops_per_w > 0.0)) {
            throw ConfigError("design '" + d.name + "' needs positive area, latency and efficiency");
        }
    }
    const DesignPoint& base = designs.front();
    std::vector<ComparisonRow> rows;
    for (const auto& d : designs) {
        rows.push_back({d, base.latency_ms / d.latency_ms, d.ee_tops_per_w / base.ee_tops_per_w,
                        d.chip_area_mm2 / base.chip_area_mm2});
    }
    return rows;
}

} // namespace neurosim::hw

#endif // NEUROSIM_HW_COMPARE_HPP
