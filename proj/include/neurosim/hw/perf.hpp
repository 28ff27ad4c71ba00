// SPDX-License-Identifier: Apache-2.0

#ifndef NEUROSIM_HW_PERF_HPP
#define NEUROSIM_HW_PERF_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "neurosim/hw/macs.hpp"
#include "neurosim/hw/resources.hpp"
#include "neurosim/snn/network.hpp"

namespace neurosim::hw {

/// Clock cycles of the MAC array for one inference:
/// T * sum over layers of ceil(macs_layer / parallel_units).
inline std::uint64_t compute_cycles(const MacCount& macs, std::uint64_t parallel_units) {
    std::uint64_t per_step = 0;
    for (auto m : macs.per_layer) {
        per_step += (m + parallel_units - 1) / parallel_units;
    }
    return per_step * macs.timesteps;
}

/// latency = T * sum ceil(MACs_layer / parallel_units) / clock_hz + fixed_overhead_s
inline double latency_model(const snn::NetworkSpec& spec, const ResourceCostTable& cost) {
    cost.validate();
    const MacCount macs = count_macs(spec);
    return static_cast<double>(compute_cycles(macs, cost.parallel_units)) / cost.clock_hz + cost.fixed_overhead_s;
}

struct PerfReport {
    std::string name;
    std::optional<double> accuracy; // fraction
    std::uint64_t macs_per_step = 0;
    std::uint64_t timesteps = 1;
    double mac_gop = 0.0;
    double latency_s = 0.0;
    double throughput_gops = 0.0;
    double power_w = 0.0;
    double power_eff_gops_per_w = 0.0;
    ResourceEstimate resources;
};

inline PerfReport perf_report(const snn::NetworkSpec& spec, const ResourceCostTable& cost,
                              const PlatformBudget& budget, std::optional<double> measured_accuracy = std::nullopt) {
    const MacCount macs = count_macs(spec);
    PerfReport r;
    r.name = spec.name;
    r.accuracy = measured_accuracy;
    r.macs_per_step = macs.total_macs;
    r.timesteps = macs.timesteps;
    r.mac_gop = macs.total_gop();
    r.latency_s = latency_model(spec, cost);
    r.throughput_gops = r.latency_s > 0.0 ? r.mac_gop / r.latency_s : 0.0;
    r.power_w = cost.power_w;
    r.power_eff_gops_per_w = r.power_w > 0.0 ? r.throughput_gops / r.power_w : 0.0;
    r.resources = estimate_resources(spec, cost, budget);
    return r;
}

} // namespace neurosim::hw

#endif // NEUROSIM_HW_PERF_HPP
