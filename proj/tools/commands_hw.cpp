// SPDX-License-Identifier: Apache-2.0
//
// report, compare and calibrate subcommands.

#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "cli.hpp"
#include "neurosim/hw/calibrate.hpp"
#include "neurosim/hw/compare.hpp"
#include "neurosim/hw/perf.hpp"
#include "neurosim/hw/report_io.hpp"

namespace neurosim::cli {

namespace {

std::filesystem::path fixture(const std::string& name) { return data_dir() / "fixtures" / name; }

nlohmann::json read_json(const std::filesystem::path& path, const char* what) {
    require_file(path, what);
    return hw::read_json_file(path, what);
}

std::vector<std::string> fixture_names(const std::string& which) {
    if (which == "all") {
        return {"bcu", "fcu"};
    }
    return {which};
}

// --- report -----------------------------------------------------------------

struct ReportOptions {
    std::string spec;
    std::string cost;
    std::string budget;
    std::optional<double> accuracy;
    std::string format = "text";
    std::string fixture_set;
    bool fixtures_given = false;
};

void print_reports(const std::vector<hw::PerfReport>& reports, const hw::PlatformBudget& budget,
                   const std::string& format) {
    if (format == "json") {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& r : reports) {
            j.push_back(hw::report_to_json(r, budget));
        }
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::cout << hw::format_utilization_table(reports, budget) << "\n" << hw::format_performance_table(reports);
}

void run_report(const ReportOptions& o) {
    const hw::PlatformBudget budget =
        !o.budget.empty() ? hw::budget_from_json(read_json(o.budget, "platform budget"))
        : o.fixtures_given   ? hw::budget_from_json(read_json(fixture("xczu7ev-budget.json"), "platform budget"))
                          : hw::PlatformBudget{};
    std::vector<hw::PerfReport> reports;
    if (o.fixtures_given) {
        for (const auto& name : fixture_names(o.fixture_set)) {
            const auto spec = snn::load_spec(fixture(name + "-ref.json"));
            const auto cost = hw::cost_from_json(read_json(fixture(name + "-cost.json"), "cost table"));
            const auto targets = read_json(fixture(name + "-targets.json"), "calibration targets");
            std::optional<double> acc;
            if (targets.contains("reported_accuracy")) {
                acc = targets.at("reported_accuracy").get<double>();
            }
            reports.push_back(hw::perf_report(spec, cost, budget, acc));
        }
    } else {
        if (o.spec.empty()) {
            throw UsageError("report needs --spec or --paper-fixtures");
        }
        if (o.cost.empty()) {
            throw ConfigError("report needs a cost table (--cost); run calibrate to produce one");
        }
        const auto spec = resolve_spec(o.spec);
        const auto cost = hw::cost_from_json(read_json(o.cost, "cost table"));
        reports.push_back(hw::perf_report(spec, cost, budget, o.accuracy));
    }
    print_reports(reports, budget, o.format);
}

// --- compare ----------------------------------------------------------------

struct CompareOptions {
    std::vector<std::string> designs;
    bool use_fixtures = false;
    std::string format = "text";
};

void run_compare(const CompareOptions& o) {
    std::vector<std::filesystem::path> files;
    if (o.use_fixtures) {
        files.push_back(fixture("digital-cmos.json"));
        files.push_back(fixture("mixed-signal.json"));
    }
    files.insert(files.end(), o.designs.begin(), o.designs.end());
    if (files.size() < 2) {
        throw UsageError("compare needs at least two designs");
    }
    std::vector<hw::DesignPoint> designs;
    for (const auto& f : files) {
        designs.push_back(hw::design_from_json(read_json(f, "design point")));
    }
    const auto rows = hw::design_comparison(designs);
    if (o.format == "csv") {
        std::cout << hw::format_comparison_csv(rows);
    } else if (o.format == "json") {
        std::cout << hw::comparison_to_json(rows).dump(2) << "\n";
    } else {
        std::cout << hw::format_comparison_table(rows);
    }
}

// --- calibrate --------------------------------------------------------------

struct CalibrateOptions {
    std::string targets;
    std::string spec;
    std::string base;
    std::string out;
};

void run_calibrate(const CalibrateOptions& o) {
    const auto targets_json = read_json(o.targets, "calibration targets");
    const auto spec = resolve_spec(o.spec);
    const hw::ResourceTargets targets = hw::targets_from_json(targets_json);
    hw::ResourceCostTable base;
    if (!o.base.empty()) {
        base = hw::cost_from_json(read_json(o.base, "base cost table"));
    }
    base.name = targets_json.value("name", spec.name);
    const auto result = hw::calibrate(spec, targets, base);
    const std::string text = hw::cost_to_json(result.cost).dump(2) + "\n";
    if (o.out.empty()) {
        std::cout << text;
    } else {
        write_text(o.out, text);
    }
    for (const auto& r : result.residuals) {
        const bool mem = r.resource == hw::Resource::memory;
        const double scale = mem ? hw::kBytesPerMB : 1.0;
        char line[160];
        std::snprintf(line, sizeof(line), "%-8s target %14.6g  achieved %14.6g  residual %+.3e\n",
                      hw::resource_name(r.resource), r.target / scale, r.achieved / scale, r.relative);
        (o.out.empty() ? std::cerr : std::cout) << line;
    }
    (o.out.empty() ? std::cerr : std::cout) << "max |residual| " << format_double(result.max_abs_relative) << "\n";
}

} // namespace

void register_report(CLI::App& app, Action& action) {
    auto o = std::make_shared<ReportOptions>();
    auto* sub = app.add_subcommand("report", "Hardware resource and performance report for a network");
    sub->add_option("--spec", o->spec, "Network spec file or shipped spec name");
    sub->add_option("--cost", o->cost, "Cost table JSON (from calibrate)");
    sub->add_option("--budget", o->budget, "Platform budget JSON (default: XCZU7EV)");
    sub->add_option("--accuracy", o->accuracy, "Measured accuracy as a fraction, shown in the report")
        ->check(CLI::Range(0.0, 1.0));
    sub->add_option("--format", o->format, "Output format")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();
    auto* fixtures_opt = sub->add_option("--paper-fixtures", o->fixture_set,
                                         "Render the shipped reference fixtures: bcu, fcu or all (default all)")
                             ->expected(0, 1)
                             ->check(CLI::IsMember({"bcu", "fcu", "all"}));
    sub->callback([o, fixtures_opt, &action] {
        o->fixtures_given = fixtures_opt->count() > 0;
        if (o->fixtures_given && o->fixture_set.empty()) {
            o->fixture_set = "all";
        }
        action = [o] { run_report(*o); };
    });
}

void register_compare(CLI::App& app, Action& action) {
    auto o = std::make_shared<CompareOptions>();
    auto* sub = app.add_subcommand("compare", "Compare design points against the first one");
    sub->add_option("--designs", o->designs, "Design point JSON files; the first is the baseline");
    sub->add_flag("--paper-fixtures", o->use_fixtures, "Start with the shipped digital CMOS and mixed-signal designs");
    sub->add_option("--format", o->format, "Output format")
        ->check(CLI::IsMember({"text", "csv", "json"}))
        ->capture_default_str();
    sub->callback([o, &action] {
        if (o->designs.size() + (o->use_fixtures ? 2 : 0) < 2) {
            throw UsageError("compare needs at least two designs");
        }
        action = [o] { run_compare(*o); };
    });
}

void register_calibrate(CLI::App& app, Action& action) {
    auto o = std::make_shared<CalibrateOptions>();
    auto* sub = app.add_subcommand("calibrate", "Fit a cost table to target resource totals");
    sub->add_option("--targets", o->targets, "Targets JSON: lut, memory_mb, io, dsp, latency_ms, power_eff_gops_per_w")
        ->required();
    sub->add_option("--spec", o->spec, "Network spec file or shipped spec name")->required();
    sub->add_option("--base", o->base, "Starting cost table (default coefficients otherwise)");
    sub->add_option("--out", o->out, "Write the cost table here instead of stdout");
    sub->callback([o, &action] { action = [o] { run_calibrate(*o); }; });
}

} // namespace neurosim::cli
