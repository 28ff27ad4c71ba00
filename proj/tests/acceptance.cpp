// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Each criterion also has a wall-clock budget.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "neurosim/hw/macs.hpp"
#include "neurosim/mixed_signal/converters.hpp"
#include "neurosim/mixed_signal/spi.hpp"
#include "neurosim/snn/forward.hpp"
#include "neurosim/training/backward.hpp"
#include "neurosim/training/loss.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace neurosim;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

// --- helpers ----------------------------------------------------------------

struct Run {
    int code = -1;
    std::string out;
};

Run cli(const std::string& args) {
    const std::string cmd = std::string(NEUROSIM_CLI) + " " + args + " 2>/dev/null";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) return r;
    char buf[4096];
    std::size_t n = 0;
    while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

const fs::path kWork = fs::temp_directory_path() / "neurosim_acceptance";
const fs::path kFixtures = fs::path(NEUROSIM_DATA_DIR) / "fixtures";

std::string fmt(const char* f, double v) {
    char b[64];
    std::snprintf(b, sizeof(b), f, v);
    return b;
}

void fail(Outcome& o, const std::string& why) {
    o.pass = false;
    o.detail += (o.detail.empty() ? "" : "; ") + why;
}

// --- 1: LIF closed form ------------------------------------------------------

Outcome lif_closed_form() {
    Outcome o;
    snn::LifParams p;
    snn::LifState st = snn::LifState::zeros({1});
    const Tensor input({1}, 0.2);
    int first = -1;
    double worst = 0.0;
    for (int t = 1; t <= 20 && first < 0; ++t) {
        st = snn::lif_step(st, input, p);
        if (st.s_prev[0] == 1.0) {
            first = t;
            break;
        }
        worst = std::max(worst, std::abs(st.v[0] - 0.2 * (1.0 - std::pow(0.9, t)) / 0.1));
    }
    if (first != 7) fail(o, "first spike at step " + std::to_string(first));
    if (worst > 1e-12) fail(o, "trace error " + fmt("%.3g", worst));
    o.detail = "first spike step " + std::to_string(first) + ", max trace error " + fmt("%.3g", worst) +
               (o.detail.empty() ? "" : "; " + o.detail);
    return o;
}

// --- 2: conv/linear vs loop oracles ------------------------------------------

Outcome kernel_oracles() {
    Outcome o;
    std::mt19937_64 gen(2024);
    auto pick = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(gen); };
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const std::size_t k = pick(1, 5), s = pick(1, 3), pad = pick(0, k / 2);
        const snn::Conv2dLayer layer{pick(1, 4), pick(1, 6), k, s, pad};
        const std::size_t h = pick(k, 12), w = pick(k, 12);
        const Tensor x = oracle::random_tensor({layer.in_channels, h, w}, gen);
        const Tensor wt = oracle::random_tensor({layer.out_channels, layer.in_channels, k, k}, gen);
        const Tensor b = oracle::random_tensor({layer.out_channels}, gen);
        Tensor mag;
        const Tensor want = oracle::conv2d(x, wt, b, layer, nullptr, &mag);
        const Tensor got = snn::conv2d_forward(x, wt, b, layer);
        if (got.shape() != want.shape()) {
            fail(o, "conv shape mismatch");
            continue;
        }
        for (std::size_t j = 0; j < got.size(); ++j) worst = std::max(worst, oracle::rel_err(got[j], want[j], mag[j]));
    }
    for (int i = 0; i < 100; ++i) {
        const std::size_t in = pick(1, 64), out = pick(1, 16);
        const Tensor x = oracle::random_tensor({in}, gen);
        const Tensor wt = oracle::random_tensor({out, in}, gen);
        const Tensor b = oracle::random_tensor({out}, gen);
        Tensor mag;
        const Tensor want = oracle::linear(x, wt, b, nullptr, &mag);
        const Tensor got = snn::linear_forward(x, wt, b);
        for (std::size_t j = 0; j < out; ++j) worst = std::max(worst, oracle::rel_err(got[j], want[j], mag[j]));
    }
    if (worst > 1e-12) fail(o, "relative error " + fmt("%.3g", worst));
    o.detail = "100 conv + 100 linear layers, max relative error " + fmt("%.3g", worst) +
               (o.pass ? "" : "; " + o.detail);
    return o;
}

// --- 3: gradient checks ------------------------------------------------------

double bypassed_fd_error() {
    snn::NetworkSpec spec;
    spec.timesteps = 3;
    spec.input_shape = {2, 5, 5};
    spec.num_classes = 3;
    spec.layers = {snn::Conv2dLayer{2, 3, 3, 2, 1}, snn::LifLayer{}, snn::FlattenLayer{}, snn::LinearLayer{27, 6},
                   snn::LifLayer{}, snn::LinearLayer{6, 3}};
    const snn::ForwardOptions opts{true};
    std::mt19937_64 gen(77);
    double worst = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
        auto w = snn::init_weights(spec, 500 + trial);
        for (auto& [i, lw] : w.layers) lw.bias = oracle::random_tensor(lw.bias.shape(), gen, -0.2, 0.2);
        const Tensor x = oracle::random_tensor({2, 5, 5}, gen);
        const std::size_t label = gen() % 3;
        const auto r = training::backward(spec, w, x, label, {}, opts);
        auto loss = [&] { return training::cross_entropy(snn::network_forward(spec, w, x, opts).logits, label).loss; };
        for (auto& [index, lw] : w.layers) {
            for (int which = 0; which < 2; ++which) {
                Tensor& param = which == 0 ? lw.weight : lw.bias;
                const auto& g = which == 0 ? r.grads.layers.at(index).weight : r.grads.layers.at(index).bias;
                for (std::size_t i = 0; i < param.size(); ++i) {
                    const double keep = param[i], h = 1e-5;
                    param[i] = keep + h;
                    const double lp = loss();
                    param[i] = keep - h;
                    const double lm = loss();
                    param[i] = keep;
                    const double fd = (lp - lm) / (2 * h);
                    // Below 1e-6 both values are round-off; compare absolutely there.
                    const double err = std::max(std::abs(fd), std::abs(g[i])) < 1e-6 ? std::abs(fd - g[i])
                                                                                      : oracle::rel_err(g[i], fd);
                    worst = std::max(worst, err);
                }
            }
        }
    }
    return worst;
}

double two_neuron_error() {
    snn::NetworkSpec spec;
    spec.timesteps = 2;
    spec.input_shape = {1, 1, 1};
    spec.num_classes = 2;
    spec.layers = {snn::FlattenLayer{}, snn::LinearLayer{1, 1}, snn::LifLayer{}, snn::LinearLayer{1, 2}};
    auto w = snn::zero_weights(spec);
    const double x = 1.0, w1 = 0.7, beta = 0.9, w2[2] = {0.5, -0.3}, b2[2] = {0.1, 0.0};
    w.layers.at(1).weight[0] = w1;
    for (int k = 0; k < 2; ++k) {
        w.layers.at(3).weight[k] = w2[k];
        w.layers.at(3).bias[k] = b2[k];
    }
    const double v1 = w1 * x, s1 = v1 >= 1.0;
    const double v2 = beta * v1 * (1 - s1) + w1 * x, s2 = v2 >= 1.0;
    double z[2], g[2];
    for (int k = 0; k < 2; ++k) z[k] = 0.5 * (w2[k] * (s1 + s2) + 2 * b2[k]);
    const double den = std::exp(z[0]) + std::exp(z[1]);
    for (int k = 0; k < 2; ++k) g[k] = std::exp(z[k]) / den - (k == 0);
    const double sg1 = std::abs(v1 - 1) < 0.5, sg2 = std::abs(v2 - 1) < 0.5;
    const double ds = 0.5 * (g[0] * w2[0] + g[1] * w2[1]);
    const double dv2 = ds * sg2, dv1 = ds * sg1 + dv2 * beta * (1 - s1);
    const auto r = training::backward(spec, w, Tensor({1, 1, 1}, x), 0);
    double worst = std::abs(r.grads.layers.at(1).weight[0] - (dv1 + dv2) * x);
    worst = std::max(worst, std::abs(r.grads.layers.at(1).bias[0] - (dv1 + dv2)));
    for (int k = 0; k < 2; ++k) {
        worst = std::max(worst, std::abs(r.grads.layers.at(3).weight[k] - g[k] * 0.5 * (s1 + s2)));
        worst = std::max(worst, std::abs(r.grads.layers.at(3).bias[k] - g[k]));
    }
    return worst;
}

Outcome gradients() {
    Outcome o;
    const double fd = bypassed_fd_error();
    const double hand = two_neuron_error();
    if (fd > 1e-5) fail(o, "finite-difference error too large");
    if (hand > 1e-10) fail(o, "hand-gradient error too large");
    o.detail = "finite differences " + fmt("%.3g", fd) + " (<= 1e-5), two-neuron oracle " + fmt("%.3g", hand) +
               " (<= 1e-10)" + (o.pass ? "" : "; " + o.detail);
    return o;
}

// --- 4: desk-scale training --------------------------------------------------

struct LastRow {
    double train_acc = -1, test_acc = -1;
};

LastRow last_history_row(const fs::path& csv) {
    const std::string text = slurp(csv);
    LastRow r;
    if (text.size() < 2) return r;
    std::stringstream row(text.substr(text.rfind('\n', text.size() - 2) + 1));
    std::string epoch, loss, tr, te;
    std::getline(row, epoch, ',');
    std::getline(row, loss, ',');
    std::getline(row, tr, ',');
    std::getline(row, te);
    if (!tr.empty()) r.train_acc = std::stod(tr);
    if (!te.empty()) r.test_acc = std::stod(te);
    return r;
}

std::string bcu_train_args(const fs::path& out) {
    return "train --spec bcu-mini --data " + q(kWork / "bcu-data") + " --epochs 20 --seed 7 --out " + q(out);
}

Outcome desk_training() {
    Outcome o;
    if (cli("synth --classes 2 --n 200 --seed 7 --out " + q(kWork / "bcu-data")).code != 0 ||
        cli("synth --classes 10 --n 100 --seed 7 --out " + q(kWork / "fcu-data")).code != 0) {
        fail(o, "synth failed");
        return o;
    }
    if (cli(bcu_train_args(kWork / "bcu-a")).code != 0) fail(o, "BCU training failed");
    if (cli("train --spec fcu-mini --data " + q(kWork / "fcu-data") + " --epochs 30 --seed 7 --out " +
            q(kWork / "fcu-a"))
            .code != 0)
        fail(o, "FCU training failed");
    const auto bcu = last_history_row(kWork / "bcu-a" / "history.csv");
    const auto fcu = last_history_row(kWork / "fcu-a" / "history.csv");
    if (bcu.train_acc < 0.95) fail(o, "BCU-mini train accuracy below 0.95");
    if (bcu.test_acc < 0.90) fail(o, "BCU-mini test accuracy below 0.90");
    if (fcu.train_acc < 0.80) fail(o, "FCU-mini train accuracy below 0.80");
    o.detail = "BCU-mini train " + fmt("%.4f", bcu.train_acc) + " test " + fmt("%.4f", bcu.test_acc) +
               ", FCU-mini train " + fmt("%.4f", fcu.train_acc) + (o.pass ? "" : "; " + o.detail);
    return o;
}

// --- 5: mixed-signal properties ----------------------------------------------

Outcome mixed_signal_properties() {
    using namespace mixed_signal;
    Outcome o;
    std::mt19937_64 gen(5);
    const AdcModel adc{12, -1.0, 1.0, 0.0, 0};
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double v = d(gen);
        worst = std::max(worst, std::abs(adc_code_voltage(adc, adc_quantize(adc, v)) - v) / adc.lsb());
    }
    if (worst > 0.5 + 1e-9) fail(o, "round-trip exceeds LSB/2");

    std::uint32_t prev = 0;
    for (int i = 0; i <= 100000; ++i) {
        const std::uint32_t c = adc_quantize(adc, -1.5 + 3.0 * i / 100000.0);
        if (c < prev) {
            fail(o, "quantizer not monotonic");
            break;
        }
        prev = c;
    }

    std::size_t codec_bad = 0, undetected = 0;
    for (int i = 0; i < 10000; ++i) {
        SpiFrame f;
        f.channel = static_cast<std::uint8_t>(gen() % 16);
        f.flags = static_cast<std::uint8_t>(gen() % 4);
        f.sample = static_cast<std::uint16_t>(gen());
        const std::uint32_t word = spi_encode(f);
        if (!(spi_decode(word) == f)) ++codec_bad;
        if (i < 1000) {
            for (int bit = 0; bit < 32; ++bit) {
                try {
                    spi_decode(word ^ (1U << bit));
                    ++undetected;
                } catch (const IntegrityError&) {
                } catch (const ProtocolError&) {
                }
            }
        }
    }
    if (codec_bad) fail(o, std::to_string(codec_bad) + " frames did not round-trip");
    if (undetected) fail(o, std::to_string(undetected) + " single-bit flips undetected");
    o.detail = "round-trip max " + fmt("%.4f", worst) + " LSB over 1e5 samples, 1e4 frames, 32000 bit flips all detected" +
               (o.pass ? "" : "; " + o.detail);
    return o;
}

// --- 6: reference tables -----------------------------------------------------

bool rel_within(double got, double want, double tol) { return std::abs(got - want) <= tol * std::abs(want); }

Outcome reference_tables() {
    Outcome o;
    const auto rep = cli("report --paper-fixtures --format json");
    const auto cmp = cli("compare --paper-fixtures --format json");
    if (rep.code != 0 || cmp.code != 0) {
        fail(o, "report/compare exited nonzero");
        return o;
    }
    const auto reports = nlohmann::json::parse(rep.out);
    const double used[2][4] = {{151200, 11.4, 139, 518}, {140000, 10.5, 130, 480}};
    const double avail[4] = {504000, 38, 464, 1728};
    const double perf[2][3] = {{1.35, 12, 20.0}, {1.2, 15, 18.5}};
    for (std::size_t d = 0; d < 2; ++d) {
        const auto& r = reports.at(d);
        for (std::size_t i = 0; i < 4; ++i) {
            const auto& row = r.at("resources").at(i);
            const double u = row.at("used").get<double>();
            // Memory is reported in MB and carries floating-point scaling; counts must be exact.
            if (i == 1 ? std::abs(u - used[d][i]) > 1e-9 : u != used[d][i])
                fail(o, r.at("name").get<std::string>() + " " + row.at("resource").get<std::string>() + " used " +
                            fmt("%.6g", u));
            if (std::abs(row.at("percent").get<double>() - 100.0 * used[d][i] / avail[i]) > 1e-9)
                fail(o, "percent column not computed from budget");
        }
        if (!rel_within(r.at("mac_gop").get<double>(), perf[d][0], 0.02)) fail(o, "GOP off");
        if (!rel_within(r.at("latency_ms").get<double>(), perf[d][1], 0.02)) fail(o, "latency off");
        if (!rel_within(r.at("power_eff_gops_per_w").get<double>(), perf[d][2], 0.02)) fail(o, "efficiency off");
    }
    const auto rows = nlohmann::json::parse(cmp.out);
    const double designs[2][3] = {{321, 12, 0.28}, {293, 0.75, 213}};
    for (std::size_t d = 0; d < 2; ++d) {
        const auto& row = rows.at(d);
        if (row.at("chip_area_mm2").get<double>() != designs[d][0] || row.at("latency_ms").get<double>() != designs[d][1] ||
            row.at("ee_tops_per_w").get<double>() != designs[d][2])
            fail(o, "design row " + std::to_string(d) + " differs");
    }
    const double speedup = rows.at(1).at("speedup").get<double>();
    const double gain = rows.at(1).at("ee_gain").get<double>();
    if (std::abs(speedup - 16.0) > 1e-12) fail(o, "speedup " + fmt("%.6g", speedup));
    if (std::abs(gain - 760.7) > 0.05) fail(o, "EE gain " + fmt("%.6g", gain));
    o.detail = "used values exact, GOP/latency/efficiency within 2%, speedup " + fmt("%.1f", speedup) + "x, EE gain " +
               fmt("%.1f", gain) + "x" + (o.pass ? "" : "; " + o.detail);
    return o;
}

// --- 7: MAC counter ----------------------------------------------------------

Outcome mac_counter() {
    Outcome o;
    std::mt19937_64 gen(7);
    int mismatches = 0;
    for (int i = 0; i < 50; ++i) {
        const auto spec = oracle::random_spec(gen, 16);
        mismatches += hw::count_macs(spec).total_macs != oracle::instrumented_macs(spec, snn::init_weights(spec, i));
    }
    if (mismatches) fail(o, std::to_string(mismatches) + " of 50 specs differ");
    o.detail = "50 random specs, exact integer agreement" + (o.pass ? "" : "; " + o.detail);
    return o;
}

// --- 8: reproducibility ------------------------------------------------------

Outcome reproducibility() {
    Outcome o;
    std::vector<std::string> compared;
    auto same = [&](const fs::path& a, const fs::path& b, const std::string& what) {
        compared.push_back(what);
        if (!fs::is_regular_file(a) || slurp(a) != slurp(b)) fail(o, what + " differs between runs");
    };

    cli("synth --classes 2 --n 200 --seed 7 --out " + q(kWork / "bcu-data-b"));
    for (const auto& e : fs::recursive_directory_iterator(kWork / "bcu-data"))
        if (e.is_regular_file() && slurp(e.path()) != slurp(kWork / "bcu-data-b" / fs::relative(e.path(), kWork / "bcu-data")))
            fail(o, "synth output " + fs::relative(e.path(), kWork / "bcu-data").string() + " differs");
    compared.push_back("synth images + manifest");

    cli(bcu_train_args(kWork / "bcu-b"));
    same(kWork / "bcu-a" / "model.nsnn", kWork / "bcu-b" / "model.nsnn", "checkpoint");
    same(kWork / "bcu-a" / "history.csv", kWork / "bcu-b" / "history.csv", "history CSV");

    const std::string ms = "msrun --weights " + q(kWork / "bcu-a" / "model.nsnn") + " --input " +
                           q(kFixtures / "bcu-mini-vector.json") + " --adc-bits 8 --dac-bits 8 --adc-noise 0.01 --seed 7";
    cli(ms + " --frames-out " + q(kWork / "frames-a.bin") + " --out " + q(kWork / "msrun-a.json"));
    cli(ms + " --frames-out " + q(kWork / "frames-b.bin") + " --out " + q(kWork / "msrun-b.json"));
    same(kWork / "frames-a.bin", kWork / "frames-b.bin", "frame log");
    same(kWork / "msrun-a.json", kWork / "msrun-b.json", "msrun report");

    for (const char* cmd : {"report --paper-fixtures --format json", "compare --paper-fixtures --format csv"})
        if (cli(cmd).out != cli(cmd).out) fail(o, std::string(cmd) + " output differs");
    compared.push_back("report/compare output");

    std::string list;
    for (const auto& c : compared) list += (list.empty() ? "" : ", ") + c;
    o.detail = "byte-identical: " + list + (o.pass ? "" : "; " + o.detail);
    return o;
}

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> check;
};

} // namespace

int main() {
    fs::remove_all(kWork);
    fs::create_directories(kWork);
    const std::vector<Criterion> criteria = {
        {1, "LIF closed form", 1, lif_closed_form},
        {2, "conv/linear oracle equivalence", 10, kernel_oracles},
        {3, "gradient checks", 30, gradients},
        {4, "desk-scale training", 300, desk_training},
        {5, "mixed-signal properties", 10, mixed_signal_properties},
        {6, "reference table reproduction", 1, reference_tables},
        {7, "MAC counter", 10, mac_counter},
        {8, "reproducibility", 300, reproducibility},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            fail(o, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (secs > c.budget_s) fail(o, "took " + fmt("%.2f", secs) + " s, budget " + fmt("%.0f", c.budget_s) + " s");
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << c.id << ": " << c.name << " ("
                  << fmt("%.2f", secs) << " s) " << o.detail << std::endl;
    }
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
    return failed == 0 ? 0 : 1;
}
