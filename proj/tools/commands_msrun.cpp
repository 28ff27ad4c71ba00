// SPDX-License-Identifier: Apache-2.0
//
// msrun: one inference through the modeled ADC -> network -> DAC loop.

#include <algorithm>
#include <cmath>
#include <iostream>
#include <memory>
#include <string>

#include "cli.hpp"
#include "neurosim/dataio/pnm.hpp"
#include "neurosim/dataio/preprocess.hpp"
#include "neurosim/format.hpp"
#include "neurosim/mixed_signal/analog_loop.hpp"
#include "neurosim/training/checkpoint.hpp"

namespace neurosim::cli {

namespace {

struct MsrunOptions {
    std::string spec;
    std::string weights;
    std::string input;
    unsigned adc_bits = 12;
    unsigned dac_bits = 12;
    double adc_min = -1.0;
    double adc_max = 1.0;
    double dac_min = -16.0;
    double dac_max = 16.0;
    double adc_noise = 0.0;
    std::uint64_t seed = 7;
    std::string frames_out;
    bool hex = false;
    std::string out;
};

// JSON input is a flat array of voltages or {"shape": [...], "values": [...]};
// PNM input is preprocessed like a dataset image.
Tensor read_input(const std::string& path, const snn::NetworkSpec& spec) {
    require_file(path, "input");
    const std::string ext = std::filesystem::path(path).extension().string();
    if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") {
        const auto pre = dataio::PreprocessSpec::uniform(spec.input_shape[1], spec.input_shape[2], spec.input_shape[0]);
        return dataio::preprocess(dataio::read_pnm(std::filesystem::path(path)), pre);
    }
    nlohmann::json j;
    try {
        std::ifstream in(path);
        j = nlohmann::json::parse(in);
        const nlohmann::json& values = j.is_object() ? j.at("values") : j;
        std::vector<double> data = values.get<std::vector<double>>();
        const Shape shape = spec.input_tensor_shape();
        if (data.size() != shape_numel(shape)) {
            throw ConfigError("input " + path + " has " + std::to_string(data.size()) + " values, network expects " +
                              shape_to_string(shape));
        }
        return Tensor(shape, std::move(data));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("input " + path + ": " + e.what());
    }
}

nlohmann::json to_json_array(std::span<const double> v) { return nlohmann::json(std::vector<double>(v.begin(), v.end())); }

void run_msrun(const MsrunOptions& o) {
    require_file(o.weights, "checkpoint");
    training::Checkpoint ck = training::load_checkpoint(o.weights);
    if (!o.spec.empty()) {
        const snn::NetworkSpec spec = resolve_spec(o.spec);
        if (snn::spec_to_json(spec) != snn::spec_to_json(ck.spec)) {
            throw ConfigError("checkpoint " + o.weights + " was saved for network '" + ck.spec.name +
                              "', which differs from spec " + o.spec);
        }
    }
    const Tensor input = read_input(o.input, ck.spec);

    mixed_signal::AdcModel adc{o.adc_bits, o.adc_min, o.adc_max, o.adc_noise, o.seed};
    mixed_signal::DacModel dac{o.dac_bits, o.dac_min, o.dac_max};
    const auto loop = mixed_signal::analog_loop(ck.spec, ck.weights, input, adc, dac);
    const auto digital = snn::network_forward(ck.spec, ck.weights, input);

    double max_network_delta = 0.0;
    double max_delta = 0.0;
    for (std::size_t k = 0; k < digital.logits.size(); ++k) {
        max_network_delta = std::max(max_network_delta, std::abs(loop.forward.logits[k] - digital.logits[k]));
        max_delta = std::max(max_delta, std::abs(loop.output_volts[k] - digital.logits[k]));
    }

    // Re-decode the log as a receiver would.
    std::size_t crc_failures = 0;
    std::size_t protocol_errors = 0;
    const std::size_t n_in = input.size();
    for (std::size_t i = 0; i < loop.frames.size(); ++i) {
        try {
            (void)mixed_signal::spi_decode(loop.frames[i], i < n_in ? o.adc_bits : o.dac_bits);
        } catch (const IntegrityError&) {
            ++crc_failures;
        } catch (const ProtocolError&) {
            ++protocol_errors;
        }
    }

    if (!o.frames_out.empty()) {
        if (o.hex) {
            write_text(o.frames_out, mixed_signal::frames_to_hex(loop.frames));
        } else {
            write_text(o.frames_out, mixed_signal::frames_to_binary(loop.frames), true);
        }
    }

    nlohmann::json report = {
        {"network", ck.spec.name},
        {"adc_bits", o.adc_bits},
        {"dac_bits", o.dac_bits},
        {"digital_logits", to_json_array(digital.logits.values())},
        {"mixed_logits", to_json_array(loop.forward.logits.values())},
        {"dac_codes", loop.output_codes},
        {"dac_volts", loop.output_volts},
        {"digital_class", snn::predict_class(digital.logits)},
        {"mixed_class", snn::predict_class(loop.forward.logits)},
        {"max_abs_delta_network_logit", max_network_delta},
        {"max_abs_delta_logit", max_delta},
        {"frames", loop.frames.size()},
        {"crc_failures", crc_failures},
        {"protocol_errors", protocol_errors},
    };
    const std::string text = report.dump(2) + "\n";
    if (!o.out.empty()) {
        write_text(o.out, text);
    }
    std::cout << text;
}

} // namespace

void register_msrun(CLI::App& app, Action& action) {
    auto o = std::make_shared<MsrunOptions>();
    auto* sub = app.add_subcommand("msrun", "Run one input through the ADC -> network -> DAC loop");
    sub->add_option("--weights", o->weights, "Checkpoint file (model.nsnn)")->required();
    sub->add_option("--input", o->input, "Input voltages (.json) or image (.pgm/.ppm)")->required();
    sub->add_option("--spec", o->spec, "Spec the checkpoint must match (optional)");
    sub->add_option("--adc-bits", o->adc_bits, "ADC resolution")->check(CLI::Range(4U, 16U))->capture_default_str();
    sub->add_option("--dac-bits", o->dac_bits, "DAC resolution")->check(CLI::Range(4U, 16U))->capture_default_str();
    sub->add_option("--adc-min", o->adc_min, "ADC input range lower bound (V)")->capture_default_str();
    sub->add_option("--adc-max", o->adc_max, "ADC input range upper bound (V)")->capture_default_str();
    sub->add_option("--dac-min", o->dac_min, "DAC output range lower bound (V)")->capture_default_str();
    sub->add_option("--dac-max", o->dac_max, "DAC output range upper bound (V)")->capture_default_str();
    sub->add_option("--adc-noise", o->adc_noise, "Gaussian ADC input noise sigma (V)")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    sub->add_option("--frames-out", o->frames_out, "Write the SPI frame log here");
    sub->add_flag("--hex", o->hex, "Frame log as hex text, one word per line (default: big-endian binary)");
    sub->add_option("--out", o->out, "Also write the JSON report to this file");
    seed_option(sub, o->seed);
    sub->callback([o, &action] {
        if (!(o->adc_min < o->adc_max) || !(o->dac_min < o->dac_max)) {
            throw UsageError("converter ranges need min < max");
        }
        action = [o] { run_msrun(*o); };
    });
}

} // namespace neurosim::cli
