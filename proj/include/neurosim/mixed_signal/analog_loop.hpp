// SPDX-License-Identifier: Apache-2.0
//
// End-to-end converter chain around the digital network:
//
//   analog input --ADC--> codes --dequantize--> network_forward --> logits --DAC--> analog output
//
// Every converted value (input element or logit) is logged as one SPI frame.
// Input frames come first (ADC direction), then output frames (DAC
// direction); channel = element index mod 16 and the last frame of each burst
// carries the last-in-burst flag.

#ifndef NEUROSIM_MIXED_SIGNAL_ANALOG_LOOP_HPP
#define NEUROSIM_MIXED_SIGNAL_ANALOG_LOOP_HPP

#include <cstdint>
#include <vector>

#include "neurosim/error.hpp"
#include "neurosim/mixed_signal/converters.hpp"
#include "neurosim/mixed_signal/spi.hpp"
#include "neurosim/snn/forward.hpp"
#include "neurosim/snn/network.hpp"
#include "neurosim/tensor.hpp"

namespace neurosim::mixed_signal {

struct AnalogLoopResult {
    Tensor digital_input; // dequantized ADC output fed to the network
    snn::ForwardResult forward;
    std::vector<std::uint32_t> output_codes;
    std::vector<double> output_volts;
    std::vector<std::uint32_t> frames;
};

inline AnalogLoopResult analog_loop(const snn::NetworkSpec& spec, const snn::WeightSet& weights,
                                    const Tensor& analog_input, const AdcModel& adc, const DacModel& dac) {
    adc.validate();
    dac.validate();
    const Shape input_shape = spec.input_tensor_shape();
    if (analog_input.size() != shape_numel(input_shape)) {
        throw ContractViolation("analog input has " + std::to_string(analog_input.size()) +
                                " elements, network expects " + shape_to_string(input_shape));
    }

    AnalogLoopResult r;
    r.digital_input = Tensor(input_shape);
    const std::size_t n_in = analog_input.size();
    for (std::size_t i = 0; i < n_in; ++i) {
        const std::uint32_t code = adc_quantize(adc, analog_input[i], i);
        r.digital_input[i] = adc_code_voltage(adc, code);
        SpiFrame frame;
        frame.channel = static_cast<std::uint8_t>(i % 16);
        frame.flags = i + 1 == n_in ? kFlagLastInBurst : 0;
        frame.sample = left_justify(code, adc.bits);
        r.frames.push_back(spi_encode(frame, adc.bits));
    }

    r.forward = snn::network_forward(spec, weights, r.digital_input);

    const std::size_t n_out = r.forward.logits.size();
    for (std::size_t k = 0; k < n_out; ++k) {
        const std::uint32_t code = quantize(r.forward.logits[k], dac.bits, dac.v_min, dac.v_max);
        r.output_codes.push_back(code);
        r.output_volts.push_back(dac_reconstruct(dac, code));
        SpiFrame frame;
        frame.channel = static_cast<std::uint8_t>(k % 16);
        frame.flags = static_cast<std::uint8_t>(kFlagDac | (k + 1 == n_out ? kFlagLastInBurst : 0));
        frame.sample = left_justify(code, dac.bits);
        r.frames.push_back(spi_encode(frame, dac.bits));
    }
    return r;
}

} // namespace neurosim::mixed_signal

#endif // NEUROSIM_MIXED_SIGNAL_ANALOG_LOOP_HPP
