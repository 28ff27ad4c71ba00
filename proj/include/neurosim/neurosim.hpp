// SPDX-License-Identifier: Apache-2.0
//
// Umbrella header.

#ifndef NEUROSIM_NEUROSIM_HPP
#define NEUROSIM_NEUROSIM_HPP

#include "neurosim/error.hpp"
#include "neurosim/format.hpp"
#include "neurosim/rng.hpp"
#include "neurosim/tensor.hpp"

#include "neurosim/snn/forward.hpp"
#include "neurosim/snn/layers.hpp"
#include "neurosim/snn/network.hpp"
#include "neurosim/snn/spec_json.hpp"

#include "neurosim/training/adam.hpp"
#include "neurosim/training/backward.hpp"
#include "neurosim/training/checkpoint.hpp"
#include "neurosim/training/loss.hpp"
#include "neurosim/training/trainer.hpp"

#include "neurosim/dataio/dataset.hpp"
#include "neurosim/dataio/pnm.hpp"
#include "neurosim/dataio/preprocess.hpp"
#include "neurosim/dataio/synth.hpp"

#include "neurosim/mixed_signal/analog_loop.hpp"
#include "neurosim/mixed_signal/converters.hpp"
#include "neurosim/mixed_signal/crc8.hpp"
#include "neurosim/mixed_signal/spi.hpp"

#include "neurosim/hw/calibrate.hpp"
#include "neurosim/hw/compare.hpp"
#include "neurosim/hw/macs.hpp"
#include "neurosim/hw/perf.hpp"
#include "neurosim/hw/report_io.hpp"
#include "neurosim/hw/resources.hpp"

#endif // NEUROSIM_NEUROSIM_HPP
