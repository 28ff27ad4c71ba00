// SPDX-License-Identifier: Apache-2.0

#ifndef NEUROSIM_TRAINING_TRAINER_HPP
#define NEUROSIM_TRAINING_TRAINER_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "neurosim/dataio/dataset.hpp"
#include "neurosim/error.hpp"
#include "neurosim/format.hpp"
#include "neurosim/snn/forward.hpp"
#include "neurosim/snn/network.hpp"
#include "neurosim/training/adam.hpp"
#include "neurosim/training/backward.hpp"

namespace neurosim::training {

struct TrainConfig {
    std::size_t epochs = 20;
    std::size_t batch_size = 16;
    std::uint64_t seed = 7;
    double lr = 1e-3;
    std::size_t eval_every = 1;
    SurrogateParams surrogate;
    std::size_t threads = 1;

    void validate() const {
        if (epochs < 1) {
            throw ConfigError("epochs must be >= 1");
        }
        if (batch_size < 1) {
            throw ConfigError("batch size must be >= 1");
        }
        if (eval_every < 1) {
            throw ConfigError("eval_every must be >= 1");
        }
        if (!(lr >= 0.0)) {
            throw ConfigError("learning rate must be nonnegative");
        }
        surrogate.validate();
    }
};

struct EpochRecord {
    std::size_t epoch = 0; // 1-based
    double train_loss = 0.0;
    std::optional<double> train_acc;
    std::optional<double> test_acc;
    friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct TrainResult {
    snn::WeightSet weights;
    std::vector<EpochRecord> history;
};

/// Fraction of samples whose predicted class (ties to the lowest index)
/// matches the label. Inference only.
inline double evaluate_accuracy(const snn::NetworkSpec& spec, const snn::WeightSet& weights,
                                const dataio::Dataset& data) {
    if (data.empty()) {
        throw ConfigError("cannot evaluate on an empty dataset");
    }
    std::size_t correct = 0;
    for (const auto& s : data.samples) {
        const auto out = snn::network_forward(spec, weights, s.image);
        correct += snn::predict_class(out.logits) == s.label ? 1 : 0;
    }
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

inline void check_dataset_matches(const snn::NetworkSpec& spec, const dataio::Dataset& data) {
    if (data.num_classes != spec.num_classes) {
        throw ConfigError("dataset has " + std::to_string(data.num_classes) + " classes but network '" + spec.name +
                          "' has " + std::to_string(spec.num_classes));
    }
    for (const auto& s : data.samples) {
        if (s.label >= spec.num_classes) {
            throw ConfigError("sample label " + std::to_string(s.label) + " exceeds the network's class count");
        }
    }
}

/// Mini-batch training: per-epoch seeded shuffle, mean batch gradient, one
/// Adam step per batch. Accuracy is evaluated in inference mode every
/// eval_every epochs and after the last one.
inline TrainResult train(const snn::NetworkSpec& spec, const dataio::Dataset& train_set,
                         const dataio::Dataset* test_set, const TrainConfig& config,
                         std::optional<snn::WeightSet> initial = std::nullopt) {
    config.validate();
    snn::validate(spec);
    if (train_set.empty()) {
        throw ConfigError("training dataset is empty");
    }
    check_dataset_matches(spec, train_set);
    if (test_set != nullptr && !test_set->empty()) {
        check_dataset_matches(spec, *test_set);
    }

    TrainResult result;
    result.weights = initial ? std::move(*initial) : snn::init_weights(spec, config.seed);
    snn::check_weights(spec, result.weights);
    AdamState adam = AdamState::for_weights(result.weights, config.lr);

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        const auto order = dataio::epoch_order(train_set.size(), config.seed, epoch, true);
        double loss_sum = 0.0;
        for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
            const std::size_t end = std::min(begin + config.batch_size, order.size());
            std::vector<const Tensor*> inputs;
            std::vector<std::size_t> labels;
            for (std::size_t i = begin; i < end; ++i) {
                inputs.push_back(&train_set.samples[order[i]].image);
                labels.push_back(train_set.samples[order[i]].label);
            }
            const BatchGradient bg =
                batch_backward(spec, result.weights, inputs, labels, config.surrogate, config.threads);
            loss_sum += bg.mean_loss * static_cast<double>(end - begin);
            adam_update(result.weights, bg.grads, adam);
        }

        EpochRecord record;
        record.epoch = epoch;
        record.train_loss = loss_sum / static_cast<double>(order.size());
        if (epoch % config.eval_every == 0 || epoch == config.epochs) {
            record.train_acc = evaluate_accuracy(spec, result.weights, train_set);
            if (test_set != nullptr && !test_set->empty()) {
                record.test_acc = evaluate_accuracy(spec, result.weights, *test_set);
            }
        }
        result.history.push_back(record);
    }
    return result;
}

/// epoch,train_loss,train_acc,test_acc; fields not evaluated are empty.
inline void write_history_csv(std::ostream& out, const std::vector<EpochRecord>& history) {
    out << "epoch,train_loss,train_acc,test_acc\n";
    for (const auto& r : history) {
        out << r.epoch << ',' << format_double(r.train_loss) << ','
            << (r.train_acc ? format_double(*r.train_acc) : "") << ','
            << (r.test_acc ? format_double(*r.test_acc) : "") << '\n';
    }
}

} // namespace neurosim::training

#endif // NEUROSIM_TRAINING_TRAINER_HPP
