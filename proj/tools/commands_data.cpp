// SPDX-License-Identifier: Apache-2.0
//
// synth, train and eval subcommands.

#include <array>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include "cli.hpp"
#include "neurosim/dataio/dataset.hpp"
#include "neurosim/dataio/synth.hpp"
#include "neurosim/training/checkpoint.hpp"
#include "neurosim/training/trainer.hpp"

namespace neurosim::cli {

namespace {

// --- synth ------------------------------------------------------------------

struct SynthOptions {
    std::size_t classes = 2;
    std::size_t n = 100;
    std::string out;
    std::uint64_t seed = 7;
    std::size_t size = 16;
};

void run_synth(const SynthOptions& o) {
    const std::size_t channels = o.classes == 2 ? 1 : 3;
    auto synth = dataio::synth_blobs(o.n, o.classes, {channels, o.size, o.size}, o.seed);
    ensure_directory(o.out);
    dataio::write_dataset(o.out, synth);
    write_run_json(o.out, "synth",
                   {{"classes", o.classes}, {"n", o.n}, {"seed", o.seed}, {"size", o.size}, {"channels", channels}});
    std::cout << "wrote " << synth.manifest.entries.size() << " images (" << o.classes << " classes) to " << o.out
              << "\n";
}

// --- shared by train and eval -----------------------------------------------

dataio::Dataset load_for_spec(const std::string& dir, const snn::NetworkSpec& spec) {
    auto manifest = dataio::read_manifest(dir);
    if (manifest.num_classes != spec.num_classes) {
        throw ConfigError("dataset " + dir + " has " + std::to_string(manifest.num_classes) + " classes but network '" +
                          spec.name + "' has " + std::to_string(spec.num_classes));
    }
    if (manifest.channels != spec.input_shape[0]) {
        throw ConfigError("dataset " + dir + " has " + std::to_string(manifest.channels) +
                          " channels but network '" + spec.name + "' expects " + std::to_string(spec.input_shape[0]));
    }
    const auto pre = dataio::PreprocessSpec::uniform(spec.input_shape[1], spec.input_shape[2], spec.input_shape[0]);
    return dataio::load_dataset(manifest, pre);
}

// --- train ------------------------------------------------------------------

struct TrainOptions {
    std::string spec = "bcu-mini";
    std::string data;
    std::string out;
    std::size_t epochs = 20;
    std::size_t batch_size = 16;
    double lr = 1e-3;
    double train_fraction = 0.8;
    std::size_t eval_every = 1;
    std::size_t threads = 1;
    std::uint64_t seed = 7;
};

void run_train(const TrainOptions& o) {
    const auto spec_path = resolve_spec_path(o.spec);
    require_file(std::filesystem::path(o.data) / dataio::kManifestName, "dataset manifest");
    const snn::NetworkSpec spec = snn::load_spec(spec_path);
    const dataio::Dataset all = load_for_spec(o.data, spec);
    const auto [train_set, test_set] = dataio::split_dataset(all, o.train_fraction, o.seed);

    training::TrainConfig config;
    config.epochs = o.epochs;
    config.batch_size = o.batch_size;
    config.lr = o.lr;
    config.seed = o.seed;
    config.eval_every = o.eval_every;
    config.threads = o.threads;
    ensure_directory(o.out);

    const auto result = training::train(spec, train_set, &test_set, config);

    const std::filesystem::path out(o.out);
    training::save_checkpoint(result.weights, spec, out / "model.nsnn");
    std::ostringstream history;
    training::write_history_csv(history, result.history);
    write_text(out / "history.csv", history.str());
    write_run_json(out, "train",
                   {{"spec", spec_path.string()},
                    {"network", snn::spec_to_json(spec)},
                    {"data", o.data},
                    {"epochs", o.epochs},
                    {"batch_size", o.batch_size},
                    {"lr", o.lr},
                    {"train_fraction", o.train_fraction},
                    {"eval_every", o.eval_every},
                    {"seed", o.seed},
                    {"n_train", train_set.size()},
                    {"n_test", test_set.size()}});

    const auto& last = result.history.back();
    std::cout << "epochs " << o.epochs << "  loss " << format_double(last.train_loss) << "  train_acc "
              << (last.train_acc ? format_double(*last.train_acc) : "-") << "  test_acc "
              << (last.test_acc ? format_double(*last.test_acc) : "-") << "\n";
}

// --- eval -------------------------------------------------------------------

struct EvalOptions {
    std::string spec;
    std::string weights;
    std::string data;
    std::string split = "all";
    double train_fraction = 0.8;
    std::uint64_t seed = 7;
};

void run_eval(const EvalOptions& o) {
    require_file(o.weights, "checkpoint");
    require_file(std::filesystem::path(o.data) / dataio::kManifestName, "dataset manifest");
    training::Checkpoint ck = training::load_checkpoint(o.weights);
    if (!o.spec.empty()) {
        const snn::NetworkSpec spec = resolve_spec(o.spec);
        if (snn::spec_to_json(spec) != snn::spec_to_json(ck.spec)) {
            throw ConfigError("checkpoint " + o.weights + " was saved for network '" + ck.spec.name +
                              "', which differs from spec " + o.spec);
        }
    }
    dataio::Dataset data = load_for_spec(o.data, ck.spec);
    if (o.split != "all") {
        auto [train_set, test_set] = dataio::split_dataset(data, o.train_fraction, o.seed);
        data = o.split == "train" ? std::move(train_set) : std::move(test_set);
    }
    if (data.empty()) {
        throw ConfigError("no samples to evaluate in split '" + o.split + "'");
    }
    const double acc = training::evaluate_accuracy(ck.spec, ck.weights, data);
    std::cout << "{\"accuracy\": " << format_double(acc) << ", \"n\": " << data.size() << "}\n";
}

} // namespace

void register_synth(CLI::App& app, Action& action) {
    auto o = std::make_shared<SynthOptions>();
    auto* sub = app.add_subcommand("synth", "Generate a synthetic blob image dataset");
    sub->add_option("--classes", o->classes, "Number of classes (2: grayscale, 10: RGB)")
        ->check(CLI::IsMember({2, 10}))
        ->capture_default_str();
    sub->add_option("--n", o->n, "Images per class")->check(kAtLeastOne)->capture_default_str();
    sub->add_option("--out", o->out, "Output directory")->required();
    sub->add_option("--size", o->size, "Image height and width")->check(kAtLeastOne)->capture_default_str();
    seed_option(sub, o->seed);
    sub->callback([o, &action] { action = [o] { run_synth(*o); }; });
}

void register_train(CLI::App& app, Action& action) {
    auto o = std::make_shared<TrainOptions>();
    auto* sub = app.add_subcommand("train", "Train a spiking network on a dataset directory");
    sub->add_option("--spec", o->spec, "Network spec file or shipped spec name")->capture_default_str();
    sub->add_option("--data", o->data, "Dataset directory containing manifest.csv")->required();
    sub->add_option("--out", o->out, "Output directory for model.nsnn, history.csv, run.json")->required();
    sub->add_option("--epochs", o->epochs, "Training epochs")->check(kAtLeastOne)->capture_default_str();
    sub->add_option("--batch-size", o->batch_size, "Mini-batch size")
        ->check(kAtLeastOne)
        ->capture_default_str();
    sub->add_option("--lr", o->lr, "Adam learning rate")->check(CLI::NonNegativeNumber)->capture_default_str();
    sub->add_option("--train-fraction", o->train_fraction, "Fraction of samples in the training split")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    sub->add_option("--eval-every", o->eval_every, "Evaluate accuracy every N epochs")
        ->check(kAtLeastOne)
        ->capture_default_str();
    sub->add_option("--threads", o->threads, "Worker threads for per-sample gradients")
        ->check(kAtLeastOne)
        ->capture_default_str();
    seed_option(sub, o->seed);
    sub->callback([o, &action] {
        if (o->train_fraction <= 0.0) {
            throw UsageError("--train-fraction must be greater than 0");
        }
        action = [o] { run_train(*o); };
    });
}

void register_eval(CLI::App& app, Action& action) {
    auto o = std::make_shared<EvalOptions>();
    auto* sub = app.add_subcommand("eval", "Measure accuracy of a checkpoint on a dataset");
    sub->add_option("--weights", o->weights, "Checkpoint file (model.nsnn)")->required();
    sub->add_option("--data", o->data, "Dataset directory containing manifest.csv")->required();
    sub->add_option("--spec", o->spec, "Spec the checkpoint must match (optional)");
    sub->add_option("--split", o->split, "Which samples to score: all, or the train/test split made by train")
        ->check(CLI::IsMember({"all", "train", "test"}))
        ->capture_default_str();
    sub->add_option("--train-fraction", o->train_fraction, "Split fraction used by train")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    seed_option(sub, o->seed);
    sub->callback([o, &action] {
        if (o->train_fraction <= 0.0) {
            throw UsageError("--train-fraction must be greater than 0");
        }
        action = [o] { run_eval(*o); };
    });
}

} // namespace neurosim::cli
