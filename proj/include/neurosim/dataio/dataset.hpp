// SPDX-License-Identifier: Apache-2.0
//
// In-memory datasets, the on-disk manifest, and epoch batching.
//
// Manifest format (CSV):
//
//   #classes=2,channels=1
//   class0/img_00000.pgm,0
//   class1/img_00000.pgm,1
//
// Paths are relative to the manifest's directory.

#ifndef NEUROSIM_DATAIO_DATASET_HPP
#define NEUROSIM_DATAIO_DATASET_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "neurosim/dataio/pnm.hpp"
#include "neurosim/dataio/preprocess.hpp"
#include "neurosim/error.hpp"
#include "neurosim/rng.hpp"
#include "neurosim/tensor.hpp"

namespace neurosim::dataio {

struct Sample {
    Tensor image; // [C,H,W]
    std::size_t label = 0;
    friend bool operator==(const Sample&, const Sample&) = default;
};

struct Dataset {
    std::vector<Sample> samples;
    std::size_t num_classes = 0;
    std::size_t channels = 0;

    [[nodiscard]] std::size_t size() const noexcept { return samples.size(); }
    [[nodiscard]] bool empty() const noexcept { return samples.empty(); }
    friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct ManifestEntry {
    std::string path;
    std::size_t label = 0;
    friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct DatasetManifest {
    std::filesystem::path root;
    std::vector<ManifestEntry> entries;
    std::size_t num_classes = 0;
    std::size_t channels = 0;

    void validate() const {
        if (entries.empty()) {
            throw ConfigError("dataset manifest has no entries");
        }
        for (const auto& e : entries) {
            if (e.label >= num_classes) {
                throw ConfigError("manifest entry " + e.path + " has label " + std::to_string(e.label) +
                                  " but the dataset declares " + std::to_string(num_classes) + " classes");
            }
        }
    }
};

inline constexpr const char* kManifestName = "manifest.csv";

inline std::string format_manifest(const DatasetManifest& manifest) {
    std::ostringstream out;
    out << "#classes=" << manifest.num_classes << ",channels=" << manifest.channels << '\n';
    for (const auto& e : manifest.entries) {
        out << e.path << ',' << e.label << '\n';
    }
    return out.str();
}

inline DatasetManifest parse_manifest(std::istream& in, const std::filesystem::path& root) {
    DatasetManifest manifest;
    manifest.root = root;
    std::string line;
    if (!std::getline(in, line)) {
        throw ConfigError("dataset manifest is empty");
    }
    unsigned long classes = 0;
    unsigned long channels = 0;
    if (std::sscanf(line.c_str(), "#classes=%lu,channels=%lu", &classes, &channels) != 2 || classes == 0 ||
        channels == 0) {
        throw ConfigError("dataset manifest header must be '#classes=<k>,channels=<c>', got '" + line + "'");
    }
    manifest.num_classes = classes;
    manifest.channels = channels;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto comma = line.rfind(',');
        if (comma == std::string::npos || comma == 0 || comma + 1 == line.size()) {
            throw ConfigError("dataset manifest line " + std::to_string(line_no) + " is not 'path,label'");
        }
        const std::string label_text = line.substr(comma + 1);
        if (!std::all_of(label_text.begin(), label_text.end(), [](char c) { return c >= '0' && c <= '9'; })) {
            throw ConfigError("dataset manifest line " + std::to_string(line_no) + " has a non-numeric label");
        }
        manifest.entries.push_back({line.substr(0, comma), std::stoul(label_text)});
    }
    manifest.validate();
    return manifest;
}

inline DatasetManifest read_manifest(const std::filesystem::path& dir) {
    const auto path = dir / kManifestName;
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open dataset manifest " + path.string());
    }
    return parse_manifest(in, dir);
}

inline void write_manifest(const std::filesystem::path& dir, const DatasetManifest& manifest) {
    const auto path = dir / kManifestName;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write dataset manifest " + path.string());
    }
    out << format_manifest(manifest);
}

/// Loads every image listed in the manifest and runs the preprocessing
/// pipeline (resize, then per-channel normalization) on it.
inline Dataset load_dataset(const DatasetManifest& manifest, const std::optional<PreprocessSpec>& pre) {
    manifest.validate();
    Dataset ds;
    ds.num_classes = manifest.num_classes;
    ds.channels = manifest.channels;
    ds.samples.reserve(manifest.entries.size());
    for (const auto& e : manifest.entries) {
        Tensor image = read_pnm(manifest.root / e.path);
        if (image.dim(0) != manifest.channels) {
            throw ConfigError("image " + e.path + " has " + std::to_string(image.dim(0)) +
                              " channels but the manifest declares " + std::to_string(manifest.channels));
        }
        ds.samples.push_back({pre ? preprocess(image, *pre) : std::move(image), e.label});
    }
    if (!pre) {
        const Shape& first = ds.samples.front().image.shape();
        for (const auto& s : ds.samples) {
            if (s.image.shape() != first) {
                throw ConfigError("dataset images differ in shape and no resize was requested");
            }
        }
    }
    return ds;
}

inline Dataset preprocess_dataset(const Dataset& ds, const PreprocessSpec& pre) {
    Dataset out;
    out.num_classes = ds.num_classes;
    out.channels = ds.channels;
    out.samples.reserve(ds.size());
    for (const auto& s : ds.samples) {
        out.samples.push_back({preprocess(s.image, pre), s.label});
    }
    return out;
}

/// Sample order for one epoch. Without shuffling this is manifest order;
/// with shuffling it is a Fisher-Yates permutation drawn from a stream that
/// depends only on (seed, epoch).
inline std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, std::size_t epoch, bool shuffle) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (shuffle) {
        SplitMix64 rng(derive_seed(seed, 0x5348554646ULL + epoch));
        rng.shuffle(std::span<std::size_t>(order));
    }
    return order;
}

struct Batch {
    Tensor images; // [B,C,H,W]
    std::vector<std::size_t> labels;
    std::vector<std::size_t> indices;
};

/// Batches of one epoch; the final partial batch is kept.
class BatchStream {
public:
    BatchStream(const Dataset& dataset, std::size_t batch_size, std::uint64_t seed, bool shuffle,
                std::size_t epoch = 0)
        : dataset_(&dataset), batch_size_(batch_size) {
        if (dataset.empty()) {
            throw ConfigError("cannot batch an empty dataset");
        }
        require(batch_size >= 1, "batch size must be >= 1");
        order_ = epoch_order(dataset.size(), seed, epoch, shuffle);
    }

    [[nodiscard]] std::size_t batch_count() const noexcept {
        return (order_.size() + batch_size_ - 1) / batch_size_;
    }

    std::optional<Batch> next() {
        if (cursor_ >= order_.size()) {
            return std::nullopt;
        }
        const std::size_t end = std::min(cursor_ + batch_size_, order_.size());
        Batch batch;
        batch.indices.assign(order_.begin() + static_cast<std::ptrdiff_t>(cursor_),
                             order_.begin() + static_cast<std::ptrdiff_t>(end));
        const Shape& sample_shape = dataset_->samples[batch.indices.front()].image.shape();
        Shape shape{batch.indices.size()};
        shape.insert(shape.end(), sample_shape.begin(), sample_shape.end());
        std::vector<double> data;
        data.reserve(shape_numel(shape));
        for (auto idx : batch.indices) {
            const auto& s = dataset_->samples[idx];
            require(s.image.shape() == sample_shape, "batched images must share a shape");
            data.insert(data.end(), s.image.values().begin(), s.image.values().end());
            batch.labels.push_back(s.label);
        }
        batch.images = Tensor(std::move(shape), std::move(data));
        cursor_ = end;
        return batch;
    }

private:
    const Dataset* dataset_;
    std::size_t batch_size_;
    std::vector<std::size_t> order_;
    std::size_t cursor_ = 0;
};

inline BatchStream batches(const Dataset& dataset, std::size_t batch_size, std::uint64_t seed, bool shuffle,
                           std::size_t epoch = 0) {
    return BatchStream(dataset, batch_size, seed, shuffle, epoch);
}

/// Seeded permutation split; the first round(train_fraction * n) permuted
/// samples form the training partition.
inline std::pair<Dataset, Dataset> split_dataset(const Dataset& ds, double train_fraction, std::uint64_t seed) {
    require(train_fraction > 0.0 && train_fraction <= 1.0, "train fraction must lie in (0, 1]");
    std::vector<std::size_t> order(ds.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    SplitMix64 rng(derive_seed(seed, 0x53504C4954ULL));
    rng.shuffle(std::span<std::size_t>(order));
    const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(ds.size())));
    Dataset train{{}, ds.num_classes, ds.channels};
    Dataset test{{}, ds.num_classes, ds.channels};
    for (std::size_t i = 0; i < order.size(); ++i) {
        (i < n_train ? train : test).samples.push_back(ds.samples[order[i]]);
    }
    return {std::move(train), std::move(test)};
}

} // namespace neurosim::dataio

#endif // NEUROSIM_DATAIO_DATASET_HPP
