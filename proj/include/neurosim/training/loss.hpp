// SPDX-License-Identifier: Apache-2.0

#ifndef NEUROSIM_TRAINING_LOSS_HPP
#define NEUROSIM_TRAINING_LOSS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "neurosim/error.hpp"
#include "neurosim/tensor.hpp"

namespace neurosim::training {

struct LossResult {
    double loss = 0.0;
    Tensor dlogits;
};

/// Softmax cross-entropy with max subtraction:
/// loss = logsumexp(z) - z[label], dloss/dz = softmax(z) - onehot(label).
inline LossResult cross_entropy(const Tensor& logits, std::size_t label) {
    require(logits.rank() == 1 && logits.size() > 0, "cross_entropy expects a non-empty rank-1 logit tensor");
    require(label < logits.size(), "label " + std::to_string(label) + " out of range for " +
                                       std::to_string(logits.size()) + " classes");
    const auto values = logits.values();
    const double top = *std::max_element(values.begin(), values.end());
    double sum = 0.0;
    for (double z : values) {
        sum += std::exp(z - top);
    }
    const double log_sum = std::log(sum);
    LossResult r;
    r.loss = log_sum - (logits[label] - top);
    r.dlogits = Tensor(logits.shape());
    for (std::size_t k = 0; k < logits.size(); ++k) {
        r.dlogits[k] = std::exp(logits[k] - top - log_sum) - (k == label ? 1.0 : 0.0);
    }
    return r;
}

} // namespace neurosim::training

#endif // NEUROSIM_TRAINING_LOSS_HPP
