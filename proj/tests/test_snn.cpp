// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "neurosim/snn/forward.hpp"
#include "neurosim/snn/spec_json.hpp"
#include "oracles.hpp"

using namespace neurosim;
using namespace neurosim::snn;

namespace {

LifState scalar_state(double v, double s) { return {Tensor({1}, v), Tensor({1}, s)}; }

} // namespace

TEST(Lif, ConstantInputFollowsGeometricSeriesUntilFirstSpike) {
    LifParams p; // beta 0.9, theta 1, reset to zero
    LifState st = LifState::zeros({1});
    const Tensor input({1}, 0.2);
    int first_spike = -1;
    for (int t = 1; t <= 10 && first_spike < 0; ++t) {
        st = lif_step(st, input, p);
        const double expected = 0.2 * (1.0 - std::pow(0.9, t)) / (1.0 - 0.9);
        EXPECT_NEAR(st.v[0], expected, 1e-12) << "t=" << t;
        if (st.s_prev[0] == 1.0) first_spike = t;
    }
    EXPECT_EQ(first_spike, 7);
}

TEST(Lif, ZeroInputZeroStateStaysSilent) {
    const auto st = lif_step(LifState::zeros({4}), Tensor({4}), LifParams{});
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_EQ(st.v[i], 0.0);
        EXPECT_EQ(st.s_prev[i], 0.0);
    }
}

TEST(Lif, SpikeThenResetToZero) {
    LifParams p;
    auto st = lif_step(scalar_state(1.5, 0.0), Tensor({1}), p);
    EXPECT_DOUBLE_EQ(st.v[0], 1.35);
    EXPECT_EQ(st.s_prev[0], 1.0);
    st = lif_step(st, Tensor({1}), p);
    EXPECT_EQ(st.v[0], 0.0);
    EXPECT_EQ(st.s_prev[0], 0.0);
}

TEST(Lif, SubtractThresholdKeepsResidual) {
    LifParams p;
    p.reset = ResetMode::subtract_threshold;
    auto st = lif_step(scalar_state(1.5, 0.0), Tensor({1}), p);
    st = lif_step(st, Tensor({1}), p);
    EXPECT_NEAR(st.v[0], 0.9 * (1.35 - 1.0), 1e-15);
}

TEST(Lif, SpikesAreBinaryAndMembraneBoundedForBoundedInput) {
    std::mt19937_64 gen(3);
    LifParams p;
    LifState st = LifState::zeros({64});
    const double imax = 0.7;
    for (int t = 0; t < 200; ++t) {
        const Tensor in = oracle::random_tensor({64}, gen, -imax, imax);
        st = lif_step(st, in, p);
        for (std::size_t i = 0; i < 64; ++i) {
            EXPECT_TRUE(st.s_prev[i] == 0.0 || st.s_prev[i] == 1.0);
            EXPECT_LE(std::abs(st.v[i]), imax / (1.0 - p.beta) + 1e-12);
        }
    }
}

TEST(Lif, InvalidParamsRejected) {
    LifParams p;
    p.beta = 1.0;
    EXPECT_THROW(p.validate(), ConfigError);
    p.beta = 0.5;
    p.theta = 0.0;
    EXPECT_THROW(p.validate(), ConfigError);
}

TEST(Conv2d, AllOnesSumsToNine) {
    const Tensor x({1, 3, 3}, 1.0);
    const Tensor w({1, 1, 3, 3}, 1.0);
    const auto y = conv2d_forward(x, w, Tensor({1}), Conv2dLayer{1, 1, 3, 1, 0});
    ASSERT_EQ(y.shape(), (Shape{1, 1, 1}));
    EXPECT_EQ(y[0], 9.0);
}

TEST(Conv2d, IdentityKernelWithSamePadding) {
    std::mt19937_64 gen(1);
    const Tensor x = oracle::random_tensor({1, 5, 6}, gen);
    Tensor w({1, 1, 3, 3});
    w[4] = 1.0;
    EXPECT_EQ(conv2d_forward(x, w, Tensor({1}), Conv2dLayer{1, 1, 3, 1, 1}), x);
}

TEST(Conv2d, MatchesLoopOracleOnRandomLayers) {
    std::mt19937_64 gen(42);
    auto pick = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(gen); };
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t c = pick(1, 3), h = pick(3, 9), w = pick(3, 9);
        const std::size_t k = pick(1, 3), s = pick(1, 3), p = pick(0, 2), o = pick(1, 4);
        const Conv2dLayer spec{c, o, k, s, p};
        const Tensor x = oracle::random_tensor({c, h, w}, gen);
        const Tensor wt = oracle::random_tensor({o, c, k, k}, gen);
        const Tensor b = oracle::random_tensor({o}, gen);
        Tensor mag;
        const Tensor want = oracle::conv2d(x, wt, b, spec, nullptr, &mag);
        const Tensor got = conv2d_forward(x, wt, b, spec);
        ASSERT_EQ(got.shape(), want.shape());
        for (std::size_t i = 0; i < got.size(); ++i) {
            EXPECT_LE(oracle::rel_err(got[i], want[i], mag[i]), 1e-12) << "trial " << trial << " index " << i;
        }
    }
}

TEST(Conv2d, ShapeMismatchIsContractViolation) {
    EXPECT_THROW(conv2d_forward(Tensor({2, 4, 4}), Tensor({1, 1, 3, 3}), Tensor({1}), Conv2dLayer{1, 1, 3, 1, 0}),
                 ContractViolation);
}

TEST(Linear, IdentityAndBiasOnly) {
    Tensor eye({3, 3});
    for (std::size_t i = 0; i < 3; ++i) eye[i * 3 + i] = 1.0;
    const Tensor x({3}, std::vector<double>{0.5, -2.0, 3.25});
    EXPECT_EQ(linear_forward(x, eye, Tensor({3})), x);
    const Tensor b({3}, std::vector<double>{1.0, 2.0, 3.0});
    EXPECT_EQ(linear_forward(x, Tensor({3, 3}), b), b);
}

TEST(Linear, MatchesLoopOracleOnRandomLayers) {
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + gen() % 12, m = 1 + gen() % 6;
        const Tensor x = oracle::random_tensor({n}, gen);
        const Tensor w = oracle::random_tensor({m, n}, gen);
        const Tensor b = oracle::random_tensor({m}, gen);
        Tensor mag;
        const Tensor want = oracle::linear(x, w, b, nullptr, &mag);
        const Tensor got = linear_forward(x, w, b);
        for (std::size_t i = 0; i < m; ++i) EXPECT_LE(oracle::rel_err(got[i], want[i], mag[i]), 1e-12);
    }
}

TEST(Network, ZeroWeightsGiveZeroLogitsAndNoSpikes) {
    auto spec = bcu_spec(16, 16, 1);
    std::mt19937_64 gen(5);
    const auto r = network_forward(spec, zero_weights(spec), oracle::random_tensor({1, 16, 16}, gen));
    for (double v : r.logits.values()) EXPECT_EQ(v, 0.0);
    for (auto c : r.spike_counts) EXPECT_EQ(c, 0U);
}

TEST(Network, SingleNeuronSpikesOnceInTenSteps) {
    NetworkSpec spec;
    spec.timesteps = 10;
    spec.input_shape = {1, 1, 1};
    spec.num_classes = 1;
    spec.layers = {FlattenLayer{}, LinearLayer{1, 1}, LifLayer{}, LinearLayer{1, 1}};
    WeightSet w = zero_weights(spec);
    w.layers.at(1).weight[0] = 1.0;
    w.layers.at(3).weight[0] = 1.0;
    const auto r = network_forward(spec, w, Tensor({1, 1, 1}, 0.2));
    ASSERT_EQ(r.spike_counts.size(), 1U);
    EXPECT_EQ(r.spike_counts[0], 1U);
    EXPECT_DOUBLE_EQ(r.logits[0], 0.1); // one spike averaged over 10 steps
}

TEST(Network, FcuMatchesScriptedTrace) {
    const NetworkSpec spec = fcu_spec(16, 16, 4);
    const WeightSet w = init_weights(spec, 2024);
    std::mt19937_64 gen(11);
    const Tensor x = oracle::random_tensor({3, 16, 16}, gen, -1.0, 1.5);

    // Straight-line unroll of conv -> lif -> conv -> lif -> flatten -> linear.
    const auto& c1 = std::get<Conv2dLayer>(spec.layers[0]);
    const auto& c2 = std::get<Conv2dLayer>(spec.layers[2]);
    const Tensor i1 = oracle::conv2d(x, w.layers.at(0).weight, w.layers.at(0).bias, c1);
    Tensor v1(i1.shape()), s1(i1.shape()), v2, s2;
    Tensor sum({10});
    for (int t = 0; t < 4; ++t) {
        for (std::size_t i = 0; i < v1.size(); ++i) {
            v1[i] = 0.9 * v1[i] * (1.0 - s1[i]) + i1[i];
            s1[i] = v1[i] >= 1.0 ? 1.0 : 0.0;
        }
        const Tensor i2 = oracle::conv2d(s1, w.layers.at(2).weight, w.layers.at(2).bias, c2);
        if (t == 0) {
            v2 = Tensor(i2.shape());
            s2 = Tensor(i2.shape());
        }
        for (std::size_t i = 0; i < v2.size(); ++i) {
            v2[i] = 0.9 * v2[i] * (1.0 - s2[i]) + i2[i];
            s2[i] = v2[i] >= 1.0 ? 1.0 : 0.0;
        }
        const Tensor y = oracle::linear(s2.reshaped({s2.size()}), w.layers.at(5).weight, w.layers.at(5).bias);
        for (std::size_t k = 0; k < 10; ++k) sum[k] += y[k];
    }
    const auto r = network_forward(spec, w, x);
    for (std::size_t k = 0; k < 10; ++k) EXPECT_NEAR(r.logits[k], sum[k] / 4.0, 1e-12);
}

TEST(Network, PredictTiesGoToLowestIndex) {
    EXPECT_EQ(predict_class(Tensor({3}, std::vector<double>{0.5, 0.5, 0.1})), 0U);
    EXPECT_EQ(predict_class(Tensor({3}, std::vector<double>{0.1, 0.7, 0.7})), 1U);
}

TEST(Network, InvalidSpecsAreConfigErrors) {
    NetworkSpec spec = bcu_spec();
    spec.layers.pop_back();
    EXPECT_THROW(validate(spec), ConfigError); // no linear readout
    spec = bcu_spec();
    spec.num_classes = 3;
    EXPECT_THROW(validate(spec), ConfigError);
    spec = bcu_spec();
    std::get<LinearLayer>(spec.layers.back()).in_features = 7;
    EXPECT_THROW(validate(spec), ConfigError);
}

TEST(Network, WrongInputShapeIsContractViolation) {
    const auto spec = bcu_spec();
    EXPECT_THROW(network_forward(spec, zero_weights(spec), Tensor({1, 8, 8})), ContractViolation);
}

TEST(Network, InitWeightsDeterministicPerSeed) {
    const auto spec = fcu_spec();
    EXPECT_EQ(init_weights(spec, 1), init_weights(spec, 1));
    EXPECT_NE(init_weights(spec, 1), init_weights(spec, 2));
}

TEST(SpecJson, RoundTripsShippedShapes) {
    for (const auto& spec : {bcu_spec(), fcu_spec(), fcu_spec(32, 32, 5)}) {
        const auto back = spec_from_json(spec_to_json(spec));
        EXPECT_EQ(spec_to_json(back), spec_to_json(spec));
    }
}

TEST(SpecJson, RejectsBadDocuments) {
    auto j = spec_to_json(bcu_spec());
    j["layers"][0]["kind"] = "pool";
    EXPECT_THROW(spec_from_json(j), ConfigError);
    j = spec_to_json(bcu_spec());
    j.erase("input_shape");
    EXPECT_THROW(spec_from_json(j), ConfigError);
    j = spec_to_json(bcu_spec());
    j["layers"][1]["reset"] = "sometimes";
    EXPECT_THROW(spec_from_json(j), ConfigError);
}
