#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "noxcast/optimizer.hpp"
#include "noxcast/random.hpp"
#include "noxcast/synthetic.hpp"
#include "support/fixtures.hpp"

using namespace noxcast;

namespace {

BoxConstraints unit_box(double lo, double hi) {
    BoxConstraints box;
    box.lower.fill(lo);
    box.upper.fill(hi);
    return box;
}

TEST(Desirability, MinimizeBoundaryAndMidpoint) {
    DesirabilitySpec spec{DesirabilityMode::Minimize, 10.0, 30.0, 1.0};
    EXPECT_DOUBLE_EQ(desirability(10.0, spec), 1.0);
    EXPECT_DOUBLE_EQ(desirability(5.0, spec), 1.0);
    EXPECT_DOUBLE_EQ(desirability(30.0, spec), 0.0);
    EXPECT_DOUBLE_EQ(desirability(50.0, spec), 0.0);
    EXPECT_DOUBLE_EQ(desirability(20.0, spec), 0.5);

    spec.exponent = 2.0;
    EXPECT_DOUBLE_EQ(desirability(20.0, spec), 0.25);
}

TEST(Desirability, MonotoneAndBounded) {
    const DesirabilitySpec spec{DesirabilityMode::Minimize, 0.0, 1.0, 1.7};
    double prev = 2.0;
    for (int i = -5; i <= 15; ++i) {
        const double d = desirability(0.1 * i, spec);
        EXPECT_GE(d, 0.0);
        EXPECT_LE(d, 1.0);
        EXPECT_LE(d, prev);  // non-increasing in y
        prev = d;
    }
}

TEST(Desirability, MaximizeAndTargetModes) {
    const DesirabilitySpec max_spec{DesirabilityMode::Maximize, 0.0, 10.0, 1.0};
    EXPECT_DOUBLE_EQ(desirability(0.0, max_spec), 0.0);
    EXPECT_DOUBLE_EQ(desirability(10.0, max_spec), 1.0);
    EXPECT_DOUBLE_EQ(desirability(5.0, max_spec), 0.5);

    const DesirabilitySpec target_spec{DesirabilityMode::Target, 0.0, 10.0, 1.0};
    EXPECT_DOUBLE_EQ(desirability(5.0, target_spec), 1.0);
    EXPECT_DOUBLE_EQ(desirability(2.5, target_spec), 0.5);
    EXPECT_DOUBLE_EQ(desirability(0.0, target_spec), 0.0);
}

TEST(Desirability, RejectsInvalidSpec) {
    EXPECT_THROW(desirability(1.0, {DesirabilityMode::Minimize, 5.0, 5.0, 1.0}),
                 std::invalid_argument);
    EXPECT_THROW(desirability(1.0, {DesirabilityMode::Minimize, 0.0, 1.0, 0.0}),
                 std::invalid_argument);
}

TEST(PatternSearch, RecoversQuadraticMinimum) {
    const BoxConstraints box = unit_box(-2.0, 2.0);
    std::array<double, kNumPredictors> c{};
    Rng rng(31);
    for (auto& v : c) v = rng.uniform(-1.5, 1.5);

    const auto objective = [&](std::span<const double> x) {
        double s = 0;
        for (std::size_t i = 0; i < kNumPredictors; ++i) s += (x[i] - c[i]) * (x[i] - c[i]);
        return s;
    };
    std::array<double, kNumPredictors> start{};
    const PatternSearchResult result = pattern_search(objective, box, start);
    for (std::size_t i = 0; i < kNumPredictors; ++i)
        EXPECT_LE(std::abs(result.x[i] - c[i]), 1e-4 * 4.0) << "coordinate " << i;
}

TEST(PatternSearch, AllEvaluationsStayInsideBox) {
    const BoxConstraints box = unit_box(0.0, 1.0);
    std::size_t evaluations = 0;
    const auto objective = [&](std::span<const double> x) {
        EXPECT_TRUE(box.contains(x));
        ++evaluations;
        double s = 0;
        for (double v : x) s += (v - 0.25) * (v - 0.25);
        return s;
    };
    std::array<double, kNumPredictors> start;
    start.fill(5.0);  // outside; must be clamped before evaluation
    const PatternSearchResult result = pattern_search(objective, box, start);
    EXPECT_GT(evaluations, 0u);
    EXPECT_TRUE(box.contains(result.x));
}

// The production-shape network with a strict bowl response surface: one
// Gaussian node per input coordinate, so the prediction strictly increases
// with every |z_i - c_i| and the unique box minimum sits at c.
Network bowl_network(const std::array<double, kNumPredictors>& c) {
    Network net;
    net.input_dim = kNumPredictors;
    Layer layer;
    layer.activations.assign(kNumPredictors, ActivationKind::Gaussian);
    layer.weights.assign(kNumPredictors, std::vector<double>(kNumPredictors, 0.0));
    layer.bias.assign(kNumPredictors, 0.0);
    for (std::size_t i = 0; i < kNumPredictors; ++i) {
        layer.weights[i][i] = 0.5;
        layer.bias[i] = -0.5 * c[i];
    }
    net.hidden.push_back(layer);
    net.output_weights.assign(kNumPredictors, -1.0);
    net.output_bias = static_cast<double>(kNumPredictors);
    net.standardizer = identity_standardizer(kNumPredictors);
    net.validate();
    return net;
}

Dataset tiny_dataset() {
    std::vector<ProcessRecord> records(6);
    Rng rng(77);
    for (auto& rec : records) {
        rec.year = 2011;
        for (auto& v : rec.predictors) v = rng.uniform(-2, 2);
        rec.nox = rng.uniform(20, 80);
    }
    return Dataset(std::move(records), default_schema());
}

TEST(MinimizeResponse, BowlNetworkRecoversCenter) {
    std::array<double, kNumPredictors> c{};
    Rng rng(41);
    for (auto& v : c) v = rng.uniform(-1.5, 1.5);
    const Network net = bowl_network(c);
    const BoxConstraints box = unit_box(-2.0, 2.0);

    const OptimizationResult result = minimize_response(net, tiny_dataset(), box, 8, 5);
    for (std::size_t i = 0; i < kNumPredictors; ++i)
        EXPECT_LE(std::abs(result.x_star[i] - c[i]), 1e-4 * 4.0) << "coordinate " << i;
    EXPECT_NEAR(result.predicted_nox, 0.0, 1e-6);
}

TEST(MinimizeResponse, ConstantModelReturnsConstant) {
    const Network net = testutil::zero_network(33.0);
    const Dataset ds = tiny_dataset();
    const OptimizationResult result = minimize_response(net, ds, unit_box(-1, 1), 4, 9);
    EXPECT_DOUBLE_EQ(result.predicted_nox, 33.0);
    EXPECT_TRUE(unit_box(-1, 1).contains(result.x_star));
}

TEST(MinimizeResponse, InvariantsHold) {
    SyntheticOptions opt;
    opt.records_per_year = 40;
    const Dataset ds = synthetic_dataset(opt);
    Network net = init_network(kNumPredictors,
                               {LayerSpec::mixed_five(), LayerSpec::mixed_five()}, 19);
    std::vector<std::size_t> all(ds.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    net.standardizer = fit_standardizer(ds, all, "all");
    net.output_weights = {3.0, -2.0, 1.5, 0.5, -4.0};
    net.output_bias = 60.0;

    const BoxConstraints box = BoxConstraints::from_dataset(ds);
    const OptimizationResult result = minimize_response(net, ds, box, 12, 3);

    // x_star feasible; value equals forward(x_star).
    EXPECT_TRUE(box.contains(result.x_star));
    EXPECT_EQ(result.predicted_nox, net.forward(result.x_star));

    // Dominance: no start finished below the returned value, every start
    // improved or matched its own initial value, and no dataset row predicts
    // below the returned value.
    ASSERT_EQ(result.trace.size(), 12u);
    for (const auto& trace : result.trace) {
        EXPECT_LE(result.predicted_nox, trace.final_value);
        std::array<double, kNumPredictors> clamped = trace.start;
        for (std::size_t i = 0; i < kNumPredictors; ++i)
            clamped[i] = std::clamp(clamped[i], box.lower[i], box.upper[i]);
        EXPECT_LE(trace.final_value, net.forward(clamped));
    }
    for (const auto& rec : ds.records())
        EXPECT_LE(result.predicted_nox, net.forward(rec.predictors));
}

TEST(MinimizeResponse, DeterministicInSeed) {
    const Dataset ds = tiny_dataset();
    std::array<double, kNumPredictors> c{};
    c.fill(0.3);
    const Network net = bowl_network(c);
    const BoxConstraints box = unit_box(-2, 2);

    const OptimizationResult a = minimize_response(net, ds, box, 6, 13);
    const OptimizationResult b = minimize_response(net, ds, box, 6, 13);
    for (std::size_t i = 0; i < kNumPredictors; ++i) EXPECT_EQ(a.x_star[i], b.x_star[i]);
    ASSERT_EQ(a.trace.size(), b.trace.size());
    for (std::size_t s = 0; s < a.trace.size(); ++s) {
        EXPECT_EQ(a.trace[s].final_value, b.trace[s].final_value);
        EXPECT_EQ(a.trace[s].sweeps, b.trace[s].sweeps);
    }
}

TEST(MinimizeResponse, BeatsDenseSamplingOnBowl) {
    std::array<double, kNumPredictors> c{};
    Rng rng(53);
    for (auto& v : c) v = rng.uniform(-1, 1);
    const Network net = bowl_network(c);
    const BoxConstraints box = unit_box(-2, 2);
    const OptimizationResult result = minimize_response(net, tiny_dataset(), box, 8, 23);

    Rng sampler(99);
    double best_sample = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 20000; ++i) {
        std::array<double, kNumPredictors> x{};
        for (std::size_t p = 0; p < kNumPredictors; ++p)
            x[p] = sampler.uniform(box.lower[p], box.upper[p]);
        best_sample = std::min(best_sample, net.forward(x));
    }
    EXPECT_LE(result.predicted_nox, best_sample);
}

TEST(BoxConstraintsChecks, ValidationAndDatasetBounds) {
    BoxConstraints box = unit_box(0, 1);
    box.upper[2] = box.lower[2];
    EXPECT_THROW(box.validate(), std::invalid_argument);

    const Dataset ds = tiny_dataset();
    const BoxConstraints from_data = BoxConstraints::from_dataset(ds);
    for (const auto& rec : ds.records()) EXPECT_TRUE(from_data.contains(rec.predictors));
}

}  // namespace
