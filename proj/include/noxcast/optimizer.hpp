#pragma once

// Desirability-driven search for the predictor settings minimizing the
// predicted response over the observed operating box: Derringer-Suich
// desirability ramps plus a deterministic multi-start coordinate-descent
// pattern search.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "noxcast/dataset.hpp"
#include "noxcast/network.hpp"
#include "noxcast/random.hpp"

namespace noxcast {

struct BoxConstraints {
    std::array<double, kNumPredictors> lower{};
    std::array<double, kNumPredictors> upper{};

    void validate() const {
        for (std::size_t i = 0; i < kNumPredictors; ++i)
            if (!(lower[i] < upper[i]))
                throw std::invalid_argument("box: lower must be < upper for '" +
                                            std::string(kPredictorNames[i]) + "'");
    }

    bool contains(std::span<const double> x) const {
        for (std::size_t i = 0; i < kNumPredictors; ++i)
            if (x[i] < lower[i] || x[i] > upper[i]) return false;
        return true;
    }

    // Observed per-predictor min/max.
    static BoxConstraints from_dataset(const Dataset& dataset) {
        if (dataset.empty()) throw std::invalid_argument("box: empty dataset");
        BoxConstraints box;
        box.lower = dataset.records()[0].predictors;
        box.upper = dataset.records()[0].predictors;
        for (const auto& rec : dataset.records())
            for (std::size_t i = 0; i < kNumPredictors; ++i) {
                box.lower[i] = std::min(box.lower[i], rec.predictors[i]);
                box.upper[i] = std::max(box.upper[i], rec.predictors[i]);
            }
        box.validate();
        return box;
    }
};

enum class DesirabilityMode { Minimize, Maximize, Target };

struct DesirabilitySpec {
    DesirabilityMode mode = DesirabilityMode::Minimize;
    double y_low = 0.0;
    double y_high = 1.0;
    double exponent = 1.0;  // s > 0

    void validate() const {
        if (!(y_low < y_high)) throw std::invalid_argument("desirability: y_low must be < y_high");
        if (!(exponent > 0.0)) throw std::invalid_argument("desirability: exponent must be > 0");
    }
};

// Derringer-Suich one-sided ramp (two-sided for Target, peaking at the
// bounds' midpoint). Always in [0, 1].
inline double desirability(double y, const DesirabilitySpec& spec) {
    spec.validate();
    const double width = spec.y_high - spec.y_low;
    switch (spec.mode) {
        case DesirabilityMode::Minimize:
            if (y <= spec.y_low) return 1.0;
            if (y >= spec.y_high) return 0.0;
            return std::pow((spec.y_high - y) / width, spec.exponent);
        case DesirabilityMode::Maximize:
            if (y <= spec.y_low) return 0.0;
            if (y >= spec.y_high) return 1.0;
            return std::pow((y - spec.y_low) / width, spec.exponent);
        case DesirabilityMode::Target: {
            if (y <= spec.y_low || y >= spec.y_high) return 0.0;
            const double target = spec.y_low + width / 2.0;
            const double half = width / 2.0;
            return std::pow(1.0 - std::abs(y - target) / half, spec.exponent);
        }
    }
    throw std::logic_error("unreachable desirability mode");
}

struct PatternSearchResult {
    std::array<double, kNumPredictors> x{};
    double value = 0.0;
    std::size_t sweeps = 0;
};

// Coordinate-descent pattern search over the box. Each coordinate keeps its
// own step, starting at 10% of its range; a coordinate whose +/- probes both
// fail has its step halved; the search stops when every step is below 1e-6
// of its range. Only strict improvements are accepted, so the incumbent
// value is non-increasing.
template <typename Objective>
PatternSearchResult pattern_search(Objective&& objective, const BoxConstraints& box,
                                   std::array<double, kNumPredictors> start,
                                   std::size_t max_sweeps = 10000) {
    box.validate();
    std::array<double, kNumPredictors> step{}, min_step{};
    for (std::size_t i = 0; i < kNumPredictors; ++i) {
        const double range = box.upper[i] - box.lower[i];
        step[i] = 0.10 * range;
        min_step[i] = 1e-6 * range;
        start[i] = std::clamp(start[i], box.lower[i], box.upper[i]);
    }

    PatternSearchResult result;
    result.x = start;
    result.value = objective(std::span<const double>(result.x));

    bool any_active = true;
    while (any_active && result.sweeps < max_sweeps) {
        ++result.sweeps;
        any_active = false;
        for (std::size_t i = 0; i < kNumPredictors; ++i) {
            if (step[i] < min_step[i]) continue;
            any_active = true;
            bool improved = false;
            for (double direction : {+1.0, -1.0}) {
                const double candidate =
                    std::clamp(result.x[i] + direction * step[i], box.lower[i], box.upper[i]);
                if (candidate == result.x[i]) continue;
                std::array<double, kNumPredictors> probe = result.x;
                probe[i] = candidate;
                const double value = objective(std::span<const double>(probe));
                if (value < result.value) {
                    result.x = probe;
                    result.value = value;
                    improved = true;
                    break;
                }
            }
            if (!improved) step[i] *= 0.5;
        }
    }
    return result;
}

struct StartTrace {
    std::array<double, kNumPredictors> start{};
    double final_value = 0.0;
    std::size_t sweeps = 0;
};

struct OptimizationResult {
    std::array<double, kNumPredictors> x_star{};
    double predicted_nox = 0.0;
    double desirability = 0.0;
    std::size_t n_starts = 0;
    std::vector<StartTrace> trace;  // one entry per start, in start order
};

// Multi-start minimization of the model's predicted response over the box.
// Start points: the dataset row with the lowest model prediction (always
// start 0), then the rows with the lowest observed response up to half the
// start budget, then seeded uniform draws from the box. Starts are
// deterministic in (dataset, box, n_starts, seed); ties between starts
// resolve to the lowest start index.
inline OptimizationResult minimize_response(const Network& net, const Dataset& dataset,
                                            const BoxConstraints& box, std::size_t n_starts,
                                            std::uint64_t seed,
                                            const DesirabilitySpec* desirability_spec = nullptr) {
    box.validate();
    if (n_starts < 1) throw std::invalid_argument("minimize_response: n_starts must be >= 1");
    if (dataset.empty()) throw std::invalid_argument("minimize_response: empty dataset");

    std::vector<std::array<double, kNumPredictors>> starts;
    starts.reserve(n_starts);

    std::size_t argmin_pred = 0;
    double min_pred = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const double yhat = net.forward(dataset.records()[i].predictors);
        if (yhat < min_pred) {
            min_pred = yhat;
            argmin_pred = i;
        }
    }
    starts.push_back(dataset.records()[argmin_pred].predictors);

    const std::size_t observed_budget = std::max<std::size_t>(n_starts / 2, 1);
    if (starts.size() < observed_budget) {
        std::vector<std::size_t> by_nox(dataset.size());
        std::iota(by_nox.begin(), by_nox.end(), std::size_t{0});
        std::stable_sort(by_nox.begin(), by_nox.end(), [&](std::size_t a, std::size_t b) {
            return dataset.records()[a].nox < dataset.records()[b].nox;
        });
        for (std::size_t k = 0; k < by_nox.size() && starts.size() < observed_budget; ++k) {
            if (by_nox[k] == argmin_pred) continue;
            starts.push_back(dataset.records()[by_nox[k]].predictors);
        }
    }
    Rng rng(derive_seed(seed, 0x5u));
    while (starts.size() < n_starts) {
        std::array<double, kNumPredictors> x{};
        for (std::size_t i = 0; i < kNumPredictors; ++i) x[i] = rng.uniform(box.lower[i], box.upper[i]);
        starts.push_back(x);
    }

    const auto objective = [&](std::span<const double> x) { return net.forward(x); };

    OptimizationResult result;
    result.n_starts = starts.size();
    double best = std::numeric_limits<double>::infinity();
    for (const auto& start : starts) {
        const PatternSearchResult run = pattern_search(objective, box, start);
        result.trace.push_back({start, run.value, run.sweeps});
        if (run.value < best) {
            best = run.value;
            result.x_star = run.x;
        }
    }
    result.predicted_nox = net.forward(result.x_star);

    DesirabilitySpec spec;
    if (desirability_spec) {
        spec = *desirability_spec;
    } else {
        // Reporting default: minimize over the observed response range.
        spec.mode = DesirabilityMode::Minimize;
        spec.y_low = dataset.records()[0].nox;
        spec.y_high = dataset.records()[0].nox;
        for (const auto& rec : dataset.records()) {
            spec.y_low = std::min(spec.y_low, rec.nox);
            spec.y_high = std::max(spec.y_high, rec.nox);
        }
        if (!(spec.y_low < spec.y_high)) spec.y_high = spec.y_low + 1.0;
    }
    result.desirability = desirability(result.predicted_nox, spec);
    return result;
}

}  // namespace noxcast
