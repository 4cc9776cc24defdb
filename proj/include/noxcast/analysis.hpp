#pragma once

// Post-training diagnostics: actual/predicted/residual tables, permutation
// variable importance, and one-dimensional prediction-profile curves.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "noxcast/dataset.hpp"
#include "noxcast/network.hpp"
#include "noxcast/random.hpp"
#include "noxcast/stats.hpp"
#include "noxcast/trainer.hpp"

namespace noxcast {

struct ResidualRow {
    double actual = 0;
    double predicted = 0;
    double residual = 0;  // actual - predicted
};

struct ResidualTable {
    std::vector<ResidualRow> rows;  // partition records in record order
    std::string partition;
};

inline ResidualTable residual_table(const Network& net, const Dataset& dataset,
                                    const SplitAssignment& split, Partition partition) {
    if (split.labels.size() != dataset.size())
        throw std::invalid_argument("residual_table: split does not match dataset");
    ResidualTable table;
    table.partition = partition_name(partition);
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        if (split.labels[i] != partition) continue;
        const double actual = dataset.records()[i].nox;
        const double predicted = net.forward(dataset.records()[i].predictors);
        table.rows.push_back({actual, predicted, actual - predicted});
    }
    if (table.rows.empty()) throw std::invalid_argument("residual_table: empty partition");
    return table;
}

struct ImportanceEntry {
    std::string variable;
    double score = 0;      // baseline R^2 minus mean shuffled R^2
    double score_std = 0;  // std of the per-repetition drops
};

struct ImportanceRanking {
    std::vector<ImportanceEntry> entries;  // sorted descending by score
    double baseline_r_square = 0;
    std::size_t repetitions = 0;
    std::uint64_t seed = 0;
    std::string partition;
};

namespace detail {

inline double r_square(std::span<const double> predicted, std::span<const double> actual) {
    double mean = 0.0;
    for (double y : actual) mean += y;
    mean /= static_cast<double>(actual.size());
    double sse = 0.0, sst = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double r = predicted[i] - actual[i];
        sse += r * r;
        const double d = actual[i] - mean;
        sst += d * d;
    }
    if (!(sst > 0.0)) throw std::runtime_error("r_square: zero-variance partition");
    return 1.0 - sse / sst;
}

}  // namespace detail

// Permutation importance: for each predictor, the drop in the partition's
// R^2 when that column is shuffled within the partition, averaged over K
// seeded repetitions. Partition rows are processed in ascending record
// ordinal order and each (variable, repetition) pair draws its own derived
// sub-stream, so the scores do not depend on the order in which the
// partition is supplied or the order in which variables are evaluated.
inline ImportanceRanking permutation_importance(const Network& net, const Dataset& dataset,
                                                const SplitAssignment& split, Partition partition,
                                                std::size_t repetitions, std::uint64_t seed) {
    if (repetitions < 1) throw std::invalid_argument("permutation_importance: K must be >= 1");
    if (split.labels.size() != dataset.size())
        throw std::invalid_argument("permutation_importance: split does not match dataset");

    std::vector<std::array<double, kNumPredictors>> xs;
    std::vector<double> ys;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        if (split.labels[i] != partition) continue;
        xs.push_back(dataset.records()[i].predictors);
        ys.push_back(dataset.records()[i].nox);
    }
    if (xs.empty()) throw std::invalid_argument("permutation_importance: empty partition");
    const std::size_t n = xs.size();

    std::vector<double> predicted(n);
    for (std::size_t i = 0; i < n; ++i) predicted[i] = net.forward(xs[i]);
    const double baseline = detail::r_square(predicted, ys);

    ImportanceRanking ranking;
    ranking.baseline_r_square = baseline;
    ranking.repetitions = repetitions;
    ranking.seed = seed;
    ranking.partition = partition_name(partition);

    std::vector<std::array<double, kNumPredictors>> shuffled = xs;
    std::vector<std::size_t> order(n);
    for (std::size_t variable = 0; variable < kNumPredictors; ++variable) {
        double sum = 0.0, sum_sq = 0.0;
        for (std::size_t rep = 0; rep < repetitions; ++rep) {
            for (std::size_t i = 0; i < n; ++i) order[i] = i;
            Rng rng(derive_seed(seed, variable, rep));
            rng.shuffle(order);
            for (std::size_t i = 0; i < n; ++i)
                shuffled[i][variable] = xs[order[i]][variable];
            for (std::size_t i = 0; i < n; ++i) predicted[i] = net.forward(shuffled[i]);
            const double drop = baseline - detail::r_square(predicted, ys);
            sum += drop;
            sum_sq += drop * drop;
        }
        for (std::size_t i = 0; i < n; ++i) shuffled[i][variable] = xs[i][variable];

        const double k = static_cast<double>(repetitions);
        const double mean = sum / k;
        const double variance = std::max(0.0, sum_sq / k - mean * mean);
        ranking.entries.push_back(
            {std::string(kPredictorNames[variable]), mean, std::sqrt(variance)});
    }

    std::stable_sort(ranking.entries.begin(), ranking.entries.end(),
                     [](const ImportanceEntry& a, const ImportanceEntry& b) {
                         return a.score > b.score;
                     });
    return ranking;
}

struct ProfileCurve {
    std::string variable;
    std::vector<double> grid;         // ascending, endpoints = observed min/max
    std::vector<double> predictions;  // same length as grid
    std::array<double, kNumPredictors> base{};
};

// Per-variable medians, via the stats module's interpolated order statistic.
inline std::array<double, kNumPredictors> median_base(const Dataset& dataset) {
    std::array<double, kNumPredictors> base{};
    for (std::size_t p = 0; p < kNumPredictors; ++p) {
        std::vector<double> values = dataset.column(p);
        std::sort(values.begin(), values.end());
        base[p] = quantile_sorted(values, 0.5);
    }
    return base;
}

// Predicted response as `variable` sweeps an evenly spaced grid over its
// observed range, all other predictors pinned at the base point (per-variable
// medians by default).
inline ProfileCurve profile(const Network& net, const Dataset& dataset, std::string_view variable,
                            std::size_t grid_n,
                            const std::array<double, kNumPredictors>* base_point = nullptr) {
    if (grid_n < 2) throw std::invalid_argument("profile: grid_n must be >= 2");
    if (dataset.empty()) throw std::invalid_argument("profile: empty dataset");
    const std::size_t var = predictor_index(variable);

    double lo = dataset.records()[0].predictors[var];
    double hi = lo;
    for (const auto& rec : dataset.records()) {
        lo = std::min(lo, rec.predictors[var]);
        hi = std::max(hi, rec.predictors[var]);
    }

    ProfileCurve curve;
    curve.variable = std::string(variable);
    curve.base = base_point ? *base_point : median_base(dataset);
    curve.grid.resize(grid_n);
    curve.predictions.resize(grid_n);
    const double step = (hi - lo) / static_cast<double>(grid_n - 1);
    std::array<double, kNumPredictors> x = curve.base;
    for (std::size_t i = 0; i < grid_n; ++i) {
        curve.grid[i] = (i + 1 == grid_n) ? hi : lo + step * static_cast<double>(i);
        x[var] = curve.grid[i];
        curve.predictions[i] = net.forward(x);
    }
    return curve;
}

}  // namespace noxcast
