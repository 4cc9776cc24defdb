#pragma once

// Dataset partitioning (temporal by whole years, or stratified 60/20/20
// within each year), the full-batch Adam training loop with
// best-validation-epoch early stopping, and the five-metric evaluation
// suite (RSquare, RMSE, Mean Abs Dev, -LogLikelihood, SSE).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numbers>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "noxcast/dataset.hpp"
#include "noxcast/network.hpp"
#include "noxcast/random.hpp"

namespace noxcast {

enum class Partition { Train, Validation, Test };

inline constexpr std::array<Partition, 3> kPartitions = {Partition::Train, Partition::Validation,
                                                         Partition::Test};

inline std::string partition_name(Partition p) {
    switch (p) {
        case Partition::Train: return "train";
        case Partition::Validation: return "validation";
        case Partition::Test: return "test";
    }
    throw std::logic_error("unreachable partition");
}

inline Partition partition_from_name(const std::string& name) {
    if (name == "train") return Partition::Train;
    if (name == "validation") return Partition::Validation;
    if (name == "test") return Partition::Test;
    throw std::runtime_error("unknown partition: " + name);
}

struct SplitAssignment {
    std::vector<Partition> labels;  // one per record ordinal
    std::string strategy;           // "temporal" or "stratified"
    nlohmann::json parameters;      // year lists or fractions, echoed for provenance
    std::uint64_t seed = 0;         // stratified only

    std::vector<std::size_t> indices(Partition p) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == p) out.push_back(i);
        return out;
    }

    std::array<std::size_t, 3> counts() const {
        std::array<std::size_t, 3> c{0, 0, 0};
        for (Partition p : labels) ++c[static_cast<std::size_t>(p)];
        return c;
    }
};

// Whole calendar years per partition. The three year sets must be disjoint,
// cover the dataset's years exactly, and each produce a non-empty partition.
inline SplitAssignment split_temporal(const Dataset& dataset, const std::vector<int>& train_years,
                                      const std::vector<int>& val_years,
                                      const std::vector<int>& test_years) {
    const std::array<const std::vector<int>*, 3> groups = {&train_years, &val_years, &test_years};
    std::set<int> seen;
    for (const auto* group : groups) {
        if (group->empty()) throw std::invalid_argument("split_temporal: empty partition (no years)");
        for (int year : *group) {
            if (!seen.insert(year).second)
                throw std::invalid_argument("split_temporal: year " + std::to_string(year) +
                                            " assigned to more than one partition");
            if (!dataset.year_index().contains(year))
                throw std::invalid_argument("split_temporal: year " + std::to_string(year) +
                                            " not present in the dataset");
        }
    }
    for (const auto& [year, _] : dataset.year_index())
        if (!seen.contains(year))
            throw std::invalid_argument("split_temporal: dataset year " + std::to_string(year) +
                                        " not assigned to any partition");

    SplitAssignment split;
    split.strategy = "temporal";
    split.parameters = {{"train_years", train_years},
                        {"validation_years", val_years},
                        {"test_years", test_years}};
    split.labels.assign(dataset.size(), Partition::Train);
    for (std::size_t g = 0; g < groups.size(); ++g)
        for (int year : *groups[g])
            for (std::size_t ordinal : dataset.year_index().at(year))
                split.labels[ordinal] = kPartitions[g];

    for (Partition p : kPartitions)
        if (split.counts()[static_cast<std::size_t>(p)] == 0)
            throw std::invalid_argument("split_temporal: empty partition '" + partition_name(p) + "'");
    return split;
}

// Within each year the record ordinals are shuffled by a year-derived seeded
// generator, then allocated to the three partitions by largest-remainder
// rounding of the requested fractions, so every per-year count is within one
// record of fraction * n_year.
inline SplitAssignment split_stratified(const Dataset& dataset, double f_train, double f_val,
                                        double f_test, std::uint64_t seed) {
    const std::array<double, 3> fractions = {f_train, f_val, f_test};
    for (double f : fractions)
        if (!(f > 0.0)) throw std::invalid_argument("split_stratified: fractions must be positive");
    if (std::abs(f_train + f_val + f_test - 1.0) > 1e-9)
        throw std::invalid_argument("split_stratified: fractions must sum to 1");
    if (dataset.empty()) throw std::invalid_argument("split_stratified: empty dataset");

    SplitAssignment split;
    split.strategy = "stratified";
    split.seed = seed;
    split.parameters = {{"fractions", fractions}};
    split.labels.assign(dataset.size(), Partition::Train);

    for (const auto& [year, ordinals] : dataset.year_index()) {
        std::vector<std::size_t> shuffled = ordinals;
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(year)));
        rng.shuffle(shuffled);

        const std::size_t n = shuffled.size();
        std::array<std::size_t, 3> quota{};
        std::array<double, 3> remainder{};
        std::size_t assigned = 0;
        for (std::size_t p = 0; p < 3; ++p) {
            const double exact = fractions[p] * static_cast<double>(n);
            quota[p] = static_cast<std::size_t>(exact);
            remainder[p] = exact - static_cast<double>(quota[p]);
            assigned += quota[p];
        }
        // Distribute leftovers by descending remainder, ties to the earlier
        // partition (train, validation, test order).
        std::array<std::size_t, 3> order = {0, 1, 2};
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
        for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++quota[order[k % 3]];

        std::size_t cursor = 0;
        for (std::size_t p = 0; p < 3; ++p)
            for (std::size_t k = 0; k < quota[p]; ++k, ++cursor)
                split.labels[shuffled[cursor]] = kPartitions[p];
    }
    return split;
}

struct TrainConfig {
    std::uint64_t seed = 42;
    double learning_rate = 0.01;
    std::size_t max_epochs = 2000;
    std::size_t patience = 100;
    double penalty = 1e-4;  // lambda on squared weights, biases excluded
    std::string batch_mode = "full";

    void validate() const {
        if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
        if (patience > max_epochs) throw std::invalid_argument("patience must be <= max_epochs");
        if (batch_mode != "full")
            throw std::invalid_argument("only full-batch training is supported");
    }
};

inline nlohmann::json train_config_to_json(const TrainConfig& c) {
    return {{"seed", c.seed},          {"learning_rate", c.learning_rate},
            {"max_epochs", c.max_epochs}, {"patience", c.patience},
            {"penalty", c.penalty},    {"batch_mode", c.batch_mode}};
}

inline TrainConfig train_config_from_json(const nlohmann::json& j) {
    TrainConfig c;
    c.seed = j.value("seed", c.seed);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.max_epochs = j.value("max_epochs", c.max_epochs);
    c.patience = j.value("patience", c.patience);
    c.penalty = j.value("penalty", c.penalty);
    c.batch_mode = j.value("batch_mode", c.batch_mode);
    // A defaulted patience follows a shortened epoch budget.
    if (!j.contains("patience")) c.patience = std::min(c.patience, c.max_epochs);
    c.validate();
    return c;
}

// FNV-1a over the canonical config JSON; stored in the model file so a run
// can be traced back to its exact configuration.
inline std::string config_digest(const TrainConfig& c) {
    const std::string text = train_config_to_json(c).dump();
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char byte : text) {
        h ^= byte;
        h *= 0x100000001B3ULL;
    }
    char buf[24];
    std::snprintf(buf, sizeof(buf), "fnv1a-%016llx", static_cast<unsigned long long>(h));
    return buf;
}

struct MetricsReport {
    double r_square = 0;
    double rmse = 0;
    double mean_abs_dev = 0;
    double sse = 0;
    double neg_log_likelihood = 0;
    std::size_t sum_freq = 0;
    std::string partition;
};

// The five metrics from their sufficient statistics. RMSE and the Gaussian
// -LogLikelihood both use divisor n:
//   rmse = sqrt(sse / n),  -LL = (n/2) * (ln 2pi + ln(sse/n) + 1).
inline MetricsReport metrics_from_sums(std::size_t n, double sse, double sst, double sum_abs_dev,
                                       std::string partition) {
    if (n == 0) throw std::invalid_argument("metrics: empty partition");
    if (!(sst > 0.0)) throw std::runtime_error("metrics: zero-variance partition (SST = 0)");
    MetricsReport m;
    m.partition = std::move(partition);
    m.sum_freq = n;
    m.sse = sse;
    const double nd = static_cast<double>(n);
    m.r_square = 1.0 - sse / sst;
    m.rmse = std::sqrt(sse / nd);
    m.mean_abs_dev = sum_abs_dev / nd;
    m.neg_log_likelihood = 0.5 * nd * (std::log(2.0 * std::numbers::pi) + std::log(sse / nd) + 1.0);
    return m;
}

inline MetricsReport evaluate(const Network& net, const Dataset& dataset,
                              const SplitAssignment& split, Partition partition) {
    if (split.labels.size() != dataset.size())
        throw std::invalid_argument("evaluate: split does not match dataset");
    double sum_y = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        if (split.labels[i] != partition) continue;
        sum_y += dataset.records()[i].nox;
        ++n;
    }
    if (n == 0) throw std::invalid_argument("evaluate: empty partition");
    const double mean_y = sum_y / static_cast<double>(n);

    double sse = 0.0, sst = 0.0, sum_abs = 0.0;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        if (split.labels[i] != partition) continue;
        const double y = dataset.records()[i].nox;
        const double yhat = net.forward(dataset.records()[i].predictors);
        const double r = yhat - y;
        sse += r * r;
        sum_abs += std::abs(r);
        const double d = y - mean_y;
        sst += d * d;
    }
    return metrics_from_sums(n, sse, sst, sum_abs, partition_name(partition));
}

enum class StopReason { Converged, Patience, MaxEpochs };

inline std::string stop_reason_name(StopReason r) {
    switch (r) {
        case StopReason::Converged: return "converged";
        case StopReason::Patience: return "patience";
        case StopReason::MaxEpochs: return "max_epochs";
    }
    throw std::logic_error("unreachable stop reason");
}

struct EpochStat {
    double train_loss = 0;      // penalized objective at the start of the epoch
    double validation_sse = 0;  // after the epoch's parameter update
};

struct TrainHistory {
    std::vector<EpochStat> epochs;
    std::size_t best_epoch = 0;  // index into `epochs`
    StopReason stop_reason = StopReason::MaxEpochs;
};

struct TrainResult {
    Network network;
    TrainHistory history;
};

// Full-batch gradient descent with per-parameter adaptive moment estimates
// (Adam: beta1 = 0.9, beta2 = 0.999, eps = 1e-8). The standardizer is fitted
// on the training partition only. The output bias starts at the training
// response mean; all other parameters come from the seeded init. After each
// epoch the validation SSE is measured and the parameters of the best
// validation epoch are returned.
inline TrainResult train(const Dataset& dataset, const SplitAssignment& split,
                         const std::vector<LayerSpec>& specs, const TrainConfig& config) {
    config.validate();
    if (split.labels.size() != dataset.size())
        throw std::invalid_argument("train: split does not match dataset");
    const auto train_idx = split.indices(Partition::Train);
    const auto val_idx = split.indices(Partition::Validation);
    if (train_idx.empty() || val_idx.empty())
        throw std::invalid_argument("train: train and validation partitions must be non-empty");

    std::vector<std::array<double, kNumPredictors>> train_x, val_x;
    std::vector<double> train_y, val_y;
    train_x.reserve(train_idx.size());
    train_y.reserve(train_idx.size());
    for (std::size_t i : train_idx) {
        train_x.push_back(dataset.records()[i].predictors);
        train_y.push_back(dataset.records()[i].nox);
    }
    val_x.reserve(val_idx.size());
    val_y.reserve(val_idx.size());
    for (std::size_t i : val_idx) {
        val_x.push_back(dataset.records()[i].predictors);
        val_y.push_back(dataset.records()[i].nox);
    }

    TrainResult result;
    result.network = init_network(kNumPredictors, specs, config.seed);
    result.network.standardizer = fit_standardizer(dataset, train_idx, "train");
    result.network.config_digest = config_digest(config);
    double mean_y = 0.0;
    for (double y : train_y) mean_y += y;
    result.network.output_bias = mean_y / static_cast<double>(train_y.size());

    Network& net = result.network;
    const auto params = parameter_pointers(net);
    std::vector<double> m(params.size(), 0.0), v(params.size(), 0.0);
    std::vector<double> best(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) best[i] = *params[i];

    constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
    double best_val_sse = std::numeric_limits<double>::infinity();
    std::size_t since_improvement = 0;
    TrainHistory& history = result.history;
    history.stop_reason = StopReason::MaxEpochs;

    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        const Gradient g = gradient(net, train_x, train_y, config.penalty);
        if (!std::isfinite(g.loss))
            throw std::runtime_error("train: diverged (non-finite loss) at epoch " +
                                     std::to_string(epoch));
        const auto grads = gradient_pointers(g);

        double grad_max = 0.0;
        const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(epoch));
        const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(epoch));
        for (std::size_t i = 0; i < params.size(); ++i) {
            const double gi = *grads[i];
            grad_max = std::max(grad_max, std::abs(gi));
            m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * gi;
            v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * gi * gi;
            *params[i] -= config.learning_rate * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + kEps);
        }

        double val_sse = 0.0;
        for (std::size_t i = 0; i < val_x.size(); ++i) {
            const double r = net.forward(val_x[i]) - val_y[i];
            val_sse += r * r;
        }
        history.epochs.push_back({g.loss, val_sse});

        if (val_sse < best_val_sse) {
            best_val_sse = val_sse;
            history.best_epoch = history.epochs.size() - 1;
            for (std::size_t i = 0; i < params.size(); ++i) best[i] = *params[i];
            since_improvement = 0;
        } else {
            ++since_improvement;
        }
        if (grad_max < 1e-10) {
            history.stop_reason = StopReason::Converged;
            break;
        }
        if (since_improvement >= config.patience) {
            history.stop_reason = StopReason::Patience;
            break;
        }
    }

    for (std::size_t i = 0; i < params.size(); ++i) *params[i] = best[i];
    return result;
}

}  // namespace noxcast
