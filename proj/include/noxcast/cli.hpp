#pragma once

// Command-line front end: ingest, stats, split, train, evaluate, importance,
// profile, optimize, report. Every subcommand takes --out (or the
// NOXCAST_OUT environment variable), writes its artifacts atomically under
// fixed names (artifacts.hpp), and exits nonzero with a diagnostic on any
// error. One global --seed feeds every seeded subsystem through fixed
// offsets, and a --config run-configuration JSON can stand in for any flag
// (explicit flags win), so a whole pipeline is reproducible from one file.

#include <array>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "noxcast/analysis.hpp"
#include "noxcast/artifacts.hpp"
#include "noxcast/dataset.hpp"
#include "noxcast/io.hpp"
#include "noxcast/network.hpp"
#include "noxcast/optimizer.hpp"
#include "noxcast/report.hpp"
#include "noxcast/stats.hpp"
#include "noxcast/trainer.hpp"

namespace noxcast::cli {

// Subsystem seeds derived from the global --seed.
inline constexpr std::uint64_t kSplitSeedOffset = 1;
inline constexpr std::uint64_t kInitSeedOffset = 2;
inline constexpr std::uint64_t kImportanceSeedOffset = 3;
inline constexpr std::uint64_t kOptimizerSeedOffset = 4;

namespace detail {

inline std::filesystem::path resolve_out(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("NOXCAST_OUT"); env && *env) return env;
    return "out";
}

// Run-configuration JSON given via --config. Any value it provides is used
// wherever the matching flag was not given explicitly.
struct Overlay {
    nlohmann::json root = nlohmann::json::object();

    static Overlay load(const std::string& path) {
        Overlay o;
        if (!path.empty()) o.root = nlohmann::json::parse(read_file(path));
        return o;
    }

    const nlohmann::json* section(const char* name) const {
        auto it = root.find(name);
        return it == root.end() ? nullptr : &*it;
    }

    template <typename T>
    static void assign(const nlohmann::json* sec, const CLI::App* cmd, const std::string& flag,
                       const char* key, T& target) {
        if (!sec || !sec->contains(key)) return;
        if (cmd->count(flag) > 0) return;  // explicit flag wins
        target = sec->at(key).get<T>();
    }
};

struct DataArgs {
    std::vector<std::string> paths;
    std::string schema_path;
    std::vector<std::string> year_assignments;  // "<path>=<year>"
};

inline void add_data_options(CLI::App* cmd, DataArgs& args) {
    cmd->add_option("--data", args.paths, "Input CSV files, one per year")->expected(-1);
    cmd->add_option("--schema", args.schema_path,
                    "JSON schema mapping canonical column names to {source_name, unit}");
    cmd->add_option("--year", args.year_assignments,
                    "Explicit year for a file, as <path>=<year> (default: from the file name)");
}

inline void overlay_data(const Overlay& o, const CLI::App* cmd, DataArgs& args) {
    Overlay::assign(&o.root, cmd, "--data", "data", args.paths);
    Overlay::assign(&o.root, cmd, "--schema", "schema", args.schema_path);
    if (o.root.contains("years") && cmd->count("--year") == 0) {
        args.year_assignments.clear();
        for (const auto& [path, year] : o.root.at("years").items())
            args.year_assignments.push_back(path + "=" + std::to_string(year.get<int>()));
    }
}

inline Dataset load_data(const DataArgs& args, LoadReport* report = nullptr) {
    if (args.paths.empty())
        throw std::runtime_error("no input files (give --data or a config \"data\" list)");
    const ColumnSchema schema =
        args.schema_path.empty() ? default_schema() : load_schema(args.schema_path);
    std::map<std::string, int> overrides;
    for (const auto& assignment : args.year_assignments) {
        const auto eq = assignment.rfind('=');
        if (eq == std::string::npos)
            throw std::runtime_error("--year expects <path>=<year>, got: " + assignment);
        overrides[assignment.substr(0, eq)] = std::stoi(assignment.substr(eq + 1));
    }
    std::vector<std::filesystem::path> paths(args.paths.begin(), args.paths.end());
    return load_csv(std::move(paths), schema, report, overrides);
}

inline std::vector<int> parse_year_list(const std::string& text) {
    std::vector<int> years;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) years.push_back(std::stoi(item));
    }
    if (years.empty()) throw std::runtime_error("empty year list: '" + text + "'");
    return years;
}

inline std::array<double, 3> parse_fractions(const std::string& text) {
    std::array<double, 3> f{};
    std::stringstream ss(text);
    std::string item;
    std::size_t i = 0;
    while (std::getline(ss, item, ',') && i < 3) {
        auto v = parse_double(item);
        if (!v) throw std::runtime_error("bad fraction: '" + item + "'");
        f[i++] = *v;
    }
    if (i != 3) throw std::runtime_error("--fractions expects three comma-separated values");
    return f;
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    atomic_write(path, j.dump(2) + "\n");
}

inline SplitAssignment load_split_labels(const std::filesystem::path& path,
                                         std::size_t expected_records) {
    const CsvTable table = read_csv(path);
    auto ord_col = table.column("ordinal");
    auto label_col = table.column("label");
    if (!ord_col || !label_col)
        throw std::runtime_error("split labels file " + path.string() +
                                 ": expected columns 'ordinal,label'");
    SplitAssignment split;
    split.strategy = "file:" + path.filename().string();
    split.labels.assign(expected_records, Partition::Train);
    std::vector<bool> seen(expected_records, false);
    for (const auto& row : table.rows) {
        const std::size_t ordinal = std::stoull(row[*ord_col]);
        if (ordinal >= expected_records)
            throw std::runtime_error("split labels: ordinal " + std::to_string(ordinal) +
                                     " outside dataset of " + std::to_string(expected_records));
        if (seen[ordinal])
            throw std::runtime_error("split labels: ordinal " + std::to_string(ordinal) +
                                     " labeled twice");
        seen[ordinal] = true;
        split.labels[ordinal] = partition_from_name(row[*label_col]);
    }
    for (std::size_t i = 0; i < expected_records; ++i)
        if (!seen[i])
            throw std::runtime_error("split labels: ordinal " + std::to_string(i) + " unlabeled");
    return split;
}

inline void write_split(const std::filesystem::path& out, const SplitAssignment& split) {
    std::ostringstream csv;
    csv << "ordinal,label\n";
    for (std::size_t i = 0; i < split.labels.size(); ++i)
        csv << i << "," << partition_name(split.labels[i]) << "\n";
    atomic_write(out / artifacts::kSplitLabelsCsv, csv.str());

    const auto counts = split.counts();
    nlohmann::json meta;
    meta["strategy"] = split.strategy;
    meta["parameters"] = split.parameters;
    meta["seed"] = split.seed;
    meta["counts"] = {{"train", counts[0]}, {"validation", counts[1]}, {"test", counts[2]}};
    write_json(out / artifacts::kSplitMetaJson, meta);
}

inline nlohmann::json metrics_to_json(const MetricsReport& m) {
    // Key names mirror the published metric table rows.
    return {{"partition", m.partition},
            {"RSquare", m.r_square},
            {"RMSE", m.rmse},
            {"Mean Abs Dev", m.mean_abs_dev},
            {"-LogLikelihood", m.neg_log_likelihood},
            {"SSE", m.sse},
            {"Sum Freq", m.sum_freq}};
}

}  // namespace detail

inline int run(int argc, const char* const* argv) {
    using detail::Overlay;
    using detail::write_json;
    namespace fs = std::filesystem;

    CLI::App app{"noxcast — gas-turbine NOx emission modeling toolkit"};
    app.require_subcommand(1);
    std::uint64_t seed = 42;
    app.add_option("--seed", seed,
                   "Global seed; subsystems derive theirs as seed+1 (split), seed+2 (network "
                   "init), seed+3 (importance), seed+4 (optimizer)")
        ->capture_default_str();

    std::string out_flag;
    app.add_option("--out", out_flag, "Output directory (default: $NOXCAST_OUT or ./out)");
    std::string run_config_path;
    app.add_option("--config", run_config_path,
                   "Run-configuration JSON; fills in any flag not given explicitly");
    // Global options may appear after the subcommand name; let them fall
    // through to this parent parser.
    app.fallthrough();

    // Loads the --config overlay and applies the top-level keys (seed, out);
    // every callback starts with this.
    const auto common = [&]() {
        const Overlay overlay = Overlay::load(run_config_path);
        Overlay::assign(&overlay.root, &app, "--seed", "seed", seed);
        Overlay::assign(&overlay.root, &app, "--out", "out", out_flag);
        return overlay;
    };

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Load and validate the yearly CSV files");
    detail::DataArgs ingest_data;
    detail::add_data_options(ingest, ingest_data);
    ingest->callback([&]() {
        const Overlay overlay = common();
        detail::overlay_data(overlay, ingest, ingest_data);
        const fs::path out = detail::resolve_out(out_flag);
        LoadReport report;
        const Dataset dataset = detail::load_data(ingest_data, &report);
        nlohmann::json summary = dataset_summary(dataset);
        summary["rows_seen"] = report.rows_seen;
        summary["n_rejected"] = report.rejected.size();
        nlohmann::json diags = nlohmann::json::array();
        for (const auto& d : report.rejected)
            diags.push_back({{"file", d.file}, {"row", d.row}, {"column", d.column},
                             {"message", d.message}});
        summary["diagnostics"] = diags;
        summary["schema"] = schema_to_json(dataset.schema());
        write_json(out / artifacts::kSummaryJson, summary);
        std::cout << "ingested " << dataset.size() << " records ("
                  << report.rejected.size() << " rejected) -> "
                  << (out / artifacts::kSummaryJson).string() << "\n";
        for (const auto& d : report.rejected)
            std::cerr << "rejected " << d.file << ":" << d.row << " column " << d.column << ": "
                      << d.message << "\n";
    });

    // stats
    auto* stats_cmd = app.add_subcommand("stats", "Correlation matrix and per-column summaries");
    detail::DataArgs stats_data;
    detail::add_data_options(stats_cmd, stats_data);
    std::size_t bins = 30;
    stats_cmd->add_option("--bins", bins, "Histogram bin count")->capture_default_str();
    stats_cmd->callback([&]() {
        const Overlay overlay = common();
        detail::overlay_data(overlay, stats_cmd, stats_data);
        Overlay::assign(overlay.section("stats"), stats_cmd, "--bins", "bins", bins);
        const fs::path out = detail::resolve_out(out_flag);
        const Dataset dataset = detail::load_data(stats_data);
        const CorrelationMatrix corr = pearson_matrix(dataset);

        std::ostringstream csv;
        csv << "column";
        for (const auto& label : corr.labels) csv << "," << label;
        csv << "\n";
        for (std::size_t r = 0; r < corr.labels.size(); ++r) {
            csv << corr.labels[r];
            for (std::size_t c = 0; c < corr.labels.size(); ++c)
                csv << "," << format_double(corr.values[r][c]);
            csv << "\n";
        }
        atomic_write(out / artifacts::kCorrelationCsv, csv.str());

        nlohmann::json cols = nlohmann::json::object();
        for (std::size_t c = 0; c < kCanonicalColumns.size(); ++c) {
            const auto values = dataset.column(c);
            const BoxplotSummary s = five_number_summary(values);
            const Histogram h = histogram(values, bins);
            cols[std::string(kCanonicalColumns[c])] = {
                {"n", values.size()},
                {"summary",
                 {{"min", s.min},
                  {"q1", s.q1},
                  {"median", s.median},
                  {"q3", s.q3},
                  {"max", s.max},
                  {"iqr", s.iqr},
                  {"lower_fence", s.lower_fence},
                  {"upper_fence", s.upper_fence},
                  {"n_outliers", s.n_outliers}}},
                {"histogram", {{"edges", h.edges}, {"counts", h.counts}}}};
        }
        write_json(out / artifacts::kColumnStatsJson,
                   nlohmann::json{{"bins", bins}, {"columns", cols}});
        std::cout << "stats for " << dataset.size() << " records -> "
                  << (out / artifacts::kCorrelationCsv).string() << ", "
                  << (out / artifacts::kColumnStatsJson).string() << "\n";
    });

    // split
    auto* split_cmd = app.add_subcommand("split", "Assign records to train/validation/test");
    detail::DataArgs split_data;
    detail::add_data_options(split_cmd, split_data);
    std::string strategy;
    split_cmd->add_option("--strategy", strategy, "temporal | stratified");
    std::string train_years_s, val_years_s, test_years_s, fractions_s;
    split_cmd->add_option("--train-years", train_years_s, "Comma-separated years (temporal)");
    split_cmd->add_option("--val-years", val_years_s, "Comma-separated years (temporal)");
    split_cmd->add_option("--test-years", test_years_s, "Comma-separated years (temporal)");
    split_cmd->add_option("--fractions", fractions_s,
                          "train,validation,test fractions (stratified; default 0.6,0.2,0.2)");
    split_cmd->callback([&]() {
        const Overlay overlay = common();
        detail::overlay_data(overlay, split_cmd, split_data);
        const auto* section = overlay.section("split");
        Overlay::assign(section, split_cmd, "--strategy", "strategy", strategy);
        const fs::path out = detail::resolve_out(out_flag);
        const Dataset dataset = detail::load_data(split_data);

        // Year lists / fractions come from flags first, then the config
        // section's arrays, then defaults.
        const auto years_from = [&](const std::string& flag_value, const char* key) {
            if (!flag_value.empty()) return detail::parse_year_list(flag_value);
            if (section && section->contains(key)) return section->at(key).get<std::vector<int>>();
            throw std::runtime_error(std::string("temporal split needs ") + key);
        };

        SplitAssignment split;
        if (strategy == "temporal") {
            split = split_temporal(dataset, years_from(train_years_s, "train_years"),
                                   years_from(val_years_s, "val_years"),
                                   years_from(test_years_s, "test_years"));
        } else if (strategy == "stratified") {
            std::array<double, 3> f = {0.6, 0.2, 0.2};
            if (!fractions_s.empty()) {
                f = detail::parse_fractions(fractions_s);
            } else if (section && section->contains("fractions")) {
                const auto fractions = section->at("fractions").get<std::vector<double>>();
                if (fractions.size() != 3)
                    throw std::runtime_error("config split.fractions must have three entries");
                std::copy(fractions.begin(), fractions.end(), f.begin());
            }
            split = split_stratified(dataset, f[0], f[1], f[2], seed + kSplitSeedOffset);
        } else if (strategy.empty()) {
            throw std::runtime_error("split needs --strategy (temporal | stratified)");
        } else {
            throw std::runtime_error("unknown --strategy '" + strategy +
                                     "' (expected temporal or stratified)");
        }
        detail::write_split(out, split);
        const auto counts = split.counts();
        std::cout << "split " << split.strategy << ": train=" << counts[0]
                  << " validation=" << counts[1] << " test=" << counts[2] << " -> "
                  << (out / artifacts::kSplitLabelsCsv).string() << "\n";
    });

    // train
    auto* train_cmd = app.add_subcommand("train", "Train the mixed-activation network");
    detail::DataArgs train_data;
    detail::add_data_options(train_cmd, train_data);
    std::string train_split_path, train_config_path;
    double lr = 0.0, penalty = -1.0;
    std::uint64_t max_epochs = 0, patience = 0;
    train_cmd->add_option("--split", train_split_path, "split_labels.csv from `noxcast split`");
    train_cmd->add_option("--train-config", train_config_path,
                          "TrainConfig JSON (flags override it)");
    train_cmd->add_option("--learning-rate", lr, "Adam learning rate (default 0.01)");
    train_cmd->add_option("--max-epochs", max_epochs, "Epoch budget (default 2000)");
    train_cmd->add_option("--patience", patience,
                          "Epochs without validation improvement before stopping (default 100)");
    train_cmd->add_option("--penalty", penalty, "Weight penalty lambda (default 1e-4)");
    train_cmd->callback([&]() {
        const Overlay overlay = common();
        detail::overlay_data(overlay, train_cmd, train_data);
        const auto* section = overlay.section("train");
        Overlay::assign(section, train_cmd, "--split", "split_labels", train_split_path);
        if (train_split_path.empty())
            throw std::runtime_error("train needs --split (or config train.split_labels)");
        const fs::path out = detail::resolve_out(out_flag);
        const Dataset dataset = detail::load_data(train_data);
        const SplitAssignment split = detail::load_split_labels(train_split_path, dataset.size());

        TrainConfig config;
        config.seed = seed + kInitSeedOffset;
        bool patience_explicit = false;
        bool seed_explicit = false;
        if (!train_config_path.empty()) {
            const auto j = nlohmann::json::parse(read_file(train_config_path));
            const std::uint64_t derived = config.seed;
            config = train_config_from_json(j);
            if (!j.contains("seed")) config.seed = derived;
            seed_explicit = j.contains("seed");
            patience_explicit = j.contains("patience");
        }
        if (section) {
            Overlay::assign(section, train_cmd, "--learning-rate", "learning_rate",
                            config.learning_rate);
            Overlay::assign(section, train_cmd, "--max-epochs", "max_epochs", config.max_epochs);
            Overlay::assign(section, train_cmd, "--penalty", "penalty", config.penalty);
            if (section->contains("patience") && train_cmd->count("--patience") == 0) {
                config.patience = section->at("patience").get<std::size_t>();
                patience_explicit = true;
            }
            if (section->contains("seed") && !seed_explicit)
                config.seed = section->at("seed").get<std::uint64_t>();
        }
        if (train_cmd->count("--learning-rate")) config.learning_rate = lr;
        if (train_cmd->count("--max-epochs")) config.max_epochs = max_epochs;
        if (train_cmd->count("--patience")) {
            config.patience = patience;
            patience_explicit = true;
        }
        if (train_cmd->count("--penalty")) config.penalty = penalty;
        // A defaulted patience follows a shortened epoch budget.
        if (!patience_explicit) config.patience = std::min(config.patience, config.max_epochs);
        config.validate();

        const std::vector<LayerSpec> specs = {LayerSpec::mixed_five(), LayerSpec::mixed_five()};
        TrainResult result = train(dataset, split, specs, config);

        nlohmann::json model = network_to_json(result.network);
        model["training"] = {
            {"config", train_config_to_json(config)},
            {"epochs_run", result.history.epochs.size()},
            {"best_epoch", result.history.best_epoch},
            {"stop_reason", stop_reason_name(result.history.stop_reason)},
            {"best_validation_sse", result.history.epochs[result.history.best_epoch].validation_sse}};
        write_json(out / artifacts::kModelJson, model);

        std::ostringstream history;
        history << "epoch,train_loss,validation_sse\n";
        for (std::size_t e = 0; e < result.history.epochs.size(); ++e)
            history << (e + 1) << "," << format_double(result.history.epochs[e].train_loss) << ","
                    << format_double(result.history.epochs[e].validation_sse) << "\n";
        atomic_write(out / artifacts::kHistoryCsv, history.str());

        std::cout << "trained " << result.history.epochs.size() << " epochs (stop: "
                  << stop_reason_name(result.history.stop_reason) << ", best epoch "
                  << (result.history.best_epoch + 1) << ") -> "
                  << (out / artifacts::kModelJson).string() << "\n";
    });

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "Metrics and residuals per partition");
    detail::DataArgs eval_data;
    detail::add_data_options(eval_cmd, eval_data);
    std::string eval_split_path, eval_model_path;
    eval_cmd->add_option("--split", eval_split_path, "split_labels.csv");
    eval_cmd->add_option("--model", eval_model_path, "model.json");
    eval_cmd->callback([&]() {
        const Overlay overlay = common();
        detail::overlay_data(overlay, eval_cmd, eval_data);
        const auto* section = overlay.section("evaluate");
        Overlay::assign(section, eval_cmd, "--split", "split_labels", eval_split_path);
        Overlay::assign(section, eval_cmd, "--model", "model", eval_model_path);
        if (eval_split_path.empty() || eval_model_path.empty())
            throw std::runtime_error("evaluate needs --split and --model");
        const fs::path out = detail::resolve_out(out_flag);
        const Dataset dataset = detail::load_data(eval_data);
        const SplitAssignment split = detail::load_split_labels(eval_split_path, dataset.size());
        const Network net = load_model(eval_model_path);
        for (Partition p : kPartitions) {
            const MetricsReport metrics = evaluate(net, dataset, split, p);
            write_json(out / artifacts::metrics_json(metrics.partition),
                       detail::metrics_to_json(metrics));
            const ResidualTable residuals = residual_table(net, dataset, split, p);
            std::ostringstream csv;
            csv << "actual,predicted,residual\n";
            for (const auto& row : residuals.rows)
                csv << format_double(row.actual) << "," << format_double(row.predicted) << ","
                    << format_double(row.residual) << "\n";
            atomic_write(out / artifacts::residuals_csv(metrics.partition), csv.str());
            std::cout << metrics.partition << ": RSquare=" << metrics.r_square
                      << " RMSE=" << metrics.rmse << " n=" << metrics.sum_freq << "\n";
        }
    });

    // importance
    auto* imp_cmd = app.add_subcommand("importance", "Permutation variable importance");
    detail::DataArgs imp_data;
    detail::add_data_options(imp_cmd, imp_data);
    std::string imp_split_path, imp_model_path, imp_partition = "validation";
    std::size_t repeats = 10;
    imp_cmd->add_option("--split", imp_split_path, "split_labels.csv");
    imp_cmd->add_option("--model", imp_model_path, "model.json");
    imp_cmd->add_option("--partition", imp_partition, "train | validation | test")
        ->capture_default_str();
    imp_cmd->add_option("--repeats", repeats, "Permutations per variable (K)")
        ->capture_default_str();
    imp_cmd->callback([&]() {
        const Overlay overlay = common();
        detail::overlay_data(overlay, imp_cmd, imp_data);
        const auto* section = overlay.section("importance");
        Overlay::assign(section, imp_cmd, "--split", "split_labels", imp_split_path);
        Overlay::assign(section, imp_cmd, "--model", "model", imp_model_path);
        Overlay::assign(section, imp_cmd, "--partition", "partition", imp_partition);
        Overlay::assign(section, imp_cmd, "--repeats", "repeats", repeats);
        if (imp_split_path.empty() || imp_model_path.empty())
            throw std::runtime_error("importance needs --split and --model");
        const fs::path out = detail::resolve_out(out_flag);
        const Dataset dataset = detail::load_data(imp_data);
        const SplitAssignment split = detail::load_split_labels(imp_split_path, dataset.size());
        const Network net = load_model(imp_model_path);
        const ImportanceRanking ranking =
            permutation_importance(net, dataset, split, partition_from_name(imp_partition),
                                   repeats, seed + kImportanceSeedOffset);
        std::ostringstream csv;
        csv << "variable,score,std,rank\n";
        for (std::size_t i = 0; i < ranking.entries.size(); ++i)
            csv << ranking.entries[i].variable << "," << format_double(ranking.entries[i].score)
                << "," << format_double(ranking.entries[i].score_std) << "," << (i + 1) << "\n";
        atomic_write(out / artifacts::kImportanceCsv, csv.str());
        std::cout << "importance on " << ranking.partition << " (K=" << ranking.repetitions
                  << "): top=" << ranking.entries.front().variable << " -> "
                  << (out / artifacts::kImportanceCsv).string() << "\n";
    });

    // profile
    auto* prof_cmd = app.add_subcommand("profile", "Prediction-profiler curves");
    detail::DataArgs prof_data;
    detail::add_data_options(prof_cmd, prof_data);
    std::string prof_model_path, variables = "all";
    std::size_t grid_n = 50;
    prof_cmd->add_option("--model", prof_model_path, "model.json");
    prof_cmd->add_option("--variables", variables, "Comma-separated predictors, or 'all'")
        ->capture_default_str();
    prof_cmd->add_option("--grid-n", grid_n, "Grid points per curve")->capture_default_str();
    prof_cmd->callback([&]() {
        const Overlay overlay = common();
        detail::overlay_data(overlay, prof_cmd, prof_data);
        const auto* section = overlay.section("profile");
        Overlay::assign(section, prof_cmd, "--model", "model", prof_model_path);
        Overlay::assign(section, prof_cmd, "--grid-n", "grid_n", grid_n);
        if (prof_model_path.empty()) throw std::runtime_error("profile needs --model");
        const fs::path out = detail::resolve_out(out_flag);
        const Dataset dataset = detail::load_data(prof_data);
        const Network net = load_model(prof_model_path);
        std::vector<std::string> wanted;
        if (section && section->contains("variables") && prof_cmd->count("--variables") == 0) {
            wanted = section->at("variables").get<std::vector<std::string>>();
        } else if (variables == "all") {
            for (auto name : kPredictorNames) wanted.emplace_back(name);
        } else {
            std::stringstream ss(variables);
            std::string item;
            while (std::getline(ss, item, ',')) wanted.push_back(item);
        }
        const auto base = median_base(dataset);
        nlohmann::json base_json = nlohmann::json::object();
        for (std::size_t p = 0; p < kNumPredictors; ++p)
            base_json[std::string(kPredictorNames[p])] = base[p];
        write_json(out / artifacts::kProfileBaseJson,
                   nlohmann::json{{"base", base_json}, {"grid_n", grid_n}});
        for (const auto& var : wanted) {
            const ProfileCurve curve = profile(net, dataset, var, grid_n, &base);
            std::ostringstream csv;
            csv << var << ",prediction\n";
            for (std::size_t i = 0; i < curve.grid.size(); ++i)
                csv << format_double(curve.grid[i]) << "," << format_double(curve.predictions[i])
                    << "\n";
            atomic_write(out / artifacts::profile_csv(var), csv.str());
        }
        std::cout << "profiled " << wanted.size() << " variables -> "
                  << (out / "profile_<VAR>.csv").string() << "\n";
    });

    // optimize
    auto* opt_cmd = app.add_subcommand("optimize", "Minimize predicted NOx over the operating box");
    detail::DataArgs opt_data;
    detail::add_data_options(opt_cmd, opt_data);
    std::string opt_model_path;
    std::size_t n_starts = 32;
    double y_low = 0.0, y_high = 0.0;
    opt_cmd->add_option("--model", opt_model_path, "model.json");
    opt_cmd->add_option("--n-starts", n_starts, "Multi-start budget")->capture_default_str();
    opt_cmd->add_option("--y-low", y_low, "Desirability lower bound (default: observed NOx min)");
    opt_cmd->add_option("--y-high", y_high, "Desirability upper bound (default: observed NOx max)");
    opt_cmd->callback([&]() {
        const Overlay overlay = common();
        detail::overlay_data(overlay, opt_cmd, opt_data);
        const auto* section = overlay.section("optimize");
        Overlay::assign(section, opt_cmd, "--model", "model", opt_model_path);
        Overlay::assign(section, opt_cmd, "--n-starts", "n_starts", n_starts);
        if (opt_model_path.empty()) throw std::runtime_error("optimize needs --model");
        const fs::path out = detail::resolve_out(out_flag);
        const Dataset dataset = detail::load_data(opt_data);
        const Network net = load_model(opt_model_path);
        const BoxConstraints box = BoxConstraints::from_dataset(dataset);

        std::optional<DesirabilitySpec> spec;
        const bool bounds_from_flags = opt_cmd->count("--y-low") || opt_cmd->count("--y-high");
        const bool bounds_from_config =
            section && section->contains("y_low") && section->contains("y_high");
        if (bounds_from_flags || bounds_from_config) {
            Overlay::assign(section, opt_cmd, "--y-low", "y_low", y_low);
            Overlay::assign(section, opt_cmd, "--y-high", "y_high", y_high);
            spec = DesirabilitySpec{DesirabilityMode::Minimize, y_low, y_high, 1.0};
            spec->validate();
        }
        const OptimizationResult result = minimize_response(
            net, dataset, box, n_starts, seed + kOptimizerSeedOffset, spec ? &*spec : nullptr);

        nlohmann::json xj = nlohmann::json::object();
        for (std::size_t p = 0; p < kNumPredictors; ++p)
            xj[std::string(kPredictorNames[p])] = result.x_star[p];
        write_json(out / artifacts::kOptimumJson,
                   nlohmann::json{{"x_star", xj},
                                  {"predicted_nox", result.predicted_nox},
                                  {"desirability", result.desirability},
                                  {"n_starts", result.n_starts},
                                  {"seed", seed + kOptimizerSeedOffset}});

        std::ostringstream csv;
        csv << "start";
        for (auto name : kPredictorNames) csv << "," << name;
        csv << ",final_value,sweeps\n";
        for (std::size_t s = 0; s < result.trace.size(); ++s) {
            csv << s;
            for (double v : result.trace[s].start) csv << "," << format_double(v);
            csv << "," << format_double(result.trace[s].final_value) << ","
                << result.trace[s].sweeps << "\n";
        }
        atomic_write(out / artifacts::kOptimizerTraceCsv, csv.str());
        std::cout << "optimum predicted NOx " << result.predicted_nox << " mg/m³ -> "
                  << (out / artifacts::kOptimumJson).string() << "\n";
    });

    // report
    auto* report_cmd = app.add_subcommand("report", "Assemble report.md from run artifacts");
    report_cmd->callback([&]() {
        common();
        const fs::path out = detail::resolve_out(out_flag);
        const ReportResult report = generate_report(out);
        if (report.rendered.empty()) {
            std::ostringstream msg;
            msg << "report: no artifacts found under " << out.string() << "; run first:";
            for (const auto& missing : report.missing) msg << "\n  - " << missing;
            throw std::runtime_error(msg.str());
        }
        atomic_write(out / artifacts::kReportMd, report.markdown);
        std::cout << "report (" << report.rendered.size() << " sections) -> "
                  << (out / artifacts::kReportMd).string() << "\n";
        for (const auto& missing : report.missing)
            std::cerr << "not run: " << missing << "\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "noxcast: error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

inline int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back("noxcast");
    for (const auto& arg : args) argv.push_back(arg.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace noxcast::cli
