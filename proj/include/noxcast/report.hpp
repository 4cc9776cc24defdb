#pragma once

// Markdown report assembled from the artifacts of previous subcommand runs.
// Pure function of the artifact bytes: regenerating from unchanged artifacts
// yields a byte-identical document. Sections whose artifacts are missing are
// flagged as not run, with the command that produces them.

#include <algorithm>
#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "noxcast/artifacts.hpp"
#include "noxcast/dataset.hpp"
#include "noxcast/io.hpp"

namespace noxcast {

namespace detail {

inline std::optional<nlohmann::json> try_json(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) return std::nullopt;
    return nlohmann::json::parse(read_file(path));
}

inline std::string md_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '|') out += "\\|";
        else out.push_back(c);
    }
    return out;
}

inline void csv_as_md_table(std::ostringstream& out, const CsvTable& table) {
    out << "|";
    for (const auto& h : table.header) out << " " << md_escape(h) << " |";
    out << "\n|";
    for (std::size_t i = 0; i < table.header.size(); ++i) out << " --- |";
    out << "\n";
    for (const auto& row : table.rows) {
        out << "|";
        for (const auto& cell : row) out << " " << md_escape(cell) << " |";
        out << "\n";
    }
}

inline std::string fmt_metric(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) return "—";
    if (j.at(key).is_number_integer()) return std::to_string(j.at(key).get<long long>());
    return format_double(j.at(key).get<double>());
}

}  // namespace detail

struct ReportResult {
    std::string markdown;
    std::vector<std::string> rendered;  // section names that had artifacts
    std::vector<std::string> missing;   // "artifact (command to run)" entries
};

inline ReportResult generate_report(const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    ReportResult result;
    std::ostringstream md;
    md << "# NOxCast run report\n\n";
    md << "All numbers below are read verbatim from the artifact files named in each section.\n\n";

    // Dataset summary
    if (auto summary = detail::try_json(out_dir / artifacts::kSummaryJson)) {
        md << "## Dataset\n\nSource: `" << artifacts::kSummaryJson << "`\n\n";
        md << "- Records: " << (*summary)["n_records"].get<std::size_t>() << "\n";
        if (summary->contains("per_year")) {
            md << "- Per year:";
            for (auto& [year, count] : (*summary)["per_year"].items())
                md << " " << year << "=" << count.get<std::size_t>();
            md << "\n";
        }
        if (summary->contains("n_rejected"))
            md << "- Rejected rows: " << (*summary)["n_rejected"].get<std::size_t>() << "\n";
        md << "\n";
        result.rendered.push_back("dataset");
    } else {
        md << "## Dataset\n\n_Not run._ Run `noxcast ingest --data <files> --out <dir>` to generate `"
           << artifacts::kSummaryJson << "`.\n\n";
        result.missing.emplace_back(std::string(artifacts::kSummaryJson) + " (noxcast ingest)");
    }

    // Correlation matrix
    if (fs::exists(out_dir / artifacts::kCorrelationCsv)) {
        md << "## Correlation analysis\n\nSource: `" << artifacts::kCorrelationCsv << "`\n\n";
        detail::csv_as_md_table(md, read_csv(out_dir / artifacts::kCorrelationCsv));
        md << "\n";
        result.rendered.push_back("correlation");
    } else {
        md << "## Correlation analysis\n\n_Not run._ Run `noxcast stats --data <files> --out <dir>` "
              "to generate `"
           << artifacts::kCorrelationCsv << "`.\n\n";
        result.missing.emplace_back(std::string(artifacts::kCorrelationCsv) + " (noxcast stats)");
    }

    // Model runs: any subdirectory holding split_meta.json, in sorted order.
    std::vector<fs::path> run_dirs;
    if (fs::exists(out_dir))
        for (const auto& entry : fs::directory_iterator(out_dir))
            if (entry.is_directory() && fs::exists(entry.path() / artifacts::kSplitMetaJson))
                run_dirs.push_back(entry.path());
    std::sort(run_dirs.begin(), run_dirs.end());

    md << "## Model runs\n\n";
    if (run_dirs.empty()) {
        md << "_Not run._ Run `noxcast split`, `noxcast train`, and `noxcast evaluate` into a "
              "subdirectory of this output directory.\n\n";
        result.missing.emplace_back(std::string(artifacts::kSplitMetaJson) +
                                    " (noxcast split/train/evaluate)");
    } else {
        for (const auto& dir : run_dirs) {
            const std::string name = dir.filename().string();
            auto meta = detail::try_json(dir / artifacts::kSplitMetaJson);
            md << "### Run `" << name << "`";
            if (meta && meta->contains("strategy"))
                md << " — " << (*meta)["strategy"].get<std::string>() << " split";
            md << "\n\n";
            if (meta) {
                md << "Split: `" << name << "/" << artifacts::kSplitMetaJson << "`";
                if (meta->contains("counts")) {
                    md << " — records";
                    for (auto& [part, count] : (*meta)["counts"].items())
                        md << " " << part << "=" << count.get<std::size_t>();
                }
                md << "\n\n";
            }

            const std::array<const char*, 3> partitions = {"train", "validation", "test"};
            std::map<std::string, nlohmann::json> metrics;
            for (const char* p : partitions)
                if (auto m = detail::try_json(dir / artifacts::metrics_json(p))) metrics[p] = *m;
            if (!metrics.empty()) {
                md << "Metrics (`" << name << "/metrics_<partition>.json`):\n\n";
                md << "| Measure |";
                for (const char* p : partitions)
                    if (metrics.contains(p)) md << " " << p << " |";
                md << "\n| --- |";
                for (const char* p : partitions)
                    if (metrics.contains(p)) md << " --- |";
                md << "\n";
                const std::array<const char*, 6> rows = {"RSquare",        "RMSE", "Mean Abs Dev",
                                                         "-LogLikelihood", "SSE",  "Sum Freq"};
                for (const char* row : rows) {
                    md << "| " << row << " |";
                    for (const char* p : partitions)
                        if (metrics.contains(p)) md << " " << detail::fmt_metric(metrics[p], row) << " |";
                    md << "\n";
                }
                md << "\n";
            } else {
                md << "Metrics: _not run._ Run `noxcast evaluate --data <files> --split " << name
                   << "/" << artifacts::kSplitLabelsCsv << " --model " << name << "/"
                   << artifacts::kModelJson << " --out " << name << "`.\n\n";
                result.missing.emplace_back(name + "/metrics_<partition>.json (noxcast evaluate)");
            }

            if (auto model = detail::try_json(dir / artifacts::kModelJson)) {
                if (model->contains("training")) {
                    const auto& t = (*model)["training"];
                    md << "Training (`" << name << "/" << artifacts::kModelJson << "`): ";
                    md << "epochs=" << detail::fmt_metric(t, "epochs_run")
                       << ", best epoch=" << detail::fmt_metric(t, "best_epoch")
                       << ", stop=" << t.value("stop_reason", std::string("?"))
                       << ", seed=" << detail::fmt_metric(*model, "seed") << "\n\n";
                }
            }

            if (fs::exists(dir / artifacts::kImportanceCsv)) {
                md << "Variable importance (`" << name << "/" << artifacts::kImportanceCsv
                   << "`):\n\n";
                detail::csv_as_md_table(md, read_csv(dir / artifacts::kImportanceCsv));
                md << "\n";
            }

            std::vector<fs::path> profiles;
            for (auto name_sv : kPredictorNames) {
                const fs::path p = dir / artifacts::profile_csv(name_sv);
                if (fs::exists(p)) profiles.push_back(p);
            }
            if (!profiles.empty()) {
                md << "Prediction profiles (`" << name << "/profile_<VAR>.csv`): ";
                for (std::size_t i = 0; i < profiles.size(); ++i) {
                    if (i) md << ", ";
                    md << "`" << profiles[i].filename().string() << "`";
                }
                md << "\n\n";
            }

            if (auto opt = detail::try_json(dir / artifacts::kOptimumJson)) {
                md << "Optimum (`" << name << "/" << artifacts::kOptimumJson << "`): predicted NOx "
                   << detail::fmt_metric(*opt, "predicted_nox") << " mg/m³ at desirability "
                   << detail::fmt_metric(*opt, "desirability") << "\n\n";
                if (opt->contains("x_star")) {
                    md << "| Variable | Setting |\n| --- | --- |\n";
                    for (auto& [var, value] : (*opt)["x_star"].items())
                        md << "| " << var << " | " << format_double(value.get<double>()) << " |\n";
                    md << "\n";
                }
            }
            result.rendered.push_back("run:" + name);
        }
    }

    result.markdown = md.str();
    return result;
}

}  // namespace noxcast
