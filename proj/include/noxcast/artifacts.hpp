#pragma once

// Fixed artifact file names shared by the CLI writers and the report
// generator. Per-variable profiles are profile_<VAR>.csv and per-partition
// metrics/residuals are metrics_<partition>.json / residuals_<partition>.csv.

#include <string>
#include <string_view>

namespace noxcast::artifacts {

inline constexpr std::string_view kSummaryJson = "summary.json";
inline constexpr std::string_view kCorrelationCsv = "correlation.csv";
inline constexpr std::string_view kColumnStatsJson = "column_stats.json";
inline constexpr std::string_view kSplitLabelsCsv = "split_labels.csv";
inline constexpr std::string_view kSplitMetaJson = "split_meta.json";
inline constexpr std::string_view kModelJson = "model.json";
inline constexpr std::string_view kHistoryCsv = "history.csv";
inline constexpr std::string_view kImportanceCsv = "importance.csv";
inline constexpr std::string_view kProfileBaseJson = "profile_base.json";
inline constexpr std::string_view kOptimumJson = "optimum.json";
inline constexpr std::string_view kOptimizerTraceCsv = "optimizer_trace.csv";
inline constexpr std::string_view kReportMd = "report.md";

inline std::string metrics_json(std::string_view partition) {
    return "metrics_" + std::string(partition) + ".json";
}

inline std::string residuals_csv(std::string_view partition) {
    return "residuals_" + std::string(partition) + ".csv";
}

inline std::string profile_csv(std::string_view variable) {
    return "profile_" + std::string(variable) + ".csv";
}

}  // namespace noxcast::artifacts
