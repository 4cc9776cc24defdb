#pragma once

// Ingestion of the hourly gas-turbine CSV files (one file per year) into an
// immutable in-memory dataset: canonical column schema, per-year record
// index, row-level rejection diagnostics, and the predictor standardizer.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "noxcast/io.hpp"

namespace noxcast {

inline constexpr std::size_t kNumPredictors = 9;

// Canonical column order: nine predictors, response last.
inline constexpr std::array<std::string_view, 10> kCanonicalColumns = {
    "AT", "AP", "AH", "AFDP", "TEP", "TIT", "TET", "TEY", "CDP", "NOX"};

inline constexpr std::array<std::string_view, kNumPredictors> kPredictorNames = {
    "AT", "AP", "AH", "AFDP", "TEP", "TIT", "TET", "TEY", "CDP"};

inline std::size_t predictor_index(std::string_view name) {
    for (std::size_t i = 0; i < kPredictorNames.size(); ++i)
        if (kPredictorNames[i] == name) return i;
    throw std::invalid_argument("unknown predictor: " + std::string(name));
}

struct ColumnSpec {
    std::string canonical_name;
    std::string source_name;  // header text in the raw file
    std::string unit;
};

using ColumnSchema = std::vector<ColumnSpec>;

// Mapping for the public dataset files, whose headers label turbine exhaust
// pressure as GTEP and turbine exhaust temperature as TAT.
inline ColumnSchema default_schema() {
    return {
        {"AT", "AT", "°C"},      {"AP", "AP", "mbar"},   {"AH", "AH", "%"},
        {"AFDP", "AFDP", "mbar"}, {"TEP", "GTEP", "mbar"}, {"TIT", "TIT", "°C"},
        {"TET", "TAT", "°C"},    {"TEY", "TEY", "MWh"},  {"CDP", "CDP", "bar"},
        {"NOX", "NOX", "mg/m³"},
    };
}

inline void validate_schema(const ColumnSchema& schema) {
    if (schema.size() != kCanonicalColumns.size())
        throw std::invalid_argument("schema must define exactly 10 columns");
    for (std::string_view name : kCanonicalColumns) {
        std::size_t hits = 0;
        for (const auto& col : schema)
            if (col.canonical_name == name) ++hits;
        if (hits != 1)
            throw std::invalid_argument("schema must map canonical column '" + std::string(name) +
                                        "' exactly once");
    }
}

inline ColumnSchema load_schema(const std::filesystem::path& path) {
    nlohmann::json j = nlohmann::json::parse(read_file(path));
    ColumnSchema schema;
    for (std::string_view name : kCanonicalColumns) {
        auto it = j.find(std::string(name));
        if (it == j.end())
            throw std::runtime_error("schema file " + path.string() + ": missing entry for '" +
                                     std::string(name) + "'");
        schema.push_back({std::string(name), it->at("source_name").get<std::string>(),
                          it->at("unit").get<std::string>()});
    }
    validate_schema(schema);
    return schema;
}

inline nlohmann::json schema_to_json(const ColumnSchema& schema) {
    nlohmann::json j;
    for (const auto& col : schema)
        j[col.canonical_name] = {{"source_name", col.source_name}, {"unit", col.unit}};
    return j;
}

struct ProcessRecord {
    int year = 0;
    std::array<double, kNumPredictors> predictors{};
    double nox = 0.0;
};

struct LoadDiagnostic {
    std::string file;
    std::size_t row = 0;  // 1-based data row within the file (header excluded)
    std::string column;
    std::string message;
};

struct LoadReport {
    std::size_t rows_seen = 0;
    std::vector<LoadDiagnostic> rejected;
};

class Dataset {
public:
    Dataset() : schema_(default_schema()) {}
    Dataset(std::vector<ProcessRecord> records, ColumnSchema schema)
        : records_(std::move(records)), schema_(std::move(schema)) {
        validate_schema(schema_);
        rebuild_year_index();
    }

    const std::vector<ProcessRecord>& records() const { return records_; }
    const ColumnSchema& schema() const { return schema_; }
    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }

    const std::map<int, std::vector<std::size_t>>& year_index() const { return year_index_; }

    std::vector<int> years() const {
        std::vector<int> out;
        out.reserve(year_index_.size());
        for (const auto& [year, _] : year_index_) out.push_back(year);
        return out;
    }

    // Column values in record order; index 0..8 = predictors, 9 = NOX.
    std::vector<double> column(std::size_t column_index) const {
        if (column_index >= kCanonicalColumns.size())
            throw std::invalid_argument("column index out of range");
        std::vector<double> out;
        out.reserve(records_.size());
        for (const auto& rec : records_)
            out.push_back(column_index < kNumPredictors ? rec.predictors[column_index] : rec.nox);
        return out;
    }

    std::vector<double> column(std::string_view canonical_name) const {
        for (std::size_t i = 0; i < kCanonicalColumns.size(); ++i)
            if (kCanonicalColumns[i] == canonical_name) return column(i);
        throw std::invalid_argument("unknown column: " + std::string(canonical_name));
    }

private:
    void rebuild_year_index() {
        year_index_.clear();
        for (std::size_t i = 0; i < records_.size(); ++i)
            year_index_[records_[i].year].push_back(i);
    }

    std::vector<ProcessRecord> records_;
    ColumnSchema schema_;
    std::map<int, std::vector<std::size_t>> year_index_;
};

// A four-digit year embedded in the file name, e.g. gt_2013.csv.
inline std::optional<int> infer_year_from_path(const std::filesystem::path& path) {
    const std::string name = path.filename().string();
    for (std::size_t i = 0; i + 4 <= name.size(); ++i) {
        if (std::isdigit(static_cast<unsigned char>(name[i])) &&
            std::isdigit(static_cast<unsigned char>(name[i + 1])) &&
            std::isdigit(static_cast<unsigned char>(name[i + 2])) &&
            std::isdigit(static_cast<unsigned char>(name[i + 3]))) {
            const int year = (name[i] - '0') * 1000 + (name[i + 1] - '0') * 100 +
                             (name[i + 2] - '0') * 10 + (name[i + 3] - '0');
            if (year >= 1990 && year <= 2099) return year;
        }
    }
    return std::nullopt;
}

// Loads one file per year. Files are processed in path-sorted order so the
// record order (and therefore every downstream seeded computation) is stable
// across reloads. Rows with missing or non-numeric values are rejected and
// reported in the LoadReport, never imputed. `year_overrides` maps a path to
// its year when the file name carries none.
inline Dataset load_csv(std::vector<std::filesystem::path> paths, const ColumnSchema& schema,
                        LoadReport* report = nullptr,
                        const std::map<std::string, int>& year_overrides = {}) {
    validate_schema(schema);
    if (paths.empty()) throw std::invalid_argument("load_csv: no input files");
    std::sort(paths.begin(), paths.end());

    LoadReport local;
    std::vector<ProcessRecord> records;
    for (const auto& path : paths) {
        int year = 0;
        if (auto it = year_overrides.find(path.string()); it != year_overrides.end()) {
            year = it->second;
        } else if (auto inferred = infer_year_from_path(path)) {
            year = *inferred;
        } else {
            throw std::runtime_error("load_csv: cannot determine year for " + path.string() +
                                     " (no 4-digit year in file name; pass an explicit year)");
        }

        CsvTable table = read_csv(path);
        std::array<std::size_t, 10> source_index{};
        for (std::size_t c = 0; c < schema.size(); ++c) {
            auto idx = table.column(schema[c].source_name);
            if (!idx)
                throw std::runtime_error("load_csv: " + path.string() + ": missing column '" +
                                         schema[c].source_name + "'");
            source_index[c] = *idx;
        }

        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            const auto& row = table.rows[r];
            ++local.rows_seen;
            ProcessRecord rec;
            rec.year = year;
            bool ok = true;
            for (std::size_t c = 0; c < schema.size() && ok; ++c) {
                const auto& col = schema[c];
                if (source_index[c] >= row.size()) {
                    local.rejected.push_back({path.string(), r + 1, col.source_name,
                                              "row has too few fields"});
                    ok = false;
                    break;
                }
                const std::string& cell = row[source_index[c]];
                auto value = parse_double(cell);
                if (!value || !std::isfinite(*value)) {
                    local.rejected.push_back({path.string(), r + 1, col.source_name,
                                              "non-numeric value '" + cell + "'"});
                    ok = false;
                    break;
                }
                if (col.canonical_name == "NOX")
                    rec.nox = *value;
                else
                    rec.predictors[predictor_index(col.canonical_name)] = *value;
            }
            if (ok) records.push_back(rec);
        }
    }
    if (report) *report = std::move(local);
    return Dataset(std::move(records), schema);
}

// Per-predictor centering/scaling. Population standard deviation (divisor n).
class Standardizer {
public:
    Standardizer() = default;
    Standardizer(std::vector<double> mean, std::vector<double> stddev, std::string fitted_on)
        : mean_(std::move(mean)), stddev_(std::move(stddev)), fitted_on_(std::move(fitted_on)) {
        if (mean_.size() != stddev_.size())
            throw std::invalid_argument("standardizer: mean/std size mismatch");
        for (double s : stddev_)
            if (!(s > 0.0)) throw std::invalid_argument("standardizer: non-positive std");
    }

    bool fitted() const { return !mean_.empty(); }
    std::size_t dimension() const { return mean_.size(); }
    const std::vector<double>& mean() const { return mean_; }
    const std::vector<double>& stddev() const { return stddev_; }
    const std::string& fitted_on() const { return fitted_on_; }

    void apply(std::span<const double> x, std::span<double> z) const {
        check(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) z[i] = (x[i] - mean_[i]) / stddev_[i];
    }

    void invert(std::span<const double> z, std::span<double> x) const {
        check(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) x[i] = z[i] * stddev_[i] + mean_[i];
    }

    std::vector<double> apply(std::span<const double> x) const {
        std::vector<double> z(x.size());
        apply(x, z);
        return z;
    }

    std::vector<double> invert(std::span<const double> z) const {
        std::vector<double> x(z.size());
        invert(z, x);
        return x;
    }

private:
    void check(std::size_t n) const {
        if (!fitted()) throw std::logic_error("standardizer not fitted");
        if (n != mean_.size()) throw std::invalid_argument("standardizer: dimension mismatch");
    }

    std::vector<double> mean_;
    std::vector<double> stddev_;
    std::string fitted_on_;
};

// Fits over the given record ordinals only (typically the training
// partition). Errors out on a constant predictor, naming it.
inline Standardizer fit_standardizer(const Dataset& dataset, std::span<const std::size_t> subset,
                                     std::string fitted_on = "train") {
    if (subset.empty()) throw std::invalid_argument("fit_standardizer: empty subset");
    const double n = static_cast<double>(subset.size());
    std::vector<double> mean(kNumPredictors, 0.0), stddev(kNumPredictors, 0.0);
    for (std::size_t i : subset)
        for (std::size_t p = 0; p < kNumPredictors; ++p)
            mean[p] += dataset.records()[i].predictors[p];
    for (double& m : mean) m /= n;
    for (std::size_t i : subset)
        for (std::size_t p = 0; p < kNumPredictors; ++p) {
            const double d = dataset.records()[i].predictors[p] - mean[p];
            stddev[p] += d * d;
        }
    for (std::size_t p = 0; p < kNumPredictors; ++p) {
        stddev[p] = std::sqrt(stddev[p] / n);
        if (!(stddev[p] > 0.0))
            throw std::runtime_error("fit_standardizer: constant column '" +
                                     std::string(kPredictorNames[p]) + "' (std = 0)");
    }
    return Standardizer(std::move(mean), std::move(stddev), std::move(fitted_on));
}

// JSON summary emitted by `noxcast ingest`: record count, per-year counts,
// per-column min/max/mean.
inline nlohmann::json dataset_summary(const Dataset& dataset) {
    nlohmann::json j;
    j["n_records"] = dataset.size();
    nlohmann::json per_year = nlohmann::json::object();
    for (const auto& [year, ordinals] : dataset.year_index())
        per_year[std::to_string(year)] = ordinals.size();
    j["per_year"] = per_year;
    nlohmann::json cols = nlohmann::json::object();
    for (std::size_t c = 0; c < kCanonicalColumns.size(); ++c) {
        const auto values = dataset.column(c);
        if (values.empty()) continue;
        double lo = values[0], hi = values[0], sum = 0.0;
        for (double v : values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            sum += v;
        }
        cols[std::string(kCanonicalColumns[c])] = {
            {"min", lo}, {"max", hi}, {"mean", sum / static_cast<double>(values.size())}};
    }
    j["columns"] = cols;
    return j;
}

}  // namespace noxcast
