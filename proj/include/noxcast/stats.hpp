#pragma once

// Descriptive statistics over dataset columns: five-number/boxplot summaries
// with Tukey fences, equal-width histograms, and the Pearson correlation
// matrix of all ten columns.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "noxcast/dataset.hpp"

namespace noxcast {

struct BoxplotSummary {
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
    double iqr = 0;
    double lower_fence = 0, upper_fence = 0;
    std::size_t n_outliers = 0;
};

struct Histogram {
    std::vector<double> edges;       // b + 1 strictly increasing edges
    std::vector<std::size_t> counts; // length b
};

struct CorrelationMatrix {
    std::vector<std::string> labels;          // canonical column names
    std::vector<std::vector<double>> values;  // labels.size() x labels.size()

    double at(std::string_view a, std::string_view b) const {
        return values[index(a)][index(b)];
    }
    std::size_t index(std::string_view name) const {
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == name) return i;
        throw std::invalid_argument("unknown column: " + std::string(name));
    }
};

// Quantile by linear interpolation of order statistics at position (n-1)*p
// (the common "type 7" rule). `sorted` must be ascending.
inline double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw std::invalid_argument("quantile of empty list");
    const double pos = static_cast<double>(sorted.size() - 1) * p;
    const std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= sorted.size()) return sorted[sorted.size() - 1];
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline BoxplotSummary five_number_summary(std::span<const double> values) {
    if (values.size() < 2) throw std::invalid_argument("five_number_summary: need at least 2 values");
    std::vector<double> sorted(values.begin(), values.end());
    for (double v : sorted)
        if (!std::isfinite(v)) throw std::invalid_argument("five_number_summary: non-finite value");
    std::sort(sorted.begin(), sorted.end());

    BoxplotSummary s;
    s.min = sorted.front();
    s.max = sorted.back();
    s.q1 = quantile_sorted(sorted, 0.25);
    s.median = quantile_sorted(sorted, 0.5);
    s.q3 = quantile_sorted(sorted, 0.75);
    s.iqr = s.q3 - s.q1;
    s.lower_fence = s.q1 - 1.5 * s.iqr;
    s.upper_fence = s.q3 + 1.5 * s.iqr;
    for (double v : sorted)
        if (v < s.lower_fence || v > s.upper_fence) ++s.n_outliers;
    return s;
}

// Equal-width bins over [min, max]; the last bin's right edge is inclusive.
inline Histogram histogram(std::span<const double> values, std::size_t n_bins) {
    if (n_bins < 1) throw std::invalid_argument("histogram: n_bins must be >= 1");
    if (values.empty()) throw std::invalid_argument("histogram: empty value list");
    double lo = values[0], hi = values[0];
    for (double v : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (!(hi > lo)) throw std::invalid_argument("histogram: zero-width range (all values equal)");

    Histogram h;
    h.edges.resize(n_bins + 1);
    const double width = (hi - lo) / static_cast<double>(n_bins);
    for (std::size_t i = 0; i <= n_bins; ++i)
        h.edges[i] = lo + width * static_cast<double>(i);
    h.edges[0] = lo;
    h.edges[n_bins] = hi;
    h.counts.assign(n_bins, 0);
    for (double v : values) {
        auto bin = static_cast<std::size_t>((v - lo) / width);
        if (bin >= n_bins) bin = n_bins - 1;  // right edge of last bin inclusive
        ++h.counts[bin];
    }
    return h;
}

inline double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("pearson: need two equal-length series of >= 2 values");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (!(sxx > 0.0) || !(syy > 0.0)) throw std::runtime_error("pearson: constant series");
    return sxy / std::sqrt(sxx * syy);
}

// 10x10 Pearson product-moment matrix over every record.
inline CorrelationMatrix pearson_matrix(const Dataset& dataset) {
    if (dataset.empty()) throw std::invalid_argument("pearson_matrix: empty dataset");
    const std::size_t k = kCanonicalColumns.size();
    std::vector<std::vector<double>> columns(k);
    for (std::size_t c = 0; c < k; ++c) columns[c] = dataset.column(c);

    CorrelationMatrix m;
    m.labels.reserve(k);
    for (auto name : kCanonicalColumns) m.labels.emplace_back(name);
    m.values.assign(k, std::vector<double>(k, 1.0));
    for (std::size_t a = 0; a < k; ++a) {
        // Fails on a constant column, naming it.
        double lo = columns[a][0], hi = columns[a][0];
        for (double v : columns[a]) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (!(hi > lo))
            throw std::runtime_error("pearson_matrix: constant column '" + m.labels[a] + "'");
    }
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a + 1; b < k; ++b) {
            const double r = pearson(columns[a], columns[b]);
            m.values[a][b] = r;
            m.values[b][a] = r;
        }
    return m;
}

}  // namespace noxcast
