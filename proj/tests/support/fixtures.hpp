#pragma once

// Shared test fixtures: scratch directories, tiny CSV writers, and
// hand-built networks with known behavior.

#include <array>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "noxcast/dataset.hpp"
#include "noxcast/network.hpp"

namespace testutil {

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        auto base = std::filesystem::temp_directory_path() / ("noxcast_" + tag + "_XXXXXX");
        std::string templ = base.string();
        if (!mkdtemp(templ.data())) throw std::runtime_error("mkdtemp failed");
        path_ = templ;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path file(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
}

// Public-file column layout: GTEP/TAT source names plus an unused CO column.
inline std::string public_header() { return "AT,AP,AH,AFDP,GTEP,TIT,TAT,TEY,CDP,CO,NOX\n"; }

// One data row in the public layout. `base` offsets every field so rows are
// distinguishable; NOX = 50 + base.
inline std::string public_row(double base) {
    std::string row;
    const std::array<double, 10> values = {10 + base, 1010 + base, 70 + base, 4 + base,
                                           25 + base, 1080 + base, 545 + base, 130 + base,
                                           12 + base, 1.0};
    for (double v : values) row += noxcast::format_double(v) + ",";
    row += noxcast::format_double(50 + base) + "\n";
    return row;
}

// A network of the production shape with every weight/bias zero and an
// identity standardizer; forward(x) == bias_value for all x once the output
// bias is set.
inline noxcast::Network zero_network(double output_bias = 0.0) {
    noxcast::Network net = noxcast::init_network(
        noxcast::kNumPredictors,
        {noxcast::LayerSpec::mixed_five(), noxcast::LayerSpec::mixed_five()}, 1);
    for (auto& layer : net.hidden)
        for (auto& row : layer.weights)
            for (double& w : row) w = 0.0;
    for (double& w : net.output_weights) w = 0.0;
    net.output_bias = output_bias;
    net.standardizer = noxcast::identity_standardizer(noxcast::kNumPredictors);
    return net;
}

// A network computing prediction = slope * z_var + intercept through the
// linear nodes of both hidden layers (z = standardized input).
inline noxcast::Network linear_network(std::size_t variable, double slope, double intercept,
                                       noxcast::Standardizer standardizer) {
    noxcast::Network net = zero_network(0.0);
    net.hidden[0].weights[3][variable] = 1.0;  // node 3 is the Linear node
    net.hidden[1].weights[3][3] = 1.0;
    net.output_weights[3] = slope;
    net.output_bias = intercept;
    net.standardizer = std::move(standardizer);
    return net;
}

}  // namespace testutil
