// Writes a seeded synthetic five-year dataset in the public files' CSV
// layout (one gt_<year>.csv per year, GTEP/TAT source headers, an unused CO
// column). Lets the pipeline be exercised end to end when the real data is
// not on disk.

#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "noxcast/io.hpp"
#include "noxcast/synthetic.hpp"

int main(int argc, char** argv) {
    CLI::App app{"noxcast-synth — synthetic turbine dataset generator"};
    std::string out_dir = "data-synth";
    std::size_t per_year = 7000;
    std::uint64_t seed = 7;
    double noise = 3.0;
    app.add_option("--out-dir", out_dir, "Directory for gt_<year>.csv files")
        ->capture_default_str();
    app.add_option("--per-year", per_year, "Records per year")->capture_default_str();
    app.add_option("--seed", seed, "Generator seed")->capture_default_str();
    app.add_option("--noise", noise, "Response noise std, raw units")->capture_default_str();
    CLI11_PARSE(app, argc, argv);

    noxcast::SyntheticOptions opt;
    opt.records_per_year = per_year;
    opt.seed = seed;
    opt.noise = noise;
    const noxcast::Dataset dataset = noxcast::synthetic_dataset(opt);

    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    for (const auto& [year, ordinals] : dataset.year_index()) {
        std::ostringstream csv;
        csv << "AT,AP,AH,AFDP,GTEP,TIT,TAT,TEY,CDP,CO,NOX\n";
        for (std::size_t i : ordinals) {
            const auto& rec = dataset.records()[i];
            const double* x = rec.predictors.data();
            csv << noxcast::format_double(x[noxcast::predictor_index("AT")]) << ","
                << noxcast::format_double(x[noxcast::predictor_index("AP")]) << ","
                << noxcast::format_double(x[noxcast::predictor_index("AH")]) << ","
                << noxcast::format_double(x[noxcast::predictor_index("AFDP")]) << ","
                << noxcast::format_double(x[noxcast::predictor_index("TEP")]) << ","
                << noxcast::format_double(x[noxcast::predictor_index("TIT")]) << ","
                << noxcast::format_double(x[noxcast::predictor_index("TET")]) << ","
                << noxcast::format_double(x[noxcast::predictor_index("TEY")]) << ","
                << noxcast::format_double(x[noxcast::predictor_index("CDP")]) << ","
                << "0,"  // CO placeholder, ignored by the loader
                << noxcast::format_double(rec.nox) << "\n";
        }
        const fs::path path = fs::path(out_dir) / ("gt_" + std::to_string(year) + ".csv");
        noxcast::atomic_write(path, csv.str());
        std::cout << path.string() << ": " << ordinals.size() << " rows\n";
    }
    return 0;
}
