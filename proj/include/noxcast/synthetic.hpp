#pragma once

// Seeded synthetic five-year dataset with the same schema as the public
// turbine files. Fixture data for tests, demos, and smoke runs when the real
// dataset is not on disk: a latent load factor drives the turbine-side
// predictors, ambient variables move on their own, the response depends
// mostly on the turbine state, and both the response relation and the air
// filter drift with equipment age so year-based splits behave differently
// from stratified ones.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "noxcast/dataset.hpp"
#include "noxcast/random.hpp"

namespace noxcast {

struct SyntheticOptions {
    std::vector<int> years = {2011, 2012, 2013, 2014, 2015};
    std::size_t records_per_year = 600;
    std::uint64_t seed = 7;
    double noise = 3.0;  // response noise std, raw units
};

// Box-Muller from the deterministic stream.
inline double gauss(Rng& rng) {
    double u1 = rng.next_double();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double u2 = rng.next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline Dataset synthetic_dataset(const SyntheticOptions& opt = {}) {
    std::vector<ProcessRecord> records;
    records.reserve(opt.years.size() * opt.records_per_year);
    for (int year : opt.years) {
        Rng rng(derive_seed(opt.seed, static_cast<std::uint64_t>(year)));
        const double age = static_cast<double>(year - opt.years.front());
        for (std::size_t k = 0; k < opt.records_per_year; ++k) {
            const double season =
                std::sin(2.0 * std::numbers::pi * static_cast<double>(k) /
                         static_cast<double>(opt.records_per_year));
            const double load = 0.15 + 0.7 * rng.next_double();  // dispatch level in [0.15, 0.85]

            ProcessRecord rec;
            rec.year = year;
            double* x = rec.predictors.data();
            const double at = 17.0 + 8.0 * season + 5.0 * gauss(rng);
            x[predictor_index("AT")] = at;
            x[predictor_index("AP")] = 1013.0 - 0.4 * (at - 17.0) + 5.0 * gauss(rng);
            x[predictor_index("AH")] = 77.0 - 1.6 * (at - 17.0) + 9.0 * gauss(rng);
            x[predictor_index("AFDP")] = 3.2 + 1.1 * load + 0.18 * age + 0.25 * gauss(rng);
            x[predictor_index("TEP")] = 19.0 + 12.0 * load + 0.5 * gauss(rng);
            x[predictor_index("TIT")] = 1020.0 + 80.0 * load + 3.0 * gauss(rng);
            x[predictor_index("TET")] = 565.0 - 40.0 * load + 0.5 * (at - 17.0) + 3.0 * gauss(rng);
            x[predictor_index("TEY")] = 110.0 + 60.0 * load + 2.0 * gauss(rng);
            x[predictor_index("CDP")] = 10.5 + 3.2 * load + 0.12 * gauss(rng);

            const double z_tit = (x[predictor_index("TIT")] - 1060.0) / 25.0;
            const double z_tey = (x[predictor_index("TEY")] - 140.0) / 18.0;
            const double z_tet = (x[predictor_index("TET")] - 545.0) / 12.0;
            const double z_at = (at - 17.0) / 7.0;
            const double z_cdp = (x[predictor_index("CDP")] - 12.1) / 1.0;
            const double z_tep = (x[predictor_index("TEP")] - 25.0) / 3.6;

            // Degradation: the TIT sensitivity decays with age and the level
            // creeps upward, so models trained on early years mispredict
            // late years.
            double y = 62.0;
            y += (-7.5 + 1.1 * age) * z_tit;
            y += 2.0 * z_tit * z_tit;
            y += 2.6 * z_tey;
            y += 1.8 * z_tet;
            y += -3.2 * z_at;
            y += -1.2 * z_cdp;
            y += 0.9 * z_tep;
            y += 1.6 * age;
            y += opt.noise * gauss(rng);
            rec.nox = y;
            records.push_back(rec);
        }
    }
    return Dataset(std::move(records), default_schema());
}

}  // namespace noxcast
