#pragma once

#include "wavecast/types.hpp"

#include <cstdint>
#include <vector>

namespace wavecast {

struct SynthParams {
    int days = 400;
    int sites = 1;
    double capacity = 100.0;         ///< MW per site at clear-sky noon on the peak day
    double cloud_noise = 0.3;        ///< 0 = clear sky every day
    double seasonal_amplitude = 0.3; ///< relative swing of the annual cycle
    DayNumber start_date = 17897;    ///< 2019-01-01
    int steps = kStepsPerDay;
    std::uint64_t seed = 0;
};

/// Clear-sky shape over one day: (t(T-1-t) / ((T-1)/2)^2)^1.5, zero at both ends.
double clear_sky_shape(int t, int steps = kStepsPerDay);

/// Annual factor in (0, 1], peaking at the turn of the year (southern summer).
double seasonal_factor(DayNumber day, double amplitude);

/// Per-site PV series: capacity * clear_sky_shape * seasonal_factor * cloud,
/// cloud in [0, 1]. A regional cloud draw per day is shared by all sites,
/// each site adds its own daily and within-day terms. Deterministic per seed.
/// Throws ErrorKind::config for days < 16, sites < 1 or negative parameters.
std::vector<DailyMatrix> synthesize_pv(const SynthParams& params);

} // namespace wavecast
