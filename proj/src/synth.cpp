#include "wavecast/synth.hpp"

#include "wavecast/calendar.hpp"
#include "wavecast/error.hpp"
#include "wavecast/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace wavecast {

double clear_sky_shape(int t, int steps) {
    if (t <= 0 || t >= steps - 1) return 0.0;
    const double half = (steps - 1) / 2.0;
    return std::pow(t * static_cast<double>(steps - 1 - t) / (half * half), 1.5);
}

double seasonal_factor(DayNumber day, double amplitude) {
    const double phase = 2.0 * std::numbers::pi * (day_of_year(day) + 10) / 365.25;
    return (1.0 + amplitude * std::cos(phase)) / (1.0 + amplitude);
}

std::vector<DailyMatrix> synthesize_pv(const SynthParams& p) {
    if (p.days < 16) throw config_error("synth: days must be >= 16, got " + std::to_string(p.days));
    if (p.sites < 1) throw config_error("synth: sites must be >= 1");
    if (p.steps < 3) throw config_error("synth: steps must be >= 3");
    if (!(p.capacity > 0.0)) throw config_error("synth: capacity must be > 0");
    if (p.cloud_noise < 0.0 || p.cloud_noise > 1.0) throw config_error("synth: cloud_noise must be in [0, 1]");
    if (p.seasonal_amplitude < 0.0 || p.seasonal_amplitude >= 1.0) {
        throw config_error("synth: seasonal_amplitude must be in [0, 1)");
    }

    std::vector<DailyMatrix> out(p.sites);
    for (auto& m : out) {
        m.values.resize(p.days, p.steps);
        m.dates.resize(p.days);
    }
    std::mt19937_64 regional(derive_seed(p.seed, "synth.region"));
    std::vector<std::mt19937_64> local;
    for (int s = 0; s < p.sites; ++s) local.emplace_back(derive_seed(p.seed, "synth.site", s));
    std::normal_distribution<double> normal(0.0, 1.0);

    for (int d = 0; d < p.days; ++d) {
        const DayNumber day = p.start_date + d;
        const double season = seasonal_factor(day, p.seasonal_amplitude);
        const double z = normal(regional);
        for (int s = 0; s < p.sites; ++s) {
            auto& rng = local[s];
            const double e = normal(rng);
            const double cover = std::clamp(0.5 + 0.35 * (0.8 * z + 0.6 * e), 0.0, 1.0);
            const double day_factor = 1.0 - p.cloud_noise * cover;
            double ar = 0.0;
            DailyMatrix& m = out[s];
            m.dates[d] = day;
            for (int t = 0; t < p.steps; ++t) {
                ar = 0.7 * ar + 0.3 * normal(rng);
                const double cloud = std::clamp(day_factor * (1.0 + 0.5 * p.cloud_noise * ar), 0.0, 1.0);
                m.values(d, t) = p.capacity * clear_sky_shape(t, p.steps) * season * cloud;
            }
        }
    }
    return out;
}

} // namespace wavecast
