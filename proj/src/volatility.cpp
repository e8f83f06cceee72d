#include "wavecast/volatility.hpp"

#include "wavecast/error.hpp"

#include <cmath>

namespace wavecast {

std::vector<double> log_returns(std::span<const double> series, int h) {
    if (h < 1) throw config_error("log returns: lag must be >= 1");
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (!(series[i] > 0.0)) {
            throw domain_error("log returns: non-positive value " + std::to_string(series[i]) +
                               " at index " + std::to_string(i));
        }
    }
    std::vector<double> out;
    const std::size_t lag = static_cast<std::size_t>(h);
    if (series.size() <= lag) return out;
    out.reserve(series.size() - lag);
    for (std::size_t i = lag; i < series.size(); ++i) {
        out.push_back(std::log(series[i] / series[i - lag]));
    }
    return out;
}

VolatilityEstimate historical_volatility(std::span<const double> series, int h, int window) {
    if (window < 1) throw config_error("volatility: window must be >= 1");
    const std::vector<double> ret = log_returns(series, h);
    VolatilityEstimate est;
    const std::size_t w = static_cast<std::size_t>(window);
    for (std::size_t start = 0; start < ret.size(); start += w) {
        const std::size_t end = std::min(ret.size(), start + w);
        const std::size_t n = end - start;
        if (n < 2) {
            ++est.skipped_windows;
            continue;
        }
        // Running mean, exact when all returns in the window are equal.
        double mean = 0.0;
        for (std::size_t i = start; i < end; ++i) {
            mean += (ret[i] - mean) / static_cast<double>(i - start + 1);
        }
        double ss = 0.0;
        for (std::size_t i = start; i < end; ++i) ss += (ret[i] - mean) * (ret[i] - mean);
        est.window_sigma.push_back(std::sqrt(ss / static_cast<double>(n - 1)));
    }
    if (!est.window_sigma.empty()) {
        double sum = 0.0;
        for (const double s : est.window_sigma) sum += s;
        est.overall = sum / static_cast<double>(est.window_sigma.size());
    }
    return est;
}

int apply_floor(std::span<double> series, double floor) {
    int count = 0;
    for (double& v : series) {
        if (v < floor) {
            v = floor;
            ++count;
        }
    }
    return count;
}

namespace {

void add_column(VolatilityTable& table, const std::string& name, const DailyMatrix& m,
                const VolatilityOptions& opt) {
    const Eigen::Index days = std::min<Eigen::Index>(m.days(), opt.first_days);
    if (days == 0) throw data_error("volatility: series '" + name + "' has no days");
    RowMatrixXd values = m.values.topRows(days);
    const int floored = apply_floor({values.data(), static_cast<std::size_t>(values.size())}, opt.floor);

    const int steps = static_cast<int>(values.cols());
    double intra_sum = 0.0;
    int intra_n = 0;
    int skipped = 0;
    for (Eigen::Index d = 0; d < days; ++d) {
        const auto est = historical_volatility(
            {values.data() + d * steps, static_cast<std::size_t>(steps)}, 1, steps);
        skipped += est.skipped_windows;
        for (const double s : est.window_sigma) {
            intra_sum += s;
            ++intra_n;
        }
    }
    const auto trans = historical_volatility(
        {values.data(), static_cast<std::size_t>(values.size())}, steps, steps);
    skipped += trans.skipped_windows;

    table.columns.push_back(name);
    table.intra_day.push_back(intra_n ? intra_sum / intra_n : 0.0);
    table.trans_day.push_back(trans.overall);
    table.floored.push_back(floored);
    table.skipped.push_back(skipped);
}

} // namespace

VolatilityTable volatility_table(const std::vector<DailyMatrix>& sites,
                                 const std::vector<std::string>& site_names,
                                 const DailyMatrix& aggregate, const std::string& aggregate_name,
                                 const VolatilityOptions& options) {
    if (site_names.size() != sites.size()) {
        throw shape_error("volatility: one name per site required");
    }
    for (const auto& s : sites) {
        if (s.dates != aggregate.dates) {
            throw data_error("volatility: site calendars differ from the aggregate");
        }
    }
    VolatilityTable table;
    for (std::size_t i = 0; i < sites.size(); ++i) add_column(table, site_names[i], sites[i], options);
    add_column(table, aggregate_name, aggregate, options);
    return table;
}

} // namespace wavecast
