#pragma once

#include "wavecast/types.hpp"

#include <span>
#include <string>
#include <vector>

namespace wavecast {

/// ret[i] = ln(P[i+h] / P[i]); output length is len - h (empty when h >= len).
/// Throws ErrorKind::domain naming the first non-positive index.
std::vector<double> log_returns(std::span<const double> series, int h);

struct VolatilityEstimate {
    std::vector<double> window_sigma; ///< sample std (N-1) per window
    double overall = 0.0;             ///< unweighted mean of window_sigma
    int skipped_windows = 0;          ///< windows with fewer than 2 returns
};

/// Log returns at lag h grouped into consecutive non-overlapping windows of
/// `window` returns; the trailing partial window is kept when it has >= 2.
VolatilityEstimate historical_volatility(std::span<const double> series, int h, int window);

/// Replaces values below `floor` with `floor`; returns the replacement count.
int apply_floor(std::span<double> series, double floor);

struct VolatilityOptions {
    double floor = 0.1;  ///< MW
    int first_days = 365; ///< only the first year enters the table
};

/// One column per site plus the aggregate.
struct VolatilityTable {
    std::vector<std::string> columns;
    std::vector<double> intra_day; ///< sigma_{1,27}: lag 1, one window per day
    std::vector<double> trans_day; ///< sigma_{27,27}: lag 27, windows of 27 returns
    std::vector<int> floored;      ///< samples floored per column
    std::vector<int> skipped;      ///< windows skipped per column
};

VolatilityTable volatility_table(const std::vector<DailyMatrix>& sites,
                                 const std::vector<std::string>& site_names,
                                 const DailyMatrix& aggregate, const std::string& aggregate_name,
                                 const VolatilityOptions& options = {});

} // namespace wavecast
