#pragma once

#include <span>

namespace wavecast {

struct RankSumResult {
    double rank_sum = 0.0; ///< sum of midranks of the first sample
    double u = 0.0;        ///< Mann-Whitney U of the first sample
    double z = 0.0;        ///< normal score (0 when the exact path is used)
    double p_two_sided = 1.0;
    bool exact = false;
};

/// Largest combined sample size evaluated by full enumeration.
inline constexpr int kExactRankSumLimit = 14;

/// Two-sample Wilcoxon rank-sum (Mann-Whitney) test with midranks for ties.
/// Exact p by enumerating every assignment of the pooled midranks when
/// n + m <= kExactRankSumLimit; otherwise the normal approximation with tie
/// and continuity corrections.
RankSumResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b);

/// Normal-approximation p-value for the same statistic, regardless of size.
RankSumResult wilcoxon_rank_sum_normal(std::span<const double> a, std::span<const double> b);

} // namespace wavecast
