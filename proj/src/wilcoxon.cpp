#include "wavecast/wilcoxon.hpp"

#include "wavecast/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace wavecast {

namespace {

struct Pooled {
    std::vector<double> ranks; // first n entries belong to sample a
    double tie_term = 0.0;     // sum over tie groups of t^3 - t
};

Pooled midranks(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size() + b.size();
    std::vector<double> values(a.begin(), a.end());
    values.insert(values.end(), b.begin(), b.end());
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });

    Pooled out;
    out.ranks.resize(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) out.ranks[order[k]] = rank;
        const double t = static_cast<double>(j - i + 1);
        out.tie_term += t * t * t - t;
        i = j + 1;
    }
    return out;
}

void check_samples(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw shape_error("rank-sum test: both samples must be nonempty");
}

RankSumResult statistic(std::span<const double> a, std::span<const double> b, Pooled& pooled) {
    pooled = midranks(a, b);
    RankSumResult r;
    r.rank_sum = std::accumulate(pooled.ranks.begin(), pooled.ranks.begin() + a.size(), 0.0);
    const double n = static_cast<double>(a.size());
    r.u = r.rank_sum - n * (n + 1.0) / 2.0;
    return r;
}

} // namespace

RankSumResult wilcoxon_rank_sum_normal(std::span<const double> a, std::span<const double> b) {
    check_samples(a, b);
    Pooled pooled;
    RankSumResult r = statistic(a, b, pooled);
    const double n = static_cast<double>(a.size());
    const double m = static_cast<double>(b.size());
    const double total = n + m;
    const double mean = n * (total + 1.0) / 2.0;
    const double correction = total > 1.0 ? pooled.tie_term / (total * (total - 1.0)) : 0.0;
    const double var = n * m / 12.0 * ((total + 1.0) - correction);
    const double dev = std::abs(r.rank_sum - mean);
    if (var <= 0.0 || dev <= 0.5) {
        r.z = 0.0;
        r.p_two_sided = 1.0;
        return r;
    }
    const double z = (dev - 0.5) / std::sqrt(var);
    r.z = r.rank_sum >= mean ? z : -z;
    r.p_two_sided = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
    return r;
}

RankSumResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b) {
    check_samples(a, b);
    const std::size_t total = a.size() + b.size();
    if (total > static_cast<std::size_t>(kExactRankSumLimit)) return wilcoxon_rank_sum_normal(a, b);

    Pooled pooled;
    RankSumResult r = statistic(a, b, pooled);
    const double n = static_cast<double>(a.size());
    const double mean = n * (static_cast<double>(total) + 1.0) / 2.0;
    const double observed = std::abs(r.rank_sum - mean);
    const double slack = 1e-9 * (1.0 + observed);

    // Every n-subset of the pooled positions is equally likely under H0.
    std::uint64_t extreme = 0;
    std::uint64_t count = 0;
    const std::uint32_t limit = std::uint32_t{1} << total;
    for (std::uint32_t mask = 0; mask < limit; ++mask) {
        if (static_cast<std::size_t>(std::popcount(mask)) != a.size()) continue;
        double s = 0.0;
        for (std::uint32_t bits = mask; bits != 0; bits &= bits - 1) {
            s += pooled.ranks[static_cast<std::size_t>(std::countr_zero(bits))];
        }
        ++count;
        if (std::abs(s - mean) >= observed - slack) ++extreme;
    }
    r.exact = true;
    r.z = 0.0;
    r.p_two_sided = static_cast<double>(extreme) / static_cast<double>(count);
    return r;
}

} // namespace wavecast
