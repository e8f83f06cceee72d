#pragma once

// Reference implementations for the tests. They follow the textbook
// definitions directly (explicit loops, explicit upsampled filters, full
// enumeration) and share no code with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;

/// Daubechies scaling coefficients (reconstruction low-pass, sum = sqrt 2)
/// as tabulated in the literature.
inline Vec daubechies_table(int order) {
    switch (order) {
    case 1: return {0.7071067811865476, 0.7071067811865476};
    case 2: {
        const double s3 = std::sqrt(3.0), d = 4.0 * std::sqrt(2.0);
        return {(1 + s3) / d, (3 + s3) / d, (3 - s3) / d, (1 - s3) / d};
    }
    case 4:
        return {0.23037781330885523, 0.7148465705525415,  0.6308807679295904,   -0.02798376941698385,
                -0.18703481171888114, 0.030841381835986965, 0.032883011666982945, -0.010597401784997278};
    default: return {};
    }
}

/// One undecimated level: x correlated with the filter upsampled by 2^(level-1),
/// written out with explicit zeros, indices taken mod N.
inline Vec undecimated_level(const Vec& x, const Vec& filter, int level) {
    const std::size_t up = std::size_t(1) << (level - 1);
    Vec h((filter.size() - 1) * up + 1, 0.0);
    for (std::size_t j = 0; j < filter.size(); ++j) h[j * up] = filter[j];
    const std::size_t n = x.size();
    Vec out(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        double acc = 0.0;
        for (std::size_t j = 0; j < h.size(); ++j) acc += h[j] * x[(k + j) % n];
        out[k] = acc;
    }
    return out;
}

struct Metrics {
    double mae, rmse, mre, rae, rrse, r2;
};

/// Element-by-element double loops over days d and steps t.
inline Metrics metrics(const Mat& pred, const Mat& actual, double capacity, const Vec& step_mean) {
    double abs_e = 0, sq_e = 0, abs_b = 0, sq_b = 0, sq_x = 0;
    std::size_t n = 0;
    for (std::size_t d = 0; d < actual.size(); ++d) {
        for (std::size_t t = 0; t < actual[d].size(); ++t) {
            const double e = pred[d][t] - actual[d][t];
            abs_e += std::fabs(e);
            sq_e += e * e;
            abs_b += std::fabs(step_mean[t] - actual[d][t]);
            sq_b += (step_mean[t] - actual[d][t]) * (step_mean[t] - actual[d][t]);
            sq_x += (step_mean[t] - pred[d][t]) * (step_mean[t] - pred[d][t]);
            ++n;
        }
    }
    Metrics m;
    m.mae = abs_e / n;
    m.rmse = std::sqrt(sq_e / n);
    m.mre = 100.0 * abs_e / (n * capacity);
    m.rae = abs_e / abs_b;
    m.rrse = std::sqrt(sq_e / sq_b);
    m.r2 = sq_x / sq_b;
    return m;
}

/// Midrank of every pooled value, by counting.
inline Vec midranks(const Vec& pooled) {
    Vec r(pooled.size());
    for (std::size_t i = 0; i < pooled.size(); ++i) {
        double less = 0, equal = 0;
        for (double v : pooled) {
            if (v < pooled[i]) less += 1;
            if (v == pooled[i]) equal += 1;
        }
        r[i] = less + (equal + 1) / 2.0;
    }
    return r;
}

/// Two-sided exact rank-sum p: share of all C(n+m, n) relabellings whose
/// rank sum is at least as far from its mean as the observed one.
inline double rank_sum_exact_p(const Vec& a, const Vec& b) {
    Vec pooled = a;
    pooled.insert(pooled.end(), b.begin(), b.end());
    const Vec r = midranks(pooled);
    const std::size_t n = a.size(), total = pooled.size();
    double observed = 0;
    for (std::size_t i = 0; i < n; ++i) observed += r[i];
    const double mean = n * (total + 1) / 2.0;
    const double dev = std::fabs(observed - mean);

    std::vector<int> pick(total, 0);
    std::fill(pick.begin(), pick.begin() + n, 1);
    std::sort(pick.begin(), pick.end());
    double hits = 0, count = 0;
    do {
        double s = 0;
        for (std::size_t i = 0; i < total; ++i) {
            if (pick[i]) s += r[i];
        }
        if (std::fabs(s - mean) >= dev - 1e-9) hits += 1;
        count += 1;
    } while (std::next_permutation(pick.begin(), pick.end()));
    return hits / count;
}

/// Log returns at lag h and their sample standard deviation per window.
inline Vec window_sigmas(const Vec& p, int h, int window) {
    Vec ret;
    for (std::size_t i = h; i < p.size(); ++i) ret.push_back(std::log(p[i]) - std::log(p[i - h]));
    Vec out;
    for (std::size_t s = 0; s < ret.size(); s += window) {
        const std::size_t e = std::min(ret.size(), s + window);
        if (e - s < 2) continue;
        double mean = 0;
        for (std::size_t i = s; i < e; ++i) mean += ret[i];
        mean /= (e - s);
        double ss = 0;
        for (std::size_t i = s; i < e; ++i) ss += (ret[i] - mean) * (ret[i] - mean);
        out.push_back(std::sqrt(ss / (e - s - 1)));
    }
    return out;
}

inline double mean(const Vec& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

} // namespace oracle
