#pragma once

// Daubechies filter banks and the periodic (circular) wavelet transforms built
// on them: single-level DWT/IDWT, the undecimated stationary transform
// (SWT/ISWT) and per-band component reconstruction.
//
// Alignment convention, shared by every transform in this header: output
// coefficient k of a stage with filter stride s is computed from the signal
// window that starts at index k,
//
//     out[k] = sum_j filter[j] * x[(k + j*s) mod N]            (SWT)
//     out[k] = sum_j filter[j] * x[(2k + j) mod N]             (DWT)
//
// and synthesis is the adjoint of that map. With orthonormal filters the
// undecimated analysis operator W satisfies W^T W = 2I, so the ISWT is
// (1/2) W^T applied level by level, which equals the average of the inverses
// of all epsilon-decimated DWTs.

#include "wavecast/error.hpp"
#include "wavecast/types.hpp"

#include <string>
#include <vector>

namespace wavecast {

inline constexpr int kMinDaubechiesOrder = 1;
inline constexpr int kMaxDaubechiesOrder = 7;

/// Analysis and synthesis filters for one Daubechies order (dbM).
template <typename Scalar>
struct FilterBank {
    int order = 0;
    Vector<Scalar> lp;   ///< decomposition low-pass, length 2*order
    Vector<Scalar> hp;   ///< decomposition high-pass, hp[k] = (-1)^k lp[F-1-k]
    Vector<Scalar> lp_r; ///< reconstruction low-pass, lp reversed
    Vector<Scalar> hp_r; ///< reconstruction high-pass, hp reversed

    Eigen::Index length() const { return lp.size(); }

    template <typename Other>
    FilterBank<Other> cast() const {
        return {order, lp.template cast<Other>(), hp.template cast<Other>(),
                lp_r.template cast<Other>(), hp_r.template cast<Other>()};
    }
};

/// Generates dbM by spectral factorisation of the Daubechies polynomial
/// (extremal-phase root selection), normalised so that sum(lp) = sqrt(2).
/// Throws ErrorKind::config for an order outside [1, 7].
FilterBank<double> daubechies_filters(int order);

template <typename Scalar>
FilterBank<Scalar> daubechies(int order) {
    return daubechies_filters(order).template cast<Scalar>();
}

/// Name such as "db4".
std::string wavelet_name(int order);

enum class BoundaryMode {
    periodic,
};

template <typename Scalar>
struct DwtCoefficients {
    Vector<Scalar> approx;
    Vector<Scalar> detail;
};

/// Stationary-transform coefficients; every band has the signal's length.
template <typename Scalar>
struct SwtCoefficients {
    int level = 0;
    Vector<Scalar> approx;               ///< cA at the deepest level
    std::vector<Vector<Scalar>> details; ///< cD_1 .. cD_level
    Eigen::Index signal_len = 0;

    int band_count() const { return level + 1; }
};

/// Time-domain components: approx + sum(details) reproduces the signal.
template <typename Scalar>
struct ComponentSet {
    int level = 0;
    Vector<Scalar> approx;               ///< A_level
    std::vector<Vector<Scalar>> details; ///< D_1 .. D_level
};

namespace detail {

inline Eigen::Index wrap(Eigen::Index i, Eigen::Index n) {
    const Eigen::Index r = i % n;
    return r < 0 ? r + n : r;
}

// out[k] = sum_j filter[j] * x[(k*step + j*stride) mod N], k in [0, out_len)
template <typename Scalar>
Vector<Scalar> analysis_pass(const Vector<Scalar>& x, const Vector<Scalar>& filter,
                             Eigen::Index step, Eigen::Index stride, Eigen::Index out_len) {
    const Eigen::Index n = x.size();
    Vector<Scalar> out(out_len);
    for (Eigen::Index k = 0; k < out_len; ++k) {
        Scalar acc(0);
        Eigen::Index idx = wrap(k * step, n);
        const Eigen::Index inc = stride % n;
        for (Eigen::Index j = 0; j < filter.size(); ++j) {
            acc += filter[j] * x[idx];
            idx += inc;
            if (idx >= n) idx -= n;
        }
        out[k] = acc;
    }
    return out;
}

// Adjoint of analysis_pass: y[(k*step + j*stride) mod N] += rfilter[F-1-j] * c[k].
template <typename Scalar>
void synthesis_accumulate(Vector<Scalar>& y, const Vector<Scalar>& coeffs,
                          const Vector<Scalar>& rfilter, Eigen::Index step,
                          Eigen::Index stride) {
    const Eigen::Index n = y.size();
    const Eigen::Index f = rfilter.size();
    const Eigen::Index inc = stride % n;
    for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
        const Scalar c = coeffs[k];
        Eigen::Index idx = wrap(k * step, n);
        for (Eigen::Index j = 0; j < f; ++j) {
            y[idx] += rfilter[f - 1 - j] * c;
            idx += inc;
            if (idx >= n) idx -= n;
        }
    }
}

} // namespace detail

/// One analysis stage with dyadic decimation. Requires an even signal length
/// of at least the filter length.
template <typename Scalar>
DwtCoefficients<Scalar> dwt_single_level(const Vector<Scalar>& signal, const FilterBank<Scalar>& f,
                                         BoundaryMode boundary = BoundaryMode::periodic) {
    (void)boundary;
    const Eigen::Index n = signal.size();
    if (n % 2 != 0 || n < f.length()) {
        throw shape_error("dwt: signal length " + std::to_string(n) +
                          " must be even and at least the filter length " +
                          std::to_string(f.length()));
    }
    return {detail::analysis_pass<Scalar>(signal, f.lp, 2, 1, n / 2),
            detail::analysis_pass<Scalar>(signal, f.hp, 2, 1, n / 2)};
}

template <typename Scalar>
Vector<Scalar> idwt_single_level(const Vector<Scalar>& approx, const Vector<Scalar>& detail_coeffs,
                                 const FilterBank<Scalar>& f) {
    if (approx.size() != detail_coeffs.size()) {
        throw shape_error("idwt: approximation and detail lengths differ (" +
                          std::to_string(approx.size()) + " vs " +
                          std::to_string(detail_coeffs.size()) + ")");
    }
    Vector<Scalar> y = Vector<Scalar>::Zero(2 * approx.size());
    if (approx.size() == 0) return y;
    detail::synthesis_accumulate<Scalar>(y, approx, f.lp_r, 2, 1);
    detail::synthesis_accumulate<Scalar>(y, detail_coeffs, f.hp_r, 2, 1);
    return y;
}

/// Largest level the SWT accepts for a signal of length n (0 when n is odd).
inline int max_swt_level(Eigen::Index n) {
    int level = 0;
    while (n > 0 && n % 2 == 0) {
        n /= 2;
        ++level;
    }
    return level;
}

/// Undecimated transform to `level` stages; level-l filters are the base
/// filters upsampled by 2^(l-1). The signal length must be a multiple of
/// 2^level.
template <typename Scalar>
SwtCoefficients<Scalar> swt(const Vector<Scalar>& signal, const FilterBank<Scalar>& f, int level) {
    const Eigen::Index n = signal.size();
    if (level < 1) {
        throw config_error("swt: level must be >= 1, got " + std::to_string(level));
    }
    const Eigen::Index multiple = Eigen::Index(1) << level;
    if (n == 0 || n % multiple != 0) {
        throw shape_error("swt: signal length " + std::to_string(n) +
                          " must be a multiple of " + std::to_string(multiple) +
                          " for level " + std::to_string(level));
    }
    SwtCoefficients<Scalar> out;
    out.level = level;
    out.signal_len = n;
    out.details.reserve(level);
    Vector<Scalar> approx = signal;
    for (int l = 1; l <= level; ++l) {
        const Eigen::Index stride = Eigen::Index(1) << (l - 1);
        out.details.push_back(detail::analysis_pass<Scalar>(approx, f.hp, 1, stride, n));
        approx = detail::analysis_pass<Scalar>(approx, f.lp, 1, stride, n);
    }
    out.approx = std::move(approx);
    return out;
}

template <typename Scalar>
void check_coefficients(const SwtCoefficients<Scalar>& c) {
    if (c.level < 1 || static_cast<int>(c.details.size()) != c.level) {
        throw shape_error("swt coefficients: expected " + std::to_string(c.level) +
                          " detail bands, found " + std::to_string(c.details.size()));
    }
    if (c.approx.size() != c.signal_len) {
        throw shape_error("swt coefficients: approximation band has length " +
                          std::to_string(c.approx.size()) + ", expected " +
                          std::to_string(c.signal_len));
    }
    for (const auto& d : c.details) {
        if (d.size() != c.signal_len) {
            throw shape_error("swt coefficients: detail band has length " +
                              std::to_string(d.size()) + ", expected " +
                              std::to_string(c.signal_len));
        }
    }
}

template <typename Scalar>
Vector<Scalar> iswt(const SwtCoefficients<Scalar>& coeffs, const FilterBank<Scalar>& f) {
    check_coefficients(coeffs);
    const Eigen::Index n = coeffs.signal_len;
    Vector<Scalar> approx = coeffs.approx;
    for (int l = coeffs.level; l >= 1; --l) {
        const Eigen::Index stride = Eigen::Index(1) << (l - 1);
        Vector<Scalar> prev = Vector<Scalar>::Zero(n);
        detail::synthesis_accumulate<Scalar>(prev, approx, f.lp_r, 1, stride);
        detail::synthesis_accumulate<Scalar>(prev, coeffs.details[l - 1], f.hp_r, 1, stride);
        approx = prev * Scalar(0.5);
    }
    return approx;
}

/// Each component is the ISWT of a single band with all other bands zeroed.
template <typename Scalar>
ComponentSet<Scalar> reconstruct_components(const SwtCoefficients<Scalar>& coeffs,
                                            const FilterBank<Scalar>& f) {
    check_coefficients(coeffs);
    SwtCoefficients<Scalar> one = coeffs;
    const auto zero = Vector<Scalar>::Zero(coeffs.signal_len);
    for (auto& d : one.details) d = zero;

    ComponentSet<Scalar> out;
    out.level = coeffs.level;
    out.approx = iswt(one, f);

    one.approx = zero;
    out.details.reserve(coeffs.level);
    for (int l = 0; l < coeffs.level; ++l) {
        one.details[l] = coeffs.details[l];
        out.details.push_back(iswt(one, f));
        one.details[l] = zero;
    }
    return out;
}

template <typename Scalar>
Vector<Scalar> sum_components(const ComponentSet<Scalar>& c) {
    Vector<Scalar> s = c.approx;
    for (const auto& d : c.details) s += d;
    return s;
}

} // namespace wavecast
