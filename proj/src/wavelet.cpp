#include "wavecast/wavelet.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>

namespace wavecast {

namespace {

using Complex = std::complex<double>;

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// Horner evaluation of p and p' at z; coefficients in ascending powers.
std::pair<Complex, Complex> eval_with_derivative(const std::vector<double>& coeffs, Complex z) {
    Complex p = 0.0;
    Complex dp = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
        dp = dp * z + p;
        p = p * z + *it;
    }
    return {p, dp};
}

// Roots of the polynomial with ascending coefficients, via the companion
// matrix, then polished with a few Newton steps.
std::vector<Complex> polynomial_roots(const std::vector<double>& coeffs) {
    const int degree = static_cast<int>(coeffs.size()) - 1;
    std::vector<Complex> roots;
    if (degree < 1) return roots;

    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
    for (int i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < degree; ++i) companion(i, degree - 1) = -coeffs[i] / coeffs[degree];

    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    const auto& ev = solver.eigenvalues();
    roots.reserve(degree);
    for (int i = 0; i < degree; ++i) {
        Complex z = ev[i];
        for (int iter = 0; iter < 8; ++iter) {
            const auto [p, dp] = eval_with_derivative(coeffs, z);
            if (std::abs(dp) == 0.0) break;
            const Complex step = p / dp;
            z -= step;
            if (std::abs(step) <= 1e-17 * std::abs(z)) break;
        }
        roots.push_back(z);
    }
    return roots;
}

} // namespace

FilterBank<double> daubechies_filters(int order) {
    if (order < kMinDaubechiesOrder || order > kMaxDaubechiesOrder) {
        throw config_error("unsupported Daubechies order " + std::to_string(order) +
                           "; valid orders are " + std::to_string(kMinDaubechiesOrder) + ".." +
                           std::to_string(kMaxDaubechiesOrder));
    }
    const int m = order;

    // P(y) = sum_k C(M-1+k, k) y^k with y = sin^2(w/2). Each root y_i maps to a
    // reciprocal pair of z roots through z^2 - (2 - 4y) z + 1 = 0; keep the one
    // outside the unit circle, which gives the extremal-phase filter in the
    // delay variable.
    std::vector<double> p(m);
    for (int k = 0; k < m; ++k) p[k] = binomial(m - 1 + k, k);

    std::vector<Complex> poly{Complex(1.0)};
    auto multiply = [&poly](Complex root) {
        // poly(w) *= (w - root)
        std::vector<Complex> next(poly.size() + 1, Complex(0.0));
        for (std::size_t i = 0; i < poly.size(); ++i) {
            next[i + 1] += poly[i];
            next[i] -= root * poly[i];
        }
        poly = std::move(next);
    };

    for (const Complex y : polynomial_roots(p)) {
        const Complex b = 2.0 - 4.0 * y;
        const Complex disc = std::sqrt(b * b - 4.0);
        Complex z = 0.5 * (b + disc);
        if (std::abs(z) < 1.0) z = 0.5 * (b - disc);
        multiply(z);
    }
    for (int i = 0; i < m; ++i) multiply(Complex(-1.0));

    const Eigen::Index len = 2 * m;
    Eigen::VectorXd lp(len);
    for (Eigen::Index k = 0; k < len; ++k) lp[k] = poly[k].real();
    lp *= std::sqrt(2.0) / lp.sum();

    FilterBank<double> f;
    f.order = m;
    f.lp = lp;
    f.hp.resize(len);
    for (Eigen::Index k = 0; k < len; ++k) {
        f.hp[k] = ((k % 2 == 0) ? 1.0 : -1.0) * lp[len - 1 - k];
    }
    f.lp_r = f.lp.reverse();
    f.hp_r = f.hp.reverse();
    return f;
}

std::string wavelet_name(int order) { return "db" + std::to_string(order); }

} // namespace wavecast
