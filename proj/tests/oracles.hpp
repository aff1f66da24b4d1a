#pragma once

// Test-only oracles: adaptive quadrature, Kolmogorov-Smirnov statistics and
// small helpers kept independent of the implementation paths they check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace oracles {

inline double simpson(const std::function<double(double)>& f, double a, double b) {
    const double m = 0.5 * (a + b);
    return (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b));
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                                   double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double left = simpson(f, a, m);
    const double right = simpson(f, m, b);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return adaptive_simpson_rec(f, a, m, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, right, 0.5 * tol, depth - 1);
}

// Adaptive Simpson quadrature of f over [a, b].
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12) {
    return adaptive_simpson_rec(f, a, b, simpson(f, a, b), tol, 48);
}

// Kolmogorov-Smirnov statistic of samples against an analytic CDF.
inline double ks_statistic(std::vector<double> samples,
                           const std::function<double(double)>& cdf) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double c = cdf(samples[i]);
        d = std::max(d, std::abs(c - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - c));
    }
    return d;
}

inline double mean(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double variance(std::span<const double> v) {
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

} // namespace oracles
