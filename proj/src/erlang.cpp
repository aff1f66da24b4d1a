#include "saidr/erlang.hpp"

#include <cmath>
#include <stdexcept>

namespace saidr {

ErlangParams make_erlang(int k, double lambda) {
    if (k < 1) throw std::domain_error("ErlangParams: shape must be a positive integer");
    if (!(lambda > 0.0)) throw std::domain_error("ErlangParams: rate must be positive");
    return ErlangParams{k, lambda};
}

double erlang_pdf(const ErlangParams& p, double t) {
    if (t < 0.0) throw std::domain_error("erlang_pdf: t must be nonnegative");
    if (t == 0.0) return p.k == 1 ? p.lambda : 0.0;
    const double log_pdf = p.k * std::log(p.lambda) + (p.k - 1) * std::log(t) - p.lambda * t -
                           std::lgamma(static_cast<double>(p.k));
    return std::exp(log_pdf);
}

double erlang_cdf(const ErlangParams& p, double t) {
    if (t < 0.0) throw std::domain_error("erlang_cdf: t must be nonnegative");
    // 1 - exp(-lt) sum_{i<k} (lt)^i / i!, with the tail sum accumulated in
    // log space for large shapes.
    const double lt = p.lambda * t;
    double term = 1.0;
    double acc = 1.0;
    for (int i = 1; i < p.k; ++i) {
        term *= lt / i;
        acc += term;
    }
    return 1.0 - std::exp(-lt) * acc;
}

ErlangParams fit_erlang(double mean, double variance) {
    if (!(mean > 0.0)) throw std::domain_error("fit_erlang: mean must be positive");
    if (!(variance > 0.0)) throw std::domain_error("fit_erlang: variance must be positive");
    long long k = std::llround(mean * mean / variance);
    if (k < 1) k = 1;
    return ErlangParams{static_cast<int>(k), static_cast<double>(k) / mean};
}

double sample_erlang(const ErlangParams& p, Rng& rng) {
    double t = 0.0;
    for (int i = 0; i < p.k; ++i) t += rng.exponential(p.lambda);
    return t;
}

double tracing_success_probability(const ErlangParams& detect, double lambda_tr) {
    if (lambda_tr < 0.0) {
        throw std::domain_error("tracing_success_probability: rate must be nonnegative");
    }
    const double a = lambda_tr / (lambda_tr + detect.lambda);
    const double q = detect.lambda / (lambda_tr + detect.lambda);
    double geom = 1.0;
    double acc = 0.0;
    for (int i = 0; i < detect.k; ++i) {
        acc += geom;
        geom *= q;
    }
    return a * acc;
}

} // namespace saidr
