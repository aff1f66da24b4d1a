#pragma once

#include "saidr/rng.hpp"

namespace saidr {

// Shape/rate pair of an Erlang-distributed transition time. Every
// non-exponential nodal transition in the model is parameterized this way;
// k = 1 recovers the exponential distribution.
struct ErlangParams {
    int k = 1;           // shape, number of phases
    double lambda = 1.0; // rate, 1/day

    double mean() const { return k / lambda; }
    double variance() const { return k / (lambda * lambda); }
};

// Validating constructor; throws std::domain_error on k < 1 or lambda <= 0.
ErlangParams make_erlang(int k, double lambda);

// Density at t >= 0, evaluated in log space so large shapes do not overflow.
double erlang_pdf(const ErlangParams& p, double t);

// Cumulative distribution at t >= 0 (regularized lower incomplete gamma for
// integer shape).
double erlang_cdf(const ErlangParams& p, double t);

// Moment matching: k = round(mean^2/variance), ties rounding up, clamped to
// >= 1; lambda = k/mean. The returned mean is exact, the variance is the
// nearest achievable for integer k.
ErlangParams fit_erlang(double mean, double variance);

// Sum of k independent exponential(lambda) draws.
double sample_erlang(const ErlangParams& p, Rng& rng);

// Probability that an exponential(lambda_tr) tracing process fires before an
// Erlang-distributed detection window `detect` closes:
//   (lambda_tr/(lambda_tr+lambda_D)) * sum_{i<k_D} (lambda_D/(lambda_tr+lambda_D))^i
double tracing_success_probability(const ErlangParams& detect, double lambda_tr);

} // namespace saidr
