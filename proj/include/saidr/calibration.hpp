#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "saidr/grouped.hpp"
#include "saidr/meanfield.hpp"
#include "saidr/network.hpp"
#include "saidr/rng.hpp"

namespace saidr {

// Free parameters of the fit: infectious-period moments of the symptomatic
// state, one transmission rate per beta window, the offset of the first
// observation relative to model start, and the cluster fraction.
struct ParamVector {
    double is_mean = 1.5;
    double is_var = 2.25;
    std::vector<double> beta; // one entry per window
    double t0 = 0.0;
    double f = 0.3;

    std::size_t dim() const { return 4 + beta.size(); }
    std::vector<double> flatten() const;
    static ParamVector unflatten(std::span<const double> x, std::size_t n_beta);
};

// Weekly cumulative positive counts, 7-day spacing.
struct ObservedSeries {
    std::vector<double> counts;

    void validate() const; // nonnegative, nondecreasing
};

ObservedSeries read_observed_csv(const std::string& path);
void write_observed_csv(const std::string& path, const ObservedSeries& obs);

// Everything the forward model needs besides the free parameters.
struct FitScenario {
    std::vector<GroupParams> groups;
    MixingRule mixing;
    NetworkConfig net;        // f is replaced per sample
    PhaseLayout layout;       // k_is is replaced per sample
    ModelParams params;       // beta schedule and lambda_is replaced per sample
    std::vector<int> student_groups;
    double t0_max = 30.0;     // search range of the first-observation offset
    double e1_initial = 0.005;
    double dt = 0.05;
    bool detected_only_effectiveness = false;

    // Window count covering the whole possible observation span.
    std::size_t n_beta(std::size_t n_obs) const;
};

// Model counterpart of the observed series: the detected-or-traced student
// count sampled at t0 + 7(s-1).
std::vector<double> model_series(const ParamVector& p, std::size_t n_obs,
                                 const FitScenario& scenario);

// Sum of absolute deviations between observed and modeled series.
double loss(const ParamVector& p, const ObservedSeries& observed, const FitScenario& scenario);

// Ratio of the ever-infected student population without tracing to the one
// with tracing, evaluated at the final observation time. Sets *flagged when
// the denominator falls below one person.
double effectiveness(const ParamVector& p, const FitScenario& scenario, std::size_t n_obs,
                     bool* flagged = nullptr);

struct ChainSample {
    ParamVector params;
    double error = 0.0;
    double effectiveness = 1.0;
    bool effectiveness_flagged = false;
    bool accepted = false; // proposal accepted at this step
};

struct MhSettings {
    std::size_t samples = 10000;
    std::vector<double> proposal_sd; // per flattened coordinate
    bool compute_effectiveness = true;
};

// Metropolis-Hastings with independent Gaussian proposals per coordinate and
// target density proportional to loss^{-2}. Out-of-domain proposals are
// rejected outright; a zero-loss proposal is always accepted. On rejection
// the chain repeats the current sample.
std::vector<ChainSample> metropolis_hastings(const ParamVector& initial, const MhSettings& mh,
                                             const ObservedSeries& observed,
                                             const FitScenario& scenario, Rng& rng);

// Generic kernel behind the typed wrapper, usable with any loss function;
// target density is loss^{-2}. Returns one row per step; `errors` (when
// given) receives the per-step loss values.
std::vector<std::vector<double>> mh_chain(
    std::vector<double> initial, std::span<const double> proposal_sd, std::size_t n_samples,
    const std::function<double(std::span<const double>)>& loss_fn,
    const std::function<bool(std::span<const double>)>& in_domain, Rng& rng,
    std::vector<double>* errors = nullptr);

struct Histogram {
    std::vector<double> edges;       // size bins+1
    std::vector<std::size_t> counts; // size bins
};

Histogram make_histogram(std::span<const double> values, int bins);

struct ChainSummary {
    std::size_t total = 0;
    std::size_t used = 0; // samples with error <= s_max
    double s_max = 0.0;
    double min_error = 0.0;
    ParamVector min_error_sample;
    double effectiveness_mean = 0.0;
    Histogram error_hist, effectiveness_hist, k_is_hist, is_mean_hist, f_hist;
    // One {q1, median, q3} triple per beta window.
    std::vector<std::array<double, 3>> beta_quartiles;
};

// Filters the chain at `s_max` and aggregates the reported statistics;
// throws input_error when nothing survives the filter.
ChainSummary summarize(std::span<const ChainSample> chain, double s_max, int bins = 30);

// Synthetic observed data from a stated ground truth (model series rounded
// to whole counts).
ObservedSeries synthesize_observed(const ParamVector& truth, std::size_t n_obs,
                                   const FitScenario& scenario);

} // namespace saidr
