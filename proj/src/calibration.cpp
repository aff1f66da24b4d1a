#include "saidr/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "saidr/erlang.hpp"
#include "saidr/errors.hpp"

namespace saidr {

std::vector<double> ParamVector::flatten() const {
    std::vector<double> x;
    x.reserve(dim());
    x.push_back(is_mean);
    x.push_back(is_var);
    x.insert(x.end(), beta.begin(), beta.end());
    x.push_back(t0);
    x.push_back(f);
    return x;
}

ParamVector ParamVector::unflatten(std::span<const double> x, std::size_t n_beta) {
    if (x.size() != n_beta + 4) throw input_error("parameter vector size mismatch");
    ParamVector p;
    p.is_mean = x[0];
    p.is_var = x[1];
    p.beta.assign(x.begin() + 2, x.begin() + 2 + n_beta);
    p.t0 = x[2 + n_beta];
    p.f = x[3 + n_beta];
    return p;
}

void ObservedSeries::validate() const {
    if (counts.empty()) throw input_error("observed series is empty");
    double prev = 0.0;
    for (double c : counts) {
        if (c < 0.0) throw input_error("observed counts must be nonnegative");
        if (c < prev) throw input_error("observed cumulative counts must be nondecreasing");
        prev = c;
    }
}

ObservedSeries read_observed_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open observed series: " + path);
    ObservedSeries obs;
    std::string line;
    long long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string week, count;
        if (!std::getline(ls, week, ',') || !std::getline(ls, count)) {
            throw input_error("observed series: expected 'week_index,cumulative_cases' at line " +
                              std::to_string(line_no));
        }
        if (line_no == 1 && week == "week_index") continue; // optional header
        try {
            obs.counts.push_back(std::stod(count));
        } catch (const std::exception&) {
            throw input_error("observed series: bad count at line " + std::to_string(line_no));
        }
    }
    obs.validate();
    return obs;
}

void write_observed_csv(const std::string& path, const ObservedSeries& obs) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot write observed series: " + path);
    out << "week_index,cumulative_cases\n";
    for (std::size_t s = 0; s < obs.counts.size(); ++s) {
        out << (s + 1) << ',' << obs.counts[s] << '\n';
    }
}

std::size_t FitScenario::n_beta(std::size_t n_obs) const {
    const double horizon = t0_max + 7.0 * static_cast<double>(n_obs - 1);
    return static_cast<std::size_t>(std::ceil(horizon / params.beta_is.window - 1e-12));
}

namespace {

// Samples can request very stiff phase chains (small is_var gives a large
// lambda_is); keep the fixed-step integrator inside its stability region.
double stable_dt(double dt, const ModelParams& p) {
    const double max_rate = std::max({p.lambda_a, p.lambda_e, p.lambda_is, p.lambda_ia,
                                      p.lambda_d, p.lambda_c});
    return std::min(dt, 0.8 / max_rate);
}

} // namespace

std::vector<double> model_series(const ParamVector& p, std::size_t n_obs,
                                 const FitScenario& scenario) {
    if (n_obs == 0) throw input_error("model_series: need at least one observation");
    const ErlangParams is = fit_erlang(p.is_mean, p.is_var);
    PhaseLayout layout = scenario.layout;
    layout.k_is = is.k;
    ModelParams params = scenario.params;
    params.lambda_is = is.lambda;
    params.beta_is.values = p.beta;
    NetworkConfig net = scenario.net;
    net.f = p.f;
    const auto matrices = build_group_matrices(scenario.groups, scenario.mixing, net);

    std::vector<double> times(n_obs);
    for (std::size_t s = 0; s < n_obs; ++s) times[s] = p.t0 + 7.0 * static_cast<double>(s);

    const StateMatrix init = uniform_initial(scenario.groups.size(), layout, scenario.e1_initial);
    IntegrationSettings settings;
    settings.dt = stable_dt(scenario.dt, params);
    const Trajectory traj = grouped_integrate(init, matrices, params, layout, times, settings);

    std::vector<double> populations;
    populations.reserve(scenario.groups.size());
    for (const auto& g : scenario.groups) populations.push_back(static_cast<double>(g.population));
    return detected_cumulative_grouped(traj, scenario.student_groups, populations);
}

double loss(const ParamVector& p, const ObservedSeries& observed, const FitScenario& scenario) {
    observed.validate();
    const auto y = model_series(p, observed.counts.size(), scenario);
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += std::abs(observed.counts[i] - y[i]);
    return s;
}

double effectiveness(const ParamVector& p, const FitScenario& scenario, std::size_t n_obs,
                     bool* flagged) {
    if (flagged) *flagged = false;
    const ErlangParams is = fit_erlang(p.is_mean, p.is_var);
    PhaseLayout layout = scenario.layout;
    layout.k_is = is.k;
    ModelParams params = scenario.params;
    params.lambda_is = is.lambda;
    params.beta_is.values = p.beta;
    NetworkConfig net = scenario.net;
    net.f = p.f;
    const auto matrices = build_group_matrices(scenario.groups, scenario.mixing, net);

    const double t_final = p.t0 + 7.0 * static_cast<double>(n_obs - 1);
    const std::vector<double> times{t_final};
    const StateMatrix init = uniform_initial(scenario.groups.size(), layout, scenario.e1_initial);
    IntegrationSettings settings;
    settings.dt = stable_dt(scenario.dt, params);

    std::vector<double> weight(scenario.groups.size(), 0.0);
    for (int s : scenario.student_groups) {
        weight[s] = static_cast<double>(scenario.groups[s].population);
    }
    std::vector<Compartment> comps;
    if (scenario.detected_only_effectiveness) {
        comps = {Compartment::D, Compartment::C, Compartment::RD, Compartment::RC};
    } else {
        comps = {Compartment::E,  Compartment::Is, Compartment::Ia, Compartment::D,
                 Compartment::C,  Compartment::RD, Compartment::RC, Compartment::RU};
    }

    const Trajectory with_tr = grouped_integrate(init, matrices, params, layout, times, settings);
    const double denom = weighted_compartment_count(with_tr, comps, weight).back();

    ModelParams no_tracing = params;
    no_tracing.lambda_tr = 0.0;
    const Trajectory without_tr =
        grouped_integrate(init, matrices, no_tracing, layout, times, settings);
    const double numer = weighted_compartment_count(without_tr, comps, weight).back();

    if (denom < 1.0) {
        if (flagged) *flagged = true;
        return 1.0;
    }
    return numer / denom;
}

std::vector<std::vector<double>> mh_chain(
    std::vector<double> initial, std::span<const double> proposal_sd, std::size_t n_samples,
    const std::function<double(std::span<const double>)>& loss_fn,
    const std::function<bool(std::span<const double>)>& in_domain, Rng& rng,
    std::vector<double>* errors) {
    if (n_samples < 1) throw input_error("chain needs at least one sample");
    if (proposal_sd.size() != initial.size()) {
        throw input_error("proposal sd size does not match parameter dimension");
    }
    for (double sd : proposal_sd) {
        if (sd < 0.0) throw input_error("proposal standard deviations must be nonnegative");
    }
    if (!in_domain(initial)) throw input_error("initial sample is out of domain");

    std::vector<std::vector<double>> chain;
    chain.reserve(n_samples);
    if (errors) {
        errors->clear();
        errors->reserve(n_samples);
    }

    std::vector<double> cur = std::move(initial);
    double cur_loss = loss_fn(cur);
    chain.push_back(cur);
    if (errors) errors->push_back(cur_loss);

    std::vector<double> prop(cur.size());
    for (std::size_t t = 1; t < n_samples; ++t) {
        for (std::size_t i = 0; i < cur.size(); ++i) {
            prop[i] = rng.normal(cur[i], proposal_sd[i]);
        }
        bool accept = false;
        double prop_loss = 0.0;
        if (in_domain(prop)) {
            prop_loss = loss_fn(prop);
            if (prop_loss == 0.0) {
                accept = true; // f = S^-2 diverges: certain acceptance
            } else if (!std::isfinite(prop_loss)) {
                rng.uniform(); // zero density, keep the stream aligned
            } else {
                const double ratio = cur_loss / prop_loss;
                const double rho = std::min(1.0, ratio * ratio);
                accept = rng.uniform() <= rho;
            }
        } else {
            rng.uniform(); // keep the stream aligned with the accept draw
        }
        if (accept) {
            cur = prop;
            cur_loss = prop_loss;
        }
        chain.push_back(cur);
        if (errors) errors->push_back(cur_loss);
    }
    return chain;
}

std::vector<ChainSample> metropolis_hastings(const ParamVector& initial, const MhSettings& mh,
                                             const ObservedSeries& observed,
                                             const FitScenario& scenario, Rng& rng) {
    observed.validate();
    const std::size_t n_beta = initial.beta.size();
    if (n_beta != scenario.n_beta(observed.counts.size())) {
        throw input_error("initial sample has wrong number of beta windows");
    }
    const double t0_max = scenario.t0_max;
    const auto in_domain = [n_beta, t0_max](std::span<const double> x) {
        if (!(x[0] > 0.0) || !(x[1] > 0.0)) return false; // is_mean, is_var
        // Moment matching above 64 phases is practically unidentifiable and
        // arbitrarily stiff; treat it as out of range.
        if (std::llround(x[0] * x[0] / x[1]) > 64) return false;
        for (std::size_t i = 0; i < n_beta; ++i) {
            if (x[2 + i] < 0.0) return false;
        }
        const double t0 = x[2 + n_beta];
        const double f = x[3 + n_beta];
        return t0 >= 0.0 && t0 <= t0_max && f >= 0.0 && f <= 1.0;
    };
    const auto loss_fn = [&](std::span<const double> x) {
        // A proposal whose forward run fails its numerical guards has no
        // usable density; infinite loss makes the kernel reject it.
        try {
            return loss(ParamVector::unflatten(x, n_beta), observed, scenario);
        } catch (const numerical_error&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    std::vector<double> errors;
    const auto rows =
        mh_chain(initial.flatten(), mh.proposal_sd, mh.samples, loss_fn, in_domain, rng, &errors);

    std::vector<ChainSample> chain;
    chain.reserve(rows.size());
    double cached_eff = 1.0;
    bool cached_flag = false;
    bool have_eff = false;
    for (std::size_t t = 0; t < rows.size(); ++t) {
        ChainSample cs;
        cs.params = ParamVector::unflatten(rows[t], n_beta);
        cs.error = errors[t];
        cs.accepted = t == 0 || rows[t] != rows[t - 1];
        if (mh.compute_effectiveness) {
            if (cs.accepted || !have_eff) {
                cached_eff =
                    effectiveness(cs.params, scenario, observed.counts.size(), &cached_flag);
                have_eff = true;
            }
            cs.effectiveness = cached_eff;
            cs.effectiveness_flagged = cached_flag;
        }
        chain.push_back(std::move(cs));
    }
    return chain;
}

Histogram make_histogram(std::span<const double> values, int bins) {
    if (values.empty()) throw input_error("histogram of empty data");
    if (bins < 1) throw input_error("histogram needs at least one bin");
    double lo = values[0], hi = values[0];
    for (double v : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi == lo) hi = lo + 1.0; // all-equal data: one-unit-wide bins
    Histogram h;
    h.edges.resize(bins + 1);
    h.counts.assign(bins, 0);
    const double w = (hi - lo) / bins;
    for (int b = 0; b <= bins; ++b) h.edges[b] = lo + b * w;
    for (double v : values) {
        auto b = static_cast<long long>((v - lo) / w);
        if (b >= bins) b = bins - 1;
        if (b < 0) b = 0;
        ++h.counts[b];
    }
    return h;
}

namespace {

std::array<double, 3> quartiles(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const auto pick = [&](double q) {
        const double idx = q * static_cast<double>(v.size() - 1);
        const auto lo = static_cast<std::size_t>(idx);
        const std::size_t hi = std::min(lo + 1, v.size() - 1);
        const double w = idx - static_cast<double>(lo);
        return (1.0 - w) * v[lo] + w * v[hi];
    };
    return {pick(0.25), pick(0.5), pick(0.75)};
}

} // namespace

ChainSummary summarize(std::span<const ChainSample> chain, double s_max, int bins) {
    if (chain.empty()) throw input_error("summarize: empty chain");
    ChainSummary sum;
    sum.total = chain.size();
    sum.s_max = s_max;

    std::vector<double> errs, effs, kis, means, fs;
    std::vector<std::vector<double>> betas;
    sum.min_error = chain.front().error;
    sum.min_error_sample = chain.front().params;
    for (const auto& cs : chain) {
        if (cs.error < sum.min_error) {
            sum.min_error = cs.error;
            sum.min_error_sample = cs.params;
        }
        if (cs.error > s_max) continue;
        errs.push_back(cs.error);
        effs.push_back(cs.effectiveness);
        kis.push_back(static_cast<double>(fit_erlang(cs.params.is_mean, cs.params.is_var).k));
        means.push_back(cs.params.is_mean);
        fs.push_back(cs.params.f);
        if (betas.empty()) betas.resize(cs.params.beta.size());
        for (std::size_t w = 0; w < cs.params.beta.size(); ++w) {
            betas[w].push_back(cs.params.beta[w]);
        }
    }
    sum.used = errs.size();
    if (sum.used == 0) {
        throw input_error("summarize: no samples below the error cutoff");
    }
    sum.error_hist = make_histogram(errs, bins);
    sum.effectiveness_hist = make_histogram(effs, bins);
    sum.k_is_hist = make_histogram(kis, bins);
    sum.is_mean_hist = make_histogram(means, bins);
    sum.f_hist = make_histogram(fs, bins);
    double acc = 0.0;
    for (double e : effs) acc += e;
    sum.effectiveness_mean = acc / static_cast<double>(effs.size());
    for (auto& b : betas) sum.beta_quartiles.push_back(quartiles(std::move(b)));
    return sum;
}

ObservedSeries synthesize_observed(const ParamVector& truth, std::size_t n_obs,
                                   const FitScenario& scenario) {
    ObservedSeries obs;
    obs.counts = model_series(truth, n_obs, scenario);
    for (double& c : obs.counts) c = std::round(c);
    // Rounding cannot break monotonicity of a nondecreasing series.
    obs.validate();
    return obs;
}

} // namespace saidr
