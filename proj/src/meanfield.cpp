#include "saidr/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "saidr/errors.hpp"
#include "saidr/kernels.hpp"

namespace saidr {

void PhaseLayout::validate() const {
    if (k_a < 1 || k_e < 1 || k_is < 1 || k_ia < 1 || k_d < 1 || k_c < 1) {
        throw input_error("phase counts must be positive integers");
    }
}

std::string PhaseLayout::column_name(int col) const {
    if (col == s()) return "S";
    if (col >= a(0) && col < a(k_a)) return "A" + std::to_string(col - a(0) + 1);
    if (col >= e(0) && col < e(k_e)) return "E" + std::to_string(col - e(0) + 1);
    if (col >= is(0) && col < is(k_is)) return "Is" + std::to_string(col - is(0) + 1);
    if (col >= ia(0) && col < ia(k_ia)) return "Ia" + std::to_string(col - ia(0) + 1);
    if (col >= d(0) && col < d(k_d)) return "D" + std::to_string(col - d(0) + 1);
    if (col >= c(0) && col < c(k_c)) return "C" + std::to_string(col - c(0) + 1);
    if (col == rc()) return "RC";
    if (col == rd()) return "RD";
    if (col == ru()) return "RU";
    throw input_error("column index out of range");
}

Compartment compartment_from_name(const std::string& name) {
    if (name == "S") return Compartment::S;
    if (name == "A") return Compartment::A;
    if (name == "E") return Compartment::E;
    if (name == "Is") return Compartment::Is;
    if (name == "Ia") return Compartment::Ia;
    if (name == "D") return Compartment::D;
    if (name == "C") return Compartment::C;
    if (name == "RC") return Compartment::RC;
    if (name == "RD") return Compartment::RD;
    if (name == "RU") return Compartment::RU;
    throw input_error("unknown state name: " + name);
}

const char* compartment_name(Compartment c) {
    switch (c) {
        case Compartment::S: return "S";
        case Compartment::A: return "A";
        case Compartment::E: return "E";
        case Compartment::Is: return "Is";
        case Compartment::Ia: return "Ia";
        case Compartment::D: return "D";
        case Compartment::C: return "C";
        case Compartment::RC: return "RC";
        case Compartment::RD: return "RD";
        case Compartment::RU: return "RU";
    }
    return "?";
}

std::vector<int> compartment_columns(const PhaseLayout& layout, Compartment c) {
    std::vector<int> cols;
    switch (c) {
        case Compartment::S: cols.push_back(layout.s()); break;
        case Compartment::A:
            for (int j = 0; j < layout.k_a; ++j) cols.push_back(layout.a(j));
            break;
        case Compartment::E:
            for (int j = 0; j < layout.k_e; ++j) cols.push_back(layout.e(j));
            break;
        case Compartment::Is:
            for (int j = 0; j < layout.k_is; ++j) cols.push_back(layout.is(j));
            break;
        case Compartment::Ia:
            for (int j = 0; j < layout.k_ia; ++j) cols.push_back(layout.ia(j));
            break;
        case Compartment::D:
            for (int j = 0; j < layout.k_d; ++j) cols.push_back(layout.d(j));
            break;
        case Compartment::C:
            for (int j = 0; j < layout.k_c; ++j) cols.push_back(layout.c(j));
            break;
        case Compartment::RC: cols.push_back(layout.rc()); break;
        case Compartment::RD: cols.push_back(layout.rd()); break;
        case Compartment::RU: cols.push_back(layout.ru()); break;
    }
    return cols;
}

double BetaSchedule::at(double t) const {
    if (values.empty()) return base;
    if (t <= window) return values.front();
    const auto idx = static_cast<std::size_t>(std::ceil(t / window)) - 1;
    return values[std::min(idx, values.size() - 1)];
}

void ModelParams::validate() const {
    if (!(p_ia >= 0.0 && p_ia <= 1.0)) throw input_error("p_ia must be in [0,1]");
    const double rates[] = {lambda_a, lambda_e, lambda_is, lambda_ia, lambda_d, lambda_c};
    for (double r : rates) {
        if (!(r > 0.0)) throw input_error("phase rates must be positive");
    }
    if (lambda_tr < 0.0) throw input_error("lambda_tr must be nonnegative");
    if (beta_ia_ratio < 0.0) throw input_error("beta_ia_ratio must be nonnegative");
    if (beta_is.base < 0.0) throw input_error("beta_is must be nonnegative");
    for (double b : beta_is.values) {
        if (b < 0.0) throw input_error("beta_is must be nonnegative");
    }
    if (!(beta_is.window > 0.0)) throw input_error("beta window must be positive");
}

StateMatrix::StateMatrix(std::size_t nodes, const PhaseLayout& layout)
    : n_(nodes), m_(layout.states()), v_(nodes * static_cast<std::size_t>(layout.states()), 0.0) {
    layout.validate();
}

double StateMatrix::row_sum(std::size_t node) const {
    double s = 0.0;
    for (int c = 0; c < m_; ++c) s += at(node, c);
    return s;
}

StateMatrix uniform_initial(std::size_t nodes, const PhaseLayout& layout, double e1) {
    if (!(e1 >= 0.0 && e1 <= 1.0)) throw input_error("initial E1 probability must be in [0,1]");
    StateMatrix st(nodes, layout);
    auto s = st.column(layout.s());
    auto ecol = st.column(layout.e(0));
    std::fill(s.begin(), s.end(), 1.0 - e1);
    std::fill(ecol.begin(), ecol.end(), e1);
    return st;
}

namespace {

struct Workspace {
    std::vector<double> sum_is, sum_ia, sum_cd, sum_eii, phi, r_inf, r_tr;
    void resize(std::size_t n) {
        sum_is.assign(n, 0.0);
        sum_ia.assign(n, 0.0);
        sum_cd.assign(n, 0.0);
        sum_eii.assign(n, 0.0);
        phi.assign(n, 0.0);
        r_inf.assign(n, 0.0);
        r_tr.assign(n, 0.0);
    }
};

void accumulate_columns(const StateMatrix& st, int first, int count, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (int j = 0; j < count; ++j) kernels::add(st.column(first + j), out);
}

void compute_rates_ws(const StateMatrix& state, const ContactOperator& net,
                      const ModelParams& params, const PhaseLayout& layout, double beta_is,
                      Workspace& ws) {
    const std::size_t n = state.nodes();
    if (net.size() != n) throw input_error("state/network size mismatch");
    if (state.states() != layout.states()) throw input_error("state/layout shape mismatch");
    accumulate_columns(state, layout.is(0), layout.k_is, ws.sum_is);
    accumulate_columns(state, layout.ia(0), layout.k_ia, ws.sum_ia);
    accumulate_columns(state, layout.c(0), layout.k_c, ws.sum_cd);
    for (int j = 0; j < layout.k_d; ++j) kernels::add(state.column(layout.d(j)), ws.sum_cd);

    kernels::scale(beta_is, ws.sum_is, ws.phi);
    kernels::axpy(params.beta_ia_ratio * beta_is, ws.sum_ia, ws.phi);
    net.apply_infection(ws.phi, ws.r_inf);

    net.apply_tracing(ws.sum_cd, ws.r_tr);
    kernels::scale(params.lambda_tr, ws.r_tr, ws.r_tr);
}

// All four RK4 stages of a step share the step's beta window value, so the
// derivative takes the scalar directly rather than a time.
void rhs_fixed_beta(const StateMatrix& state, const ContactOperator& net,
                    const ModelParams& params, const PhaseLayout& layout, double beta_is,
                    StateMatrix& out, Workspace& ws) {
    compute_rates_ws(state, net, params, layout, beta_is, ws);
    accumulate_columns(state, layout.e(0), layout.k_e, ws.sum_eii);
    kernels::add(ws.sum_is, ws.sum_eii);
    kernels::add(ws.sum_ia, ws.sum_eii);

    const auto S = state.column(layout.s());

    // S: loses to infection and tracing, regains from the last alert phase
    auto dS = out.column(layout.s());
    kernels::scale(params.lambda_a, state.column(layout.a(layout.k_a - 1)), dS);
    kernels::mul_sub(ws.r_inf, S, dS);
    kernels::mul_sub(ws.r_tr, S, dS);

    // A chain
    auto dA1 = out.column(layout.a(0));
    kernels::mul(ws.r_tr, S, dA1);
    kernels::axpy(-params.lambda_a, state.column(layout.a(0)), dA1);
    for (int j = 1; j < layout.k_a; ++j) {
        kernels::chain(params.lambda_a, state.column(layout.a(j - 1)), state.column(layout.a(j)),
                       out.column(layout.a(j)));
    }

    // E chain, drained by tracing on every phase
    auto dE1 = out.column(layout.e(0));
    kernels::mul(ws.r_inf, S, dE1);
    kernels::axpy(-params.lambda_e, state.column(layout.e(0)), dE1);
    kernels::mul_sub(ws.r_tr, state.column(layout.e(0)), dE1);
    for (int j = 1; j < layout.k_e; ++j) {
        kernels::chain_drain(params.lambda_e, state.column(layout.e(j - 1)),
                             state.column(layout.e(j)), ws.r_tr, out.column(layout.e(j)));
    }

    // Is chain, fed by the branching out of the last E phase
    auto dIs1 = out.column(layout.is(0));
    kernels::scale(params.p_is() * params.lambda_e, state.column(layout.e(layout.k_e - 1)), dIs1);
    kernels::axpy(-params.lambda_is, state.column(layout.is(0)), dIs1);
    kernels::mul_sub(ws.r_tr, state.column(layout.is(0)), dIs1);
    for (int j = 1; j < layout.k_is; ++j) {
        kernels::chain_drain(params.lambda_is, state.column(layout.is(j - 1)),
                             state.column(layout.is(j)), ws.r_tr, out.column(layout.is(j)));
    }

    // Ia chain
    auto dIa1 = out.column(layout.ia(0));
    kernels::scale(params.p_ia * params.lambda_e, state.column(layout.e(layout.k_e - 1)), dIa1);
    kernels::axpy(-params.lambda_ia, state.column(layout.ia(0)), dIa1);
    kernels::mul_sub(ws.r_tr, state.column(layout.ia(0)), dIa1);
    for (int j = 1; j < layout.k_ia; ++j) {
        kernels::chain_drain(params.lambda_ia, state.column(layout.ia(j - 1)),
                             state.column(layout.ia(j)), ws.r_tr, out.column(layout.ia(j)));
    }

    // D chain (no tracing drain; detected cases already isolate)
    auto dD1 = out.column(layout.d(0));
    kernels::scale(params.lambda_is, state.column(layout.is(layout.k_is - 1)), dD1);
    kernels::axpy(-params.lambda_d, state.column(layout.d(0)), dD1);
    for (int j = 1; j < layout.k_d; ++j) {
        kernels::chain(params.lambda_d, state.column(layout.d(j - 1)), state.column(layout.d(j)),
                       out.column(layout.d(j)));
    }

    // C chain, fed by tracing acting on every E/Is/Ia phase
    auto dC1 = out.column(layout.c(0));
    kernels::mul(ws.r_tr, ws.sum_eii, dC1);
    kernels::axpy(-params.lambda_c, state.column(layout.c(0)), dC1);
    for (int j = 1; j < layout.k_c; ++j) {
        kernels::chain(params.lambda_c, state.column(layout.c(j - 1)), state.column(layout.c(j)),
                       out.column(layout.c(j)));
    }

    // Absorbing states
    kernels::scale(params.lambda_c, state.column(layout.c(layout.k_c - 1)), out.column(layout.rc()));
    kernels::scale(params.lambda_d, state.column(layout.d(layout.k_d - 1)), out.column(layout.rd()));
    kernels::scale(params.lambda_ia, state.column(layout.ia(layout.k_ia - 1)),
                   out.column(layout.ru()));
}

} // namespace

Rates compute_rates(const StateMatrix& state, const ContactOperator& net,
                    const ModelParams& params, const PhaseLayout& layout, double t) {
    Workspace ws;
    ws.resize(state.nodes());
    compute_rates_ws(state, net, params, layout, params.beta_is_at(t), ws);
    return {std::move(ws.r_inf), std::move(ws.r_tr)};
}

void rhs(const StateMatrix& state, const ContactOperator& net, const ModelParams& params,
         const PhaseLayout& layout, double t, StateMatrix& out) {
    Workspace ws;
    ws.resize(state.nodes());
    rhs_fixed_beta(state, net, params, layout, params.beta_is_at(t), out, ws);
}

namespace {

// One RK4 step from `y` at time t with step h and a fixed beta value.
void rk4_step(StateMatrix& y, const ContactOperator& net, const ModelParams& params,
              const PhaseLayout& layout, double beta, double h, StateMatrix& k1, StateMatrix& k2,
              StateMatrix& k3, StateMatrix& k4, StateMatrix& tmp, Workspace& ws) {
    rhs_fixed_beta(y, net, params, layout, beta, k1, ws);
    kernels::xpay(y.data(), 0.5 * h, k1.data(), tmp.data());
    rhs_fixed_beta(tmp, net, params, layout, beta, k2, ws);
    kernels::xpay(y.data(), 0.5 * h, k2.data(), tmp.data());
    rhs_fixed_beta(tmp, net, params, layout, beta, k3, ws);
    kernels::xpay(y.data(), h, k3.data(), tmp.data());
    rhs_fixed_beta(tmp, net, params, layout, beta, k4, ws);
    kernels::rk4_combine(y.data(), k1.data(), k2.data(), k3.data(), k4.data(), h, y.data());
}

void guard_and_renormalize(StateMatrix& y, const IntegrationSettings& settings,
                           std::vector<double>& row_sum, std::vector<double>& recip) {
    const std::size_t n = y.nodes();
    const int m = y.states();
    double lowest = 0.0;
    for (int c = 0; c < m; ++c) {
        lowest = std::min(lowest, kernels::clip_negative(y.column(c), settings.negative_floor));
    }
    if (lowest < settings.negative_floor) {
        throw numerical_error("integration produced negative probabilities beyond the guard; "
                              "reduce dt");
    }
    std::fill(row_sum.begin(), row_sum.end(), 0.0);
    for (int c = 0; c < m; ++c) kernels::add(y.column(c), row_sum);
    double drift = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        drift = std::max(drift, std::abs(row_sum[i] - 1.0));
        recip[i] = 1.0 / row_sum[i];
    }
    if (drift > settings.row_sum_tol) {
        throw numerical_error("row-sum drift exceeds tolerance; step too large");
    }
    for (int c = 0; c < m; ++c) {
        auto col = y.column(c);
        kernels::mul(col, recip, col);
    }
}

} // namespace

void integrate_observe(const StateMatrix& initial, const ContactOperator& net,
                       const ModelParams& params, const PhaseLayout& layout,
                       std::span<const double> output_times, const SampleObserver& observer,
                       const IntegrationSettings& settings) {
    layout.validate();
    params.validate();
    if (!(settings.dt > 0.0)) throw input_error("dt must be positive");
    if (output_times.empty()) throw input_error("at least one output time is required");
    for (std::size_t i = 0; i < output_times.size(); ++i) {
        if (output_times[i] < 0.0) throw input_error("output times must be nonnegative");
        if (i > 0 && output_times[i] < output_times[i - 1]) {
            throw input_error("output times must be nondecreasing");
        }
    }
    const std::size_t n = initial.nodes();
    if (net.size() != n) throw input_error("initial state / network size mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(initial.row_sum(i) - 1.0) > 1e-9) {
            throw input_error("initial rows must sum to 1");
        }
    }

    const double t_end = output_times.back();

    // Segment the time axis at the beta change points so no step straddles
    // one.
    std::vector<double> cuts{0.0};
    if (params.beta_is.values.size() > 1) {
        for (std::size_t w = 1; w < params.beta_is.values.size(); ++w) {
            const double c = w * params.beta_is.window;
            if (c < t_end) cuts.push_back(c);
        }
    }
    cuts.push_back(t_end);

    StateMatrix y = initial;
    StateMatrix k1(n, layout), k2(n, layout), k3(n, layout), k4(n, layout), tmp(n, layout);
    StateMatrix interp(n, layout);
    Workspace ws;
    ws.resize(n);
    std::vector<double> row_sum(n, 0.0), recip(n, 0.0);

    std::size_t out_idx = 0;
    auto emit_until = [&](double t_prev, double t_next, const StateMatrix& prev,
                          const StateMatrix& next) {
        while (out_idx < output_times.size() && output_times[out_idx] <= t_next + 1e-12) {
            const double t_out = output_times[out_idx];
            if (t_next == t_prev || t_out >= t_next) {
                observer(t_out, next);
            } else {
                const double w = (t_out - t_prev) / (t_next - t_prev);
                kernels::scale(1.0 - w, prev.data(), interp.data());
                kernels::axpy(w, next.data(), interp.data());
                observer(t_out, interp);
            }
            ++out_idx;
        }
    };

    // Outputs at t = 0 (or before the first step).
    while (out_idx < output_times.size() && output_times[out_idx] <= 1e-12) {
        observer(output_times[out_idx], y);
        ++out_idx;
    }

    StateMatrix prev = y;
    for (std::size_t seg = 0; seg + 1 < cuts.size(); ++seg) {
        const double seg_start = cuts[seg];
        const double seg_end = cuts[seg + 1];
        const double span = seg_end - seg_start;
        if (span <= 0.0) continue;
        const auto steps = static_cast<std::size_t>(std::ceil(span / settings.dt - 1e-12));
        const double h = span / static_cast<double>(std::max<std::size_t>(steps, 1));
        const double beta = params.beta_is.at(0.5 * (seg_start + seg_end));
        for (std::size_t s = 0; s < steps; ++s) {
            const double t0 = seg_start + s * h;
            const double t1 = (s + 1 == steps) ? seg_end : t0 + h;
            const bool need_prev =
                out_idx < output_times.size() && output_times[out_idx] <= t1 + 1e-12;
            if (need_prev) prev = y;
            rk4_step(y, net, params, layout, beta, t1 - t0, k1, k2, k3, k4, tmp, ws);
            guard_and_renormalize(y, settings, row_sum, recip);
            if (need_prev) emit_until(t0, t1, prev, y);
        }
    }
    // Anything left (output times equal to t_end up to rounding).
    while (out_idx < output_times.size()) {
        observer(output_times[out_idx], y);
        ++out_idx;
    }
}

Trajectory integrate(const StateMatrix& initial, const ContactOperator& net,
                     const ModelParams& params, const PhaseLayout& layout,
                     std::span<const double> output_times, const IntegrationSettings& settings) {
    Trajectory traj;
    traj.layout = layout;
    integrate_observe(
        initial, net, params, layout, output_times,
        [&](double t, const StateMatrix& st) {
            traj.times.push_back(t);
            traj.states.push_back(st);
        },
        settings);
    return traj;
}

std::vector<double> prevalence(const Trajectory& traj, std::span<const Compartment> comps,
                               std::span<const std::uint32_t> nodes) {
    std::vector<int> cols;
    for (auto c : comps) {
        const auto cc = compartment_columns(traj.layout, c);
        cols.insert(cols.end(), cc.begin(), cc.end());
    }
    std::vector<double> out;
    out.reserve(traj.times.size());
    for (const auto& st : traj.states) {
        double acc = 0.0;
        if (nodes.empty()) {
            for (int c : cols) acc += kernels::sum(st.column(c));
            out.push_back(acc / static_cast<double>(st.nodes()));
        } else {
            for (int c : cols) {
                const auto col = st.column(c);
                for (auto i : nodes) acc += col[i];
            }
            out.push_back(acc / static_cast<double>(nodes.size()));
        }
    }
    return out;
}

std::vector<double> weighted_compartment_count(const Trajectory& traj,
                                               std::span<const Compartment> comps,
                                               std::span<const double> weight) {
    std::vector<int> cols;
    for (auto c : comps) {
        const auto cc = compartment_columns(traj.layout, c);
        cols.insert(cols.end(), cc.begin(), cc.end());
    }
    std::vector<double> out;
    out.reserve(traj.times.size());
    for (const auto& st : traj.states) {
        if (weight.size() != st.nodes()) throw input_error("weight vector size mismatch");
        double acc = 0.0;
        for (int c : cols) acc += kernels::dot(st.column(c), weight);
        out.push_back(acc);
    }
    return out;
}

std::vector<double> detected_cumulative(const Trajectory& traj, std::span<const double> weight) {
    const Compartment comps[] = {Compartment::D, Compartment::C, Compartment::RC, Compartment::RD};
    return weighted_compartment_count(traj, comps, weight);
}

void write_prevalence_csv(std::ostream& out, const Trajectory& traj,
                          std::span<const std::string> labels,
                          std::span<const std::vector<std::uint32_t>> row_sets) {
    if (labels.size() != row_sets.size()) throw input_error("labels/row_sets size mismatch");
    constexpr Compartment all[] = {Compartment::S,  Compartment::A,  Compartment::E,
                                   Compartment::Is, Compartment::Ia, Compartment::D,
                                   Compartment::C,  Compartment::RC, Compartment::RD,
                                   Compartment::RU};
    out << "t,group_or_node,state,probability\n";
    char tbuf[64];
    for (std::size_t ti = 0; ti < traj.times.size(); ++ti) {
        std::snprintf(tbuf, sizeof(tbuf), "%.6f", traj.times[ti]);
        const auto& st = traj.states[ti];
        for (std::size_t g = 0; g < labels.size(); ++g) {
            for (auto comp : all) {
                double acc = 0.0;
                for (int c : compartment_columns(traj.layout, comp)) {
                    const auto col = st.column(c);
                    if (row_sets[g].empty()) {
                        acc += kernels::sum(col);
                    } else {
                        for (auto i : row_sets[g]) acc += col[i];
                    }
                }
                const double denom = row_sets[g].empty() ? static_cast<double>(st.nodes())
                                                         : static_cast<double>(row_sets[g].size());
                out << tbuf << ',' << labels[g] << ',' << compartment_name(comp) << ','
                    << acc / denom << '\n';
            }
        }
    }
}

} // namespace saidr
