#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "saidr/network.hpp"

namespace saidr {

// Phase counts of the expanded Markovian model. Column order of the state
// matrix is fixed: S, A-phases, E-phases, Is-phases, Ia-phases, D-phases,
// C-phases, RC, RD, RU.
struct PhaseLayout {
    int k_a = 12;
    int k_e = 3;
    int k_is = 1;
    int k_ia = 18;
    int k_d = 8;
    int k_c = 8;

    int states() const { return 4 + k_a + k_e + k_is + k_ia + k_d + k_c; }
    int s() const { return 0; }
    int a(int j) const { return 1 + j; }
    int e(int j) const { return 1 + k_a + j; }
    int is(int j) const { return 1 + k_a + k_e + j; }
    int ia(int j) const { return 1 + k_a + k_e + k_is + j; }
    int d(int j) const { return 1 + k_a + k_e + k_is + k_ia + j; }
    int c(int j) const { return 1 + k_a + k_e + k_is + k_ia + k_d + j; }
    int rc() const { return 1 + k_a + k_e + k_is + k_ia + k_d + k_c; }
    int rd() const { return rc() + 1; }
    int ru() const { return rc() + 2; }

    void validate() const;
    std::string column_name(int col) const;
};

// Aggregated compartments addressable by name.
enum class Compartment { S, A, E, Is, Ia, D, C, RC, RD, RU };

Compartment compartment_from_name(const std::string& name); // input_error on unknown
const char* compartment_name(Compartment c);
std::vector<int> compartment_columns(const PhaseLayout& layout, Compartment c);

// Piecewise-constant transmission rate, one value per `window`-day span,
// evaluated left-continuously at window boundaries. An empty value list
// means the base rate everywhere.
struct BetaSchedule {
    double base = 0.1;
    std::vector<double> values;
    double window = 15.0;

    double at(double t) const;
};

struct ModelParams {
    BetaSchedule beta_is;
    double beta_ia_ratio = 0.75; // beta_ia(t) = ratio * beta_is(t)
    double p_ia = 0.30;          // p_is = 1 - p_ia
    double lambda_a = 1.0 / 0.5833;
    double lambda_e = 1.0 / 1.255;
    double lambda_is = 1.0 / 1.5;
    double lambda_ia = 3.0;
    double lambda_d = 4.0;
    double lambda_c = 4.0;
    double lambda_tr = 1.5;

    double p_is() const { return 1.0 - p_ia; }
    double beta_is_at(double t) const { return beta_is.at(t); }
    double beta_ia_at(double t) const { return beta_ia_ratio * beta_is.at(t); }
    void validate() const;
};

// Per-node probability vectors over the expanded states, stored column-major
// (one contiguous vector of length nodes() per state) so the dynamics can
// run on whole state columns.
class StateMatrix {
public:
    StateMatrix() = default;
    StateMatrix(std::size_t nodes, const PhaseLayout& layout);

    std::size_t nodes() const { return n_; }
    int states() const { return m_; }
    std::span<double> column(int c) { return {v_.data() + static_cast<std::size_t>(c) * n_, n_}; }
    std::span<const double> column(int c) const {
        return {v_.data() + static_cast<std::size_t>(c) * n_, n_};
    }
    double& at(std::size_t node, int col) { return v_[static_cast<std::size_t>(col) * n_ + node]; }
    double at(std::size_t node, int col) const {
        return v_[static_cast<std::size_t>(col) * n_ + node];
    }
    double row_sum(std::size_t node) const;
    std::span<double> data() { return v_; }
    std::span<const double> data() const { return v_; }

private:
    std::size_t n_ = 0;
    int m_ = 0;
    std::vector<double> v_;
};

// All nodes susceptible except probability e1 on the first exposed phase.
StateMatrix uniform_initial(std::size_t nodes, const PhaseLayout& layout, double e1 = 0.0);

struct Rates {
    std::vector<double> infection; // r_I per node
    std::vector<double> tracing;   // r_T per node (lambda_tr folded in)
};

// r_I = W_inf (beta_is(t) sum Is + beta_ia(t) sum Ia),
// r_T = lambda_tr W_tr (sum C + sum D)
Rates compute_rates(const StateMatrix& state, const ContactOperator& net,
                    const ModelParams& params, const PhaseLayout& layout, double t);

// Time derivative of every state column.
void rhs(const StateMatrix& state, const ContactOperator& net, const ModelParams& params,
         const PhaseLayout& layout, double t, StateMatrix& out);

struct IntegrationSettings {
    double dt = 0.05;              // days
    double negative_floor = -1e-9; // entries below this abort the run
    double row_sum_tol = 1e-6;     // max drift of a row sum before abort
};

struct Trajectory {
    PhaseLayout layout;
    std::vector<double> times;
    std::vector<StateMatrix> states;
};

using SampleObserver = std::function<void(double, const StateMatrix&)>;

// Classical fixed-step RK4. Steps are aligned to the beta-schedule change
// points and all four stages of a step use that step's window value. Output
// states are linear interpolations between step endpoints. After each step,
// negative entries above `negative_floor` are clipped to zero and rows are
// renormalized; larger negatives or row-sum drift beyond `row_sum_tol`
// throw numerical_error.
void integrate_observe(const StateMatrix& initial, const ContactOperator& net,
                       const ModelParams& params, const PhaseLayout& layout,
                       std::span<const double> output_times, const SampleObserver& observer,
                       const IntegrationSettings& settings = {});

Trajectory integrate(const StateMatrix& initial, const ContactOperator& net,
                     const ModelParams& params, const PhaseLayout& layout,
                     std::span<const double> output_times,
                     const IntegrationSettings& settings = {});

// Mean over nodes (optionally restricted to `nodes`) of the summed
// probabilities of the named compartments, one value per stored time.
std::vector<double> prevalence(const Trajectory& traj, std::span<const Compartment> comps,
                               std::span<const std::uint32_t> nodes = {});

// sum_i weight[i] * sum_{c in comps} state(i, c), one value per stored time.
std::vector<double> weighted_compartment_count(const Trajectory& traj,
                                               std::span<const Compartment> comps,
                                               std::span<const double> weight);

// Detected-or-traced cumulative count: compartments D, C, RC, RD weighted by
// `weight` (population per row; zero excludes a row).
std::vector<double> detected_cumulative(const Trajectory& traj, std::span<const double> weight);

// CSV export, header "t,group_or_node,state,probability"; one row per stored
// time, per row set, per aggregated compartment. Times carry 6 decimals.
void write_prevalence_csv(std::ostream& out, const Trajectory& traj,
                          std::span<const std::string> labels,
                          std::span<const std::vector<std::uint32_t>> row_sets);

} // namespace saidr
