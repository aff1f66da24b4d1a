#include "saidr/grouped.hpp"

#include <cmath>

#include "saidr/errors.hpp"

namespace saidr {

GroupContactMatrices build_group_matrices(std::span<const GroupParams> groups,
                                          const MixingRule& mixing, const NetworkConfig& cfg) {
    mixing.validate();
    const int g_count = static_cast<int>(groups.size());
    if (mixing.groups != g_count) throw input_error("mixing rule size does not match groups");
    if (!(cfg.f >= 0.0 && cfg.f <= 1.0)) throw input_error("cluster fraction F must be in [0,1]");

    GroupContactMatrices m;
    m.groups = g_count;
    m.omega1.assign(static_cast<std::size_t>(g_count) * g_count, 0.0);
    m.omega2.assign(static_cast<std::size_t>(g_count) * g_count, 0.0);

    std::array<double, 3> c_l{};
    for (int l = 0; l < 3; ++l) {
        if (!(cfg.t_hours[l] > 0.0)) throw input_error("location opening hours must be positive");
        c_l[l] = 1.0 / (7.0 * 8.0 * cfg.t_hours[l]);
    }

    // Denominators of the allocation fractions, one per source group.
    auto denom = [&](int i, auto value) {
        double acc = 0.0;
        for (int k = 0; k < g_count; ++k) {
            if (mixing.allowed(i, k)) acc += value(groups[k]) * groups[k].population;
        }
        return acc;
    };

    std::array<double, 3> z_l{};
    for (int l = 0; l < 3; ++l) {
        for (int k = 0; k < g_count; ++k) {
            z_l[l] += groups[k].loc[l].p * groups[k].loc[l].n * groups[k].population;
        }
    }

    for (int i = 0; i < g_count; ++i) {
        const double v1_stub_i = groups[i].v1 * (1.0 - cfg.f);
        const double d1 = denom(i, [&](const GroupParams& g) { return g.v1 * (1.0 - cfg.f); });
        const double d2 = denom(i, [&](const GroupParams& g) { return g.v2; });
        if (v1_stub_i > 0.0 && d1 == 0.0) {
            throw input_error("grouped model: no allowed partners for L1 stubs of group " +
                              std::to_string(groups[i].id));
        }
        if (groups[i].v2 > 0.0 && d2 == 0.0) {
            throw input_error("grouped model: no allowed partners for L2 links of group " +
                              std::to_string(groups[i].id));
        }
        for (int j = 0; j < g_count; ++j) {
            double l1 = 0.0;
            if (v1_stub_i > 0.0 && mixing.allowed(i, j)) {
                l1 = v1_stub_i * groups[j].v1 * (1.0 - cfg.f) * groups[j].population / d1;
            }
            if (i == j) l1 += cfg.f * groups[i].v1; // within-cluster contacts
            double l2 = 0.0;
            if (groups[i].v2 > 0.0 && mixing.allowed(i, j) && d2 > 0.0) {
                l2 = groups[i].v2 * groups[j].v2 * groups[j].population / d2;
            }
            double l3 = 0.0;
            for (int l = 0; l < 3; ++l) {
                const auto& li = groups[i].loc[l];
                const auto& lj = groups[j].loc[l];
                const double pref = li.p * li.n * li.h;
                if (pref == 0.0) continue;
                if (z_l[l] == 0.0) {
                    throw input_error("grouped model: zero public-space normalizer");
                }
                l3 += pref * lj.p * lj.n * lj.h * groups[j].population * c_l[l] / z_l[l];
            }
            m.omega1[static_cast<std::size_t>(i) * g_count + j] = l1 + cfg.zeta1 * l2 + l3;
            m.omega2[static_cast<std::size_t>(i) * g_count + j] = l1 + cfg.zeta2 * l2;
        }
    }
    return m;
}

void GroupOperator::apply_infection(std::span<const double> x, std::span<double> y) const {
    const auto g = static_cast<std::size_t>(m_.groups);
    if (x.size() != g || y.size() != g) throw input_error("apply_infection: dimension mismatch");
    for (std::size_t i = 0; i < g; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < g; ++j) acc += m_.omega1[i * g + j] * x[j];
        y[i] = acc;
    }
}

void GroupOperator::apply_tracing(std::span<const double> x, std::span<double> y) const {
    const auto g = static_cast<std::size_t>(m_.groups);
    if (x.size() != g || y.size() != g) throw input_error("apply_tracing: dimension mismatch");
    for (std::size_t i = 0; i < g; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < g; ++j) acc += m_.omega2[i * g + j] * x[j];
        y[i] = acc;
    }
}

Trajectory grouped_integrate(const StateMatrix& initial, const GroupContactMatrices& matrices,
                             const ModelParams& params, const PhaseLayout& layout,
                             std::span<const double> output_times,
                             const IntegrationSettings& settings) {
    const GroupOperator op(matrices);
    return integrate(initial, op, params, layout, output_times, settings);
}

std::vector<double> detected_cumulative_grouped(const Trajectory& traj,
                                                std::span<const int> student_groups,
                                                std::span<const double> populations) {
    if (traj.states.empty()) return {};
    const std::size_t g = traj.states.front().nodes();
    std::vector<double> weight(g, 0.0);
    for (int s : student_groups) {
        if (s < 0 || static_cast<std::size_t>(s) >= g) {
            throw input_error("unknown group index in student set");
        }
        weight[s] = populations[s];
    }
    return detected_cumulative(traj, weight);
}

} // namespace saidr
