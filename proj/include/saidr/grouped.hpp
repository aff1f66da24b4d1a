#pragma once

#include <span>
#include <vector>

#include "saidr/meanfield.hpp"
#include "saidr/network.hpp"

namespace saidr {

// Group-level aggregated contact coefficients: omega1[i][j] is the
// contribution of group j to the infection rate of a node in group i
// (L1 random stubs + within-cluster term + L2 + public spaces); omega2 is
// the tracing analogue and has no public-space term.
struct GroupContactMatrices {
    int groups = 0;
    std::vector<double> omega1, omega2; // row-major G x G

    double o1(int i, int j) const { return omega1[static_cast<std::size_t>(i) * groups + j]; }
    double o2(int i, int j) const { return omega2[static_cast<std::size_t>(i) * groups + j]; }
};

GroupContactMatrices build_group_matrices(std::span<const GroupParams> groups,
                                          const MixingRule& mixing, const NetworkConfig& cfg);

// The grouped model as a contact operator over G "nodes".
class GroupOperator final : public ContactOperator {
public:
    explicit GroupOperator(GroupContactMatrices m) : m_(std::move(m)) {}
    std::size_t size() const override { return static_cast<std::size_t>(m_.groups); }
    void apply_infection(std::span<const double> x, std::span<double> y) const override;
    void apply_tracing(std::span<const double> x, std::span<double> y) const override;
    const GroupContactMatrices& matrices() const { return m_; }

private:
    GroupContactMatrices m_;
};

// Same dynamics as the network model with group-resolution states.
Trajectory grouped_integrate(const StateMatrix& initial, const GroupContactMatrices& matrices,
                             const ModelParams& params, const PhaseLayout& layout,
                             std::span<const double> output_times,
                             const IntegrationSettings& settings = {});

// Detected-or-traced student count: sum over the listed groups of
// population * (D + C + RC + RD) probability mass.
std::vector<double> detected_cumulative_grouped(const Trajectory& traj,
                                                std::span<const int> student_groups,
                                                std::span<const double> populations);

} // namespace saidr
