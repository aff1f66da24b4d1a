#pragma once

#include <functional>
#include <span>
#include <vector>

#include "saidr/meanfield.hpp"
#include "saidr/network.hpp"

namespace saidr {

// Dense materialization is limited to N*m <= kDenseGuard unknowns.
inline constexpr std::size_t kDenseGuard = 10000;

// Linearization of the dynamics around the disease-free state, split into the
// new-infection operator (network kron delta-block) and the block-diagonal
// within-node transitions (identity kron sigma-block). Block dimension is
// m = k_e + k_is + k_ia; node blocks are stacked in node order.
struct LinearizedSystem {
    std::size_t nodes = 0;
    int m = 0;
    bool dense = false;
    std::vector<double> delta; // row-major (nodes*m)^2 when dense
    std::vector<double> sigma;
    std::function<void(std::span<const double>, std::span<double>)> apply_delta;
    std::function<void(std::span<const double>, std::span<double>)> apply_sigma;
};

// The bracket of the threshold condition:
//   beta_is * p_is * (k_is/lambda_is) + beta_ia * p_ia * (k_ia/lambda_ia),
// i.e. transmission rates times branching probabilities times the mean
// infectious periods. Beta values are taken from the first schedule window.
double threshold_factor(const ModelParams& params, const PhaseLayout& layout);

// threshold_factor * spectral_radius(W_inf); the closed form of the spectral
// radius of the next-generation operator. The disease-free state is locally
// stable iff this is below 1.
double reproduction_number(const ModelParams& params, const PhaseLayout& layout,
                           const LayeredNetwork& net);

// Matrix-free application is always available; dense matrices are
// materialized when nodes*m <= kDenseGuard. The returned closures reference
// `net`, which must outlive the system.
LinearizedSystem build_linearized(const ModelParams& params, const PhaseLayout& layout,
                                  const ContactOperator& net);

// Dense m x m blocks (used by the dense path and exposed for verification).
std::vector<double> delta_block(const ModelParams& params, const PhaseLayout& layout);
std::vector<double> sigma_block(const ModelParams& params, const PhaseLayout& layout);
// Closed form of -sigma^{-1}: lower-triangular ones blocks scaled by the
// mean phase times and branching probabilities.
std::vector<double> minus_sigma_inverse_closed_form(const ModelParams& params,
                                                    const PhaseLayout& layout);

struct ThresholdReport {
    double closed_form = 0.0;    // threshold_factor * rho(W_inf)
    double numeric_rho = 0.0;    // rho(-Delta Sigma^{-1}) by dense computation
    double spectral_bound = 0.0; // max real part of eig(Delta + Sigma)
    bool consistent = false;
};

// Numerically checks the closed-form threshold on the largest connected
// component: the closed form must match the dense spectral radius to 1e-8
// and the sign of the spectral bound must match sign(numeric_rho - 1).
ThresholdReport verify_threshold(const ModelParams& params, const PhaseLayout& layout,
                                 const LayeredNetwork& net);

} // namespace saidr
