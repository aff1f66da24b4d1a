#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "saidr/rng.hpp"

namespace saidr {

// Per-location visiting behaviour of a survey group: proportion of the group
// visiting the location type, mean weekly hours spent there, mean people
// encountered.
struct LocationParams {
    double p = 0.0;
    double h = 0.0;
    double n = 0.0;
};

struct GroupParams {
    int id = 0; // 1-based
    std::int64_t population = 0;
    double v1 = 0.0; // mean close contacts
    double v2 = 0.0; // mean sub-4-hour contacts
    std::array<LocationParams, 3> loc{};
};

// Symmetric 0/1 matrix saying which group pairs may share L1/L2 links.
struct MixingRule {
    int groups = 0;
    std::vector<std::uint8_t> allow; // groups*groups, row-major

    bool allowed(int i, int j) const { return allow[static_cast<std::size_t>(i) * groups + j] != 0; }
    void validate() const; // symmetry, 0/1 entries

    static MixingRule full(int groups);
    // Groups inside one block connect freely; cross-block links are forbidden.
    static MixingRule blocks(int groups, const std::vector<std::vector<int>>& blocks);
};

using Edge = std::pair<std::uint32_t, std::uint32_t>;

// Contact structure as seen by the dynamics: a pair of symmetric nonnegative
// weight operators for infection and tracing pressure.
class ContactOperator {
public:
    virtual ~ContactOperator() = default;
    virtual std::size_t size() const = 0;
    // y = W_inf * x
    virtual void apply_infection(std::span<const double> x, std::span<double> y) const = 0;
    // y = W_tr * x
    virtual void apply_tracing(std::span<const double> x, std::span<double> y) const = 0;
};

// Symmetric adjacency in CSR form; empty `weights` means unit weights.
struct Csr {
    std::vector<std::uint32_t> offsets; // size nodes+1
    std::vector<std::uint32_t> neighbors;
    std::vector<double> weights;

    std::size_t nodes() const { return offsets.empty() ? 0 : offsets.size() - 1; }
    bool empty() const { return neighbors.empty(); }
    // y += scale * A x
    void accumulate(std::span<const double> x, std::span<double> y, double scale) const;

    static Csr from_edges(std::size_t n, std::span<const Edge> edges);
    static Csr from_weighted_edges(std::size_t n, std::span<const Edge> edges,
                                   std::span<const double> w);
};

// Rank-1-per-location factors of the public-space layer. The implied weight
// between distinct nodes i, j is sum_l coeff[l] * b[l][i] * b[l][j]; the
// diagonal of the rank-1 product is subtracted on application so no node is
// its own contact.
struct L3Factors {
    std::array<std::vector<double>, 3> b{}; // b_l(i) = P_l n_l H_l of node i's group
    std::array<double, 3> c{};              // C_l = 1/(56 T_l)
    std::array<double, 3> z{};              // Z_l = sum_i P_l n_l
    std::array<double, 3> coeff{};          // C_l / Z_l (0 when layer inactive)
    std::vector<double> diag;               // sum_l coeff[l] * b[l][i]^2

    bool active() const;
    double weight(std::size_t i, std::size_t j) const;
    // y += sum_l coeff[l] * (b_l . x) b_l - diag .* x
    void accumulate(std::span<const double> x, std::span<double> y) const;
};

class LayeredNetwork final : public ContactOperator {
public:
    std::vector<int> node_group; // node -> 0-based group index
    std::vector<Edge> l1_edges;
    std::vector<Edge> l2_edges;
    Csr l1, l2;          // built from the edge lists by finalize()
    L3Factors l3;
    Csr explicit_inf, explicit_tr; // populated by load_edge_list networks
    double zeta1 = 4.0 / 56.0;     // L2 infection weight relative to L1
    double zeta2 = 0.18 / 1.5;     // L2 tracing weight relative to L1

    std::size_t size() const override { return node_group.size(); }
    void apply_infection(std::span<const double> x, std::span<double> y) const override;
    void apply_tracing(std::span<const double> x, std::span<double> y) const override;

    void finalize(); // build CSR adjacency from the edge lists
    // Nodes of the largest connected component of the union of all layers.
    std::vector<std::uint32_t> largest_component() const;
};

// Explicit dense weight matrices; used for small systems and test oracles.
class DenseOperator final : public ContactOperator {
public:
    DenseOperator(std::size_t n, std::vector<double> w_inf, std::vector<double> w_tr);
    std::size_t size() const override { return n_; }
    void apply_infection(std::span<const double> x, std::span<double> y) const override;
    void apply_tracing(std::span<const double> x, std::span<double> y) const override;
    double inf(std::size_t i, std::size_t j) const { return w_inf_[i * n_ + j]; }

private:
    std::size_t n_;
    std::vector<double> w_inf_, w_tr_;
};

// Contiguous node index ranges per group, in group order.
std::vector<int> assign_node_groups(std::span<const GroupParams> groups);

// Close-contact layer: per group, fully connected clusters of
// round(F*V1)+1 nodes (so every member has about F*V1 in-cluster contacts),
// plus (1-F)*V1 configuration-model stubs per node restricted by the mixing
// rule.
std::vector<Edge> build_layer1(std::span<const GroupParams> groups, const MixingRule& mixing,
                               double f, Rng& rng);

// Casual-contact layer: plain configuration model with mean degree V2.
std::vector<Edge> build_layer2(std::span<const GroupParams> groups, const MixingRule& mixing,
                               Rng& rng);

// Public-space layer factors; t_hours are the weekly opening hours of the
// three location types.
L3Factors build_layer3(std::span<const GroupParams> groups,
                       const std::array<double, 3>& t_hours);

struct NetworkConfig {
    double f = 0.3;
    double zeta1 = 4.0 / 56.0;
    double zeta2 = 0.18 / 1.5;
    std::array<double, 3> t_hours = {35.0, 70.0, 15.0};
};

LayeredNetwork build_network(std::span<const GroupParams> groups, const MixingRule& mixing,
                             const NetworkConfig& cfg, Rng& rng);

// Single-layer network from a whitespace-separated file of
// "u v weight_inf [weight_tr]" rows with 0-based node ids. A missing
// weight_tr column defaults to weight_inf.
LayeredNetwork load_edge_list(const std::string& path);

struct PowerIterationResult {
    double value = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

// Largest eigenvalue of a symmetric nonnegative operator by shifted power
// iteration with Rayleigh-quotient estimates. Throws numerical_error with
// the residual when the iteration cap is hit.
PowerIterationResult power_iteration(
    std::size_t n, const std::function<void(std::span<const double>, std::span<double>)>& apply,
    double rtol = 1e-10, int max_iter = 200000);

// Spectral radius of W_inf restricted to the largest connected component.
double spectral_radius(const LayeredNetwork& net, double rtol = 1e-10, int max_iter = 200000);

// Dense row-major matrix of an operator obtained by probing unit vectors;
// intended for small n (tests and dense verification paths).
std::vector<double> materialize(const ContactOperator& op, bool infection);

} // namespace saidr
