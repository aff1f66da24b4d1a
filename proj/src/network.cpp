#include "saidr/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "saidr/errors.hpp"
#include "saidr/kernels.hpp"

namespace saidr {

namespace {

std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

struct UnionFind {
    std::vector<std::uint32_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0u);
    }
    std::uint32_t find(std::uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(std::uint32_t a, std::uint32_t b) { parent[find(a)] = find(b); }
};

// Random stub pairing under the mixing rule, rejecting self-loops, repeated
// edges and edges in `forbidden`. Invalid pairs are repaired by random
// partner swaps (cap 100*N per shuffle). Stubs can only pair inside their
// mixing component, so parity is fixed there: every component with an odd
// stub count drops one uniformly chosen stub.
std::vector<Edge> wire_stubs(const std::vector<int>& node_group, const MixingRule& mixing,
                             std::vector<std::uint32_t> stubs,
                             const std::unordered_set<std::uint64_t>& forbidden, Rng& rng) {
    std::vector<Edge> edges;
    if (stubs.empty()) return edges;
    {
        UnionFind comp(mixing.groups);
        for (int i = 0; i < mixing.groups; ++i) {
            for (int j = i + 1; j < mixing.groups; ++j) {
                if (mixing.allowed(i, j)) comp.unite(i, j);
            }
        }
        std::unordered_map<std::uint32_t, std::uint64_t> odd_stubs;
        for (std::uint32_t s : stubs) {
            ++odd_stubs[comp.find(node_group[s])];
        }
        for (auto& [root, count] : odd_stubs) {
            if (count % 2 == 0) continue;
            // Reservoir-pick one stub of this component uniformly.
            std::uint64_t seen = 0;
            std::size_t pick = 0;
            for (std::size_t i = 0; i < stubs.size(); ++i) {
                if (comp.find(node_group[stubs[i]]) != root) continue;
                ++seen;
                if (rng.integer(seen) == 0) pick = i;
            }
            stubs[pick] = stubs.back();
            stubs.pop_back();
        }
    }
    if (stubs.size() < 2) return edges;
    const std::size_t n_pairs = stubs.size() / 2;
    const long long budget0 = 100LL * static_cast<long long>(node_group.size());
    constexpr int kMaxRestarts = 60;

    std::vector<Edge> pairs(n_pairs);
    std::unordered_map<std::uint64_t, int> mult;

    auto pair_ok = [&](std::uint32_t u, std::uint32_t v, int max_mult) {
        if (u == v) return false;
        if (!mixing.allowed(node_group[u], node_group[v])) return false;
        const std::uint64_t k = edge_key(u, v);
        if (forbidden.count(k)) return false;
        auto it = mult.find(k);
        return (it == mult.end() ? 0 : it->second) <= max_mult;
    };

    for (int attempt = 0; attempt < kMaxRestarts; ++attempt) {
        rng.shuffle(stubs);
        mult.clear();
        std::vector<std::size_t> invalid;
        for (std::size_t i = 0; i < n_pairs; ++i) {
            pairs[i] = {stubs[2 * i], stubs[2 * i + 1]};
            ++mult[edge_key(pairs[i].first, pairs[i].second)];
        }
        auto is_valid = [&](std::size_t i) {
            const auto [u, v] = pairs[i];
            if (u == v) return false;
            if (!mixing.allowed(node_group[u], node_group[v])) return false;
            const std::uint64_t k = edge_key(u, v);
            return !forbidden.count(k) && mult[k] == 1;
        };
        for (std::size_t i = 0; i < n_pairs; ++i) {
            if (!is_valid(i)) invalid.push_back(i);
        }

        long long budget = budget0;
        while (!invalid.empty() && budget > 0) {
            const std::size_t p = invalid.back();
            if (is_valid(p)) {
                invalid.pop_back();
                continue;
            }
            --budget;
            const std::size_t q = rng.integer(n_pairs);
            if (q == p) continue;
            const auto [a, b] = pairs[p];
            auto [c, d] = pairs[q];
            // Propose (a,b),(c,d) -> (a,d),(c,b); both partner orientations
            // of q must be reachable or opposite-facing invalid pairs jam.
            if (rng.bernoulli(0.5)) std::swap(c, d);
            --mult[edge_key(a, b)];
            --mult[edge_key(c, d)];
            const bool ok = pair_ok(a, d, 0) && pair_ok(c, b, 0) &&
                            edge_key(a, d) != edge_key(c, b);
            if (ok) {
                pairs[p] = {a, d};
                pairs[q] = {c, b};
                ++mult[edge_key(a, d)];
                ++mult[edge_key(c, b)];
                invalid.pop_back();
                if (!is_valid(q)) invalid.push_back(q);
            } else {
                ++mult[edge_key(a, b)];
                ++mult[edge_key(c, d)];
            }
        }

        bool all_ok = true;
        for (std::size_t i = 0; i < n_pairs && all_ok; ++i) all_ok = is_valid(i);
        if (all_ok) {
            edges.assign(pairs.begin(), pairs.end());
            return edges;
        }
    }
    throw input_error("configuration model: stub pairing failed after retry budget");
}

std::vector<std::uint32_t> draw_stubs(std::span<const GroupParams> groups,
                                      const std::vector<int>& node_group,
                                      const std::function<double(const GroupParams&)>& target,
                                      Rng& rng) {
    std::vector<std::uint32_t> stubs;
    for (std::uint32_t i = 0; i < node_group.size(); ++i) {
        const double t = target(groups[node_group[i]]);
        if (t < 0.0) throw input_error("negative target degree");
        const double base = std::floor(t);
        int s = static_cast<int>(base);
        if (rng.bernoulli(t - base)) ++s;
        for (int j = 0; j < s; ++j) stubs.push_back(i);
    }
    return stubs;
}

void validate_groups(std::span<const GroupParams> groups) {
    if (groups.empty()) throw input_error("no groups given");
    for (const auto& g : groups) {
        if (g.population < 0) throw input_error("group population must be nonnegative");
        if (g.v1 < 0 || g.v2 < 0) throw input_error("contact counts must be nonnegative");
        for (const auto& l : g.loc) {
            if (l.p < 0 || l.p > 1) throw input_error("visit proportion must be in [0,1]");
            if (l.h < 0 || l.n < 0) throw input_error("location parameters must be nonnegative");
        }
    }
}

} // namespace

void MixingRule::validate() const {
    if (allow.size() != static_cast<std::size_t>(groups) * groups) {
        throw input_error("mixing rule: matrix size does not match group count");
    }
    for (int i = 0; i < groups; ++i) {
        for (int j = 0; j < groups; ++j) {
            const auto v = allow[static_cast<std::size_t>(i) * groups + j];
            if (v > 1) throw input_error("mixing rule: entries must be 0 or 1");
            if (v != allow[static_cast<std::size_t>(j) * groups + i]) {
                throw input_error("mixing rule: matrix must be symmetric");
            }
        }
    }
}

MixingRule MixingRule::full(int groups) {
    MixingRule m;
    m.groups = groups;
    m.allow.assign(static_cast<std::size_t>(groups) * groups, 1);
    return m;
}

MixingRule MixingRule::blocks(int groups, const std::vector<std::vector<int>>& blocks) {
    MixingRule m;
    m.groups = groups;
    m.allow.assign(static_cast<std::size_t>(groups) * groups, 0);
    for (const auto& blk : blocks) {
        for (int i : blk) {
            for (int j : blk) {
                if (i < 0 || i >= groups || j < 0 || j >= groups) {
                    throw input_error("mixing rule: block index out of range");
                }
                m.allow[static_cast<std::size_t>(i) * groups + j] = 1;
            }
        }
    }
    return m;
}

void Csr::accumulate(std::span<const double> x, std::span<double> y, double scale) const {
    if (neighbors.empty()) return;
    const std::size_t n = nodes();
    if (weights.empty()) {
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::uint32_t k = offsets[i]; k < offsets[i + 1]; ++k) acc += x[neighbors[k]];
            y[i] += scale * acc;
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::uint32_t k = offsets[i]; k < offsets[i + 1]; ++k) {
                acc += weights[k] * x[neighbors[k]];
            }
            y[i] += scale * acc;
        }
    }
}

Csr Csr::from_edges(std::size_t n, std::span<const Edge> edges) {
    Csr csr;
    csr.offsets.assign(n + 1, 0);
    for (const auto& [u, v] : edges) {
        ++csr.offsets[u + 1];
        ++csr.offsets[v + 1];
    }
    for (std::size_t i = 0; i < n; ++i) csr.offsets[i + 1] += csr.offsets[i];
    csr.neighbors.resize(2 * edges.size());
    std::vector<std::uint32_t> cursor(csr.offsets.begin(), csr.offsets.end() - 1);
    for (const auto& [u, v] : edges) {
        csr.neighbors[cursor[u]++] = v;
        csr.neighbors[cursor[v]++] = u;
    }
    return csr;
}

Csr Csr::from_weighted_edges(std::size_t n, std::span<const Edge> edges,
                             std::span<const double> w) {
    Csr csr = from_edges(n, edges);
    csr.weights.resize(csr.neighbors.size());
    std::vector<std::uint32_t> cursor(csr.offsets.begin(), csr.offsets.end() - 1);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto [u, v] = edges[e];
        csr.weights[cursor[u]++] = w[e];
        csr.weights[cursor[v]++] = w[e];
    }
    return csr;
}

bool L3Factors::active() const {
    for (double v : coeff) {
        if (v != 0.0) return true;
    }
    return false;
}

double L3Factors::weight(std::size_t i, std::size_t j) const {
    if (i == j) return 0.0;
    double w = 0.0;
    for (int l = 0; l < 3; ++l) {
        if (coeff[l] != 0.0) w += coeff[l] * b[l][i] * b[l][j];
    }
    return w;
}

void L3Factors::accumulate(std::span<const double> x, std::span<double> y) const {
    if (!active()) return;
    for (int l = 0; l < 3; ++l) {
        if (coeff[l] == 0.0) continue;
        const double s = kernels::dot(b[l], x);
        kernels::axpy(coeff[l] * s, b[l], y);
    }
    kernels::mul_sub(diag, x, y); // remove the rank-1 self-terms
}

void LayeredNetwork::apply_infection(std::span<const double> x, std::span<double> y) const {
    if (x.size() != size() || y.size() != size()) {
        throw input_error("apply_infection: dimension mismatch");
    }
    std::fill(y.begin(), y.end(), 0.0);
    l1.accumulate(x, y, 1.0);
    l2.accumulate(x, y, zeta1);
    l3.accumulate(x, y);
    explicit_inf.accumulate(x, y, 1.0);
}

void LayeredNetwork::apply_tracing(std::span<const double> x, std::span<double> y) const {
    if (x.size() != size() || y.size() != size()) {
        throw input_error("apply_tracing: dimension mismatch");
    }
    std::fill(y.begin(), y.end(), 0.0);
    l1.accumulate(x, y, 1.0);
    l2.accumulate(x, y, zeta2);
    explicit_tr.accumulate(x, y, 1.0);
}

void LayeredNetwork::finalize() {
    const std::size_t n = node_group.size();
    l1 = Csr::from_edges(n, l1_edges);
    l2 = Csr::from_edges(n, l2_edges);
    if (l3.diag.empty()) l3.diag.assign(n, 0.0);
    if (explicit_inf.offsets.empty()) explicit_inf.offsets.assign(n + 1, 0);
    if (explicit_tr.offsets.empty()) explicit_tr.offsets.assign(n + 1, 0);
}

std::vector<std::uint32_t> LayeredNetwork::largest_component() const {
    const std::size_t n = size();
    if (n == 0) return {};
    UnionFind uf(n);
    for (const auto& [u, v] : l1_edges) uf.unite(u, v);
    for (const auto& [u, v] : l2_edges) uf.unite(u, v);
    const auto unite_csr = [&](const Csr& csr) {
        for (std::size_t i = 0; i < csr.nodes(); ++i) {
            for (std::uint32_t k = csr.offsets[i]; k < csr.offsets[i + 1]; ++k) {
                uf.unite(static_cast<std::uint32_t>(i), csr.neighbors[k]);
            }
        }
    };
    unite_csr(explicit_inf);
    unite_csr(explicit_tr);
    for (int l = 0; l < 3; ++l) {
        if (l3.coeff[l] == 0.0) continue;
        std::uint32_t first = n;
        for (std::uint32_t i = 0; i < n; ++i) {
            if (l3.b[l][i] > 0.0) {
                if (first == n) {
                    first = i;
                } else {
                    uf.unite(first, i);
                }
            }
        }
    }
    std::unordered_map<std::uint32_t, std::uint32_t> count;
    for (std::uint32_t i = 0; i < n; ++i) ++count[uf.find(i)];
    std::uint32_t best_root = 0, best = 0;
    for (const auto& [root, c] : count) {
        if (c > best || (c == best && root < best_root)) {
            best = c;
            best_root = root;
        }
    }
    std::vector<std::uint32_t> comp;
    comp.reserve(best);
    for (std::uint32_t i = 0; i < n; ++i) {
        if (uf.find(i) == best_root) comp.push_back(i);
    }
    return comp;
}

DenseOperator::DenseOperator(std::size_t n, std::vector<double> w_inf, std::vector<double> w_tr)
    : n_(n), w_inf_(std::move(w_inf)), w_tr_(std::move(w_tr)) {
    if (w_inf_.size() != n * n || w_tr_.size() != n * n) {
        throw input_error("DenseOperator: matrix size mismatch");
    }
}

void DenseOperator::apply_infection(std::span<const double> x, std::span<double> y) const {
    if (x.size() != n_ || y.size() != n_) throw input_error("apply_infection: dimension mismatch");
    for (std::size_t i = 0; i < n_; ++i) {
        y[i] = kernels::dot({w_inf_.data() + i * n_, n_}, x);
    }
}

void DenseOperator::apply_tracing(std::span<const double> x, std::span<double> y) const {
    if (x.size() != n_ || y.size() != n_) throw input_error("apply_tracing: dimension mismatch");
    for (std::size_t i = 0; i < n_; ++i) {
        y[i] = kernels::dot({w_tr_.data() + i * n_, n_}, x);
    }
}

std::vector<int> assign_node_groups(std::span<const GroupParams> groups) {
    std::vector<int> node_group;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        for (std::int64_t i = 0; i < groups[g].population; ++i) {
            node_group.push_back(static_cast<int>(g));
        }
    }
    return node_group;
}

std::vector<Edge> build_layer1(std::span<const GroupParams> groups, const MixingRule& mixing,
                               double f, Rng& rng) {
    validate_groups(groups);
    mixing.validate();
    if (!(f >= 0.0 && f <= 1.0)) throw input_error("cluster fraction F must be in [0,1]");
    const std::vector<int> node_group = assign_node_groups(groups);

    std::vector<Edge> edges;
    std::unordered_set<std::uint64_t> cluster_keys;
    std::uint32_t base = 0;
    for (const auto& g : groups) {
        const auto ng = static_cast<std::uint32_t>(g.population);
        auto csize = static_cast<std::uint32_t>(std::llround(f * g.v1)) + 1;
        if (csize > 1) {
            for (std::uint32_t start = 0; start < ng; start += csize) {
                const std::uint32_t end = std::min(start + csize, ng);
                for (std::uint32_t i = start; i < end; ++i) {
                    for (std::uint32_t j = i + 1; j < end; ++j) {
                        edges.emplace_back(base + i, base + j);
                        cluster_keys.insert(edge_key(base + i, base + j));
                    }
                }
            }
        }
        base += ng;
    }

    auto stubs = draw_stubs(groups, node_group,
                            [f](const GroupParams& g) { return (1.0 - f) * g.v1; }, rng);
    auto random_edges = wire_stubs(node_group, mixing, std::move(stubs), cluster_keys, rng);
    edges.insert(edges.end(), random_edges.begin(), random_edges.end());
    return edges;
}

std::vector<Edge> build_layer2(std::span<const GroupParams> groups, const MixingRule& mixing,
                               Rng& rng) {
    validate_groups(groups);
    mixing.validate();
    const std::vector<int> node_group = assign_node_groups(groups);
    auto stubs =
        draw_stubs(groups, node_group, [](const GroupParams& g) { return g.v2; }, rng);
    return wire_stubs(node_group, mixing, std::move(stubs), {}, rng);
}

L3Factors build_layer3(std::span<const GroupParams> groups,
                       const std::array<double, 3>& t_hours) {
    validate_groups(groups);
    const std::vector<int> node_group = assign_node_groups(groups);
    const std::size_t n = node_group.size();

    L3Factors f;
    f.diag.assign(n, 0.0);
    for (int l = 0; l < 3; ++l) {
        if (!(t_hours[l] > 0.0)) throw input_error("location opening hours must be positive");
        f.c[l] = 1.0 / (7.0 * 8.0 * t_hours[l]);
        f.b[l].resize(n);
        double z = 0.0;
        bool any_b = false;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& loc = groups[node_group[i]].loc[l];
            const double pn = loc.p * loc.n;
            f.b[l][i] = pn * loc.h;
            if (f.b[l][i] != 0.0) any_b = true;
            z += pn;
        }
        f.z[l] = z;
        if (z == 0.0) {
            if (any_b) throw input_error("public-space layer: zero normalizer with active nodes");
            f.coeff[l] = 0.0;
        } else {
            f.coeff[l] = any_b ? f.c[l] / z : 0.0;
        }
    }
    for (int l = 0; l < 3; ++l) {
        if (f.coeff[l] == 0.0) continue;
        for (std::size_t i = 0; i < n; ++i) f.diag[i] += f.coeff[l] * f.b[l][i] * f.b[l][i];
    }
    return f;
}

LayeredNetwork build_network(std::span<const GroupParams> groups, const MixingRule& mixing,
                             const NetworkConfig& cfg, Rng& rng) {
    LayeredNetwork net;
    net.node_group = assign_node_groups(groups);
    net.l1_edges = build_layer1(groups, mixing, cfg.f, rng);
    net.l2_edges = build_layer2(groups, mixing, rng);
    net.l3 = build_layer3(groups, cfg.t_hours);
    net.zeta1 = cfg.zeta1;
    net.zeta2 = cfg.zeta2;
    net.finalize();
    return net;
}

LayeredNetwork load_edge_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open edge list: " + path);

    std::vector<Edge> edges;
    std::vector<double> w_inf, w_tr;
    std::unordered_set<std::uint64_t> seen;
    std::uint32_t max_id = 0;
    bool any = false;

    std::string line;
    for (long long line_no = 1; std::getline(in, line); ++line_no) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        long long u, v;
        double wi, wt;
        if (!(ls >> u)) continue; // blank line
        const std::string at = " at line " + std::to_string(line_no);
        if (!(ls >> v >> wi)) throw input_error("edge list: expected 'u v weight_inf'" + at);
        if (!(ls >> wt)) wt = wi;
        std::string extra;
        if (ls >> extra) throw input_error("edge list: trailing tokens" + at);
        if (u < 0 || v < 0) throw input_error("edge list: negative node id" + at);
        if (u == v) throw input_error("edge list: self-loop" + at);
        if (wi < 0 || wt < 0) throw input_error("edge list: negative weight" + at);
        const auto uu = static_cast<std::uint32_t>(u);
        const auto vv = static_cast<std::uint32_t>(v);
        if (!seen.insert(edge_key(uu, vv)).second) {
            throw input_error("edge list: duplicate edge" + at);
        }
        edges.emplace_back(uu, vv);
        w_inf.push_back(wi);
        w_tr.push_back(wt);
        max_id = std::max({max_id, uu, vv});
        any = true;
    }

    LayeredNetwork net;
    const std::size_t n = any ? max_id + 1 : 0;
    net.node_group.assign(n, 0);
    net.explicit_inf = Csr::from_weighted_edges(n, edges, w_inf);
    net.explicit_tr = Csr::from_weighted_edges(n, edges, w_tr);
    net.finalize();
    return net;
}

PowerIterationResult power_iteration(
    std::size_t n, const std::function<void(std::span<const double>, std::span<double>)>& apply,
    double rtol, int max_iter) {
    if (n == 0) return {};
    std::vector<double> x(n, 0.0), z(n, 0.0), w(n, 0.0);

    // Row-sum bound for the shift; also detects the zero operator.
    std::fill(x.begin(), x.end(), 1.0);
    apply(x, z);
    double bound = 0.0;
    for (double v : z) bound = std::max(bound, v);
    if (bound <= 0.0) return {};
    // A positive shift separates the Perron root from a possible -rho
    // eigenvalue of bipartite structures.
    const double shift = 0.05 * bound;

    const double inv = 1.0 / std::sqrt(static_cast<double>(n));
    std::fill(x.begin(), x.end(), inv);
    for (int it = 1; it <= max_iter; ++it) {
        apply(x, z);
        kernels::axpy(shift, x, z);
        const double lam = kernels::dot(x, z);
        std::copy(z.begin(), z.end(), w.begin());
        kernels::axpy(-lam, x, w);
        const double res = std::sqrt(kernels::dot(w, w));
        const double norm = std::sqrt(kernels::dot(z, z));
        if (norm == 0.0) return {0.0, 0.0, it};
        kernels::scale(1.0 / norm, z, x);
        if (res <= rtol * std::max(1.0, lam)) {
            return {lam - shift, res, it};
        }
    }
    std::ostringstream msg;
    msg << "power iteration did not converge after " << max_iter << " iterations";
    apply(x, z);
    kernels::axpy(shift, x, z);
    const double lam = kernels::dot(x, z);
    std::copy(z.begin(), z.end(), w.begin());
    kernels::axpy(-lam, x, w);
    msg << " (residual " << std::sqrt(kernels::dot(w, w)) << ")";
    throw numerical_error(msg.str());
}

double spectral_radius(const LayeredNetwork& net, double rtol, int max_iter) {
    const std::size_t n = net.size();
    if (n == 0) return 0.0;
    const auto comp = net.largest_component();
    std::vector<std::uint8_t> in_comp(n, 0);
    for (auto i : comp) in_comp[i] = 1;

    // Vectors supported on a component stay on it, so the full-size operator
    // can be iterated from a component-restricted start.
    std::vector<double> start(n, 0.0);
    const double inv = 1.0 / std::sqrt(static_cast<double>(comp.size()));
    for (auto i : comp) start[i] = inv;

    std::vector<double> x(n, 0.0), z(n, 0.0), w(n, 0.0);
    x = start;
    // Row-sum bound over the component.
    {
        std::vector<double> ones(n, 0.0);
        for (auto i : comp) ones[i] = 1.0;
        net.apply_infection(ones, z);
    }
    double bound = 0.0;
    for (auto i : comp) bound = std::max(bound, z[i]);
    if (bound <= 0.0) return 0.0;
    const double shift = 0.05 * bound;

    for (int it = 1; it <= max_iter; ++it) {
        net.apply_infection(x, z);
        kernels::axpy(shift, x, z);
        const double lam = kernels::dot(x, z);
        std::copy(z.begin(), z.end(), w.begin());
        kernels::axpy(-lam, x, w);
        const double res = std::sqrt(kernels::dot(w, w));
        const double norm = std::sqrt(kernels::dot(z, z));
        if (norm == 0.0) return 0.0;
        kernels::scale(1.0 / norm, z, x);
        if (res <= rtol * std::max(1.0, lam)) return lam - shift;
    }
    throw numerical_error("spectral_radius: power iteration did not converge");
}

std::vector<double> materialize(const ContactOperator& op, bool infection) {
    const std::size_t n = op.size();
    std::vector<double> dense(n * n, 0.0);
    std::vector<double> e(n, 0.0), col(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        if (infection) {
            op.apply_infection(e, col);
        } else {
            op.apply_tracing(e, col);
        }
        for (std::size_t i = 0; i < n; ++i) dense[i * n + j] = col[i];
        e[j] = 0.0;
    }
    return dense;
}

} // namespace saidr
