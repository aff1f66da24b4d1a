#include "saidr/threshold.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "saidr/errors.hpp"

namespace saidr {

double threshold_factor(const ModelParams& params, const PhaseLayout& layout) {
    params.validate();
    layout.validate();
    const double beta_is = params.beta_is_at(0.0);
    const double beta_ia = params.beta_ia_at(0.0);
    return beta_is * params.p_is() * (layout.k_is / params.lambda_is) +
           beta_ia * params.p_ia * (layout.k_ia / params.lambda_ia);
}

double reproduction_number(const ModelParams& params, const PhaseLayout& layout,
                           const LayeredNetwork& net) {
    return threshold_factor(params, layout) * spectral_radius(net);
}

std::vector<double> delta_block(const ModelParams& params, const PhaseLayout& layout) {
    const int m = layout.k_e + layout.k_is + layout.k_ia;
    std::vector<double> d(static_cast<std::size_t>(m) * m, 0.0);
    const double beta_is = params.beta_is_at(0.0);
    const double beta_ia = params.beta_ia_at(0.0);
    for (int j = 0; j < layout.k_is; ++j) d[layout.k_e + j] = beta_is;
    for (int j = 0; j < layout.k_ia; ++j) d[layout.k_e + layout.k_is + j] = beta_ia;
    return d;
}

std::vector<double> sigma_block(const ModelParams& params, const PhaseLayout& layout) {
    const int m = layout.k_e + layout.k_is + layout.k_ia;
    std::vector<double> s(static_cast<std::size_t>(m) * m, 0.0);
    auto at = [&](int r, int c) -> double& { return s[static_cast<std::size_t>(r) * m + c]; };
    const int oe = 0, ois = layout.k_e, oia = layout.k_e + layout.k_is;
    for (int j = 0; j < layout.k_e; ++j) {
        at(oe + j, oe + j) = -params.lambda_e;
        if (j > 0) at(oe + j, oe + j - 1) = params.lambda_e;
    }
    at(ois, oe + layout.k_e - 1) = params.p_is() * params.lambda_e;
    for (int j = 0; j < layout.k_is; ++j) {
        at(ois + j, ois + j) = -params.lambda_is;
        if (j > 0) at(ois + j, ois + j - 1) = params.lambda_is;
    }
    at(oia, oe + layout.k_e - 1) = params.p_ia * params.lambda_e;
    for (int j = 0; j < layout.k_ia; ++j) {
        at(oia + j, oia + j) = -params.lambda_ia;
        if (j > 0) at(oia + j, oia + j - 1) = params.lambda_ia;
    }
    return s;
}

std::vector<double> minus_sigma_inverse_closed_form(const ModelParams& params,
                                                    const PhaseLayout& layout) {
    const int m = layout.k_e + layout.k_is + layout.k_ia;
    std::vector<double> s(static_cast<std::size_t>(m) * m, 0.0);
    auto at = [&](int r, int c) -> double& { return s[static_cast<std::size_t>(r) * m + c]; };
    const int oe = 0, ois = layout.k_e, oia = layout.k_e + layout.k_is;
    // Lower-triangular ones blocks on the diagonal, scaled by mean phase
    // times; all-ones blocks scaled by the branch probability times the mean
    // stage time below the E block.
    for (int r = 0; r < layout.k_e; ++r) {
        for (int c = 0; c <= r; ++c) at(oe + r, oe + c) = 1.0 / params.lambda_e;
    }
    for (int r = 0; r < layout.k_is; ++r) {
        for (int c = 0; c < layout.k_e; ++c) at(ois + r, oe + c) = params.p_is() / params.lambda_is;
        for (int c = 0; c <= r; ++c) at(ois + r, ois + c) = 1.0 / params.lambda_is;
    }
    for (int r = 0; r < layout.k_ia; ++r) {
        for (int c = 0; c < layout.k_e; ++c) at(oia + r, oe + c) = params.p_ia / params.lambda_ia;
        for (int c = 0; c <= r; ++c) at(oia + r, oia + c) = 1.0 / params.lambda_ia;
    }
    return s;
}

LinearizedSystem build_linearized(const ModelParams& params, const PhaseLayout& layout,
                                  const ContactOperator& net) {
    params.validate();
    layout.validate();
    LinearizedSystem sys;
    sys.nodes = net.size();
    sys.m = layout.k_e + layout.k_is + layout.k_ia;
    const std::size_t dim = sys.nodes * static_cast<std::size_t>(sys.m);

    const int k_e = layout.k_e, k_is = layout.k_is, k_ia = layout.k_ia;
    const int m = sys.m;
    const double beta_is = params.beta_is_at(0.0);
    const double beta_ia = params.beta_ia_at(0.0);
    const ContactOperator* netp = &net;

    sys.apply_delta = [=](std::span<const double> x, std::span<double> y) {
        const std::size_t n = netp->size();
        std::vector<double> phi(n, 0.0), w(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double* xi = x.data() + i * m;
            double acc = 0.0;
            for (int j = 0; j < k_is; ++j) acc += beta_is * xi[k_e + j];
            for (int j = 0; j < k_ia; ++j) acc += beta_ia * xi[k_e + k_is + j];
            phi[i] = acc;
        }
        netp->apply_infection(phi, w);
        std::fill(y.begin(), y.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) y[i * m] = w[i];
    };

    const double lam_e = params.lambda_e, lam_is = params.lambda_is, lam_ia = params.lambda_ia;
    const double p_is = params.p_is(), p_ia = params.p_ia;
    sys.apply_sigma = [=, n = sys.nodes](std::span<const double> x, std::span<double> y) {
        for (std::size_t i = 0; i < n; ++i) {
            const double* xi = x.data() + i * m;
            double* yi = y.data() + i * m;
            for (int j = 0; j < k_e; ++j) {
                yi[j] = -lam_e * xi[j] + (j > 0 ? lam_e * xi[j - 1] : 0.0);
            }
            yi[k_e] = p_is * lam_e * xi[k_e - 1] - lam_is * xi[k_e];
            for (int j = 1; j < k_is; ++j) {
                yi[k_e + j] = lam_is * (xi[k_e + j - 1] - xi[k_e + j]);
            }
            yi[k_e + k_is] = p_ia * lam_e * xi[k_e - 1] - lam_ia * xi[k_e + k_is];
            for (int j = 1; j < k_ia; ++j) {
                yi[k_e + k_is + j] = lam_ia * (xi[k_e + k_is + j - 1] - xi[k_e + k_is + j]);
            }
        }
    };

    if (dim > 0 && dim <= kDenseGuard) {
        sys.dense = true;
        const auto w = materialize(net, true);
        const auto db = delta_block(params, layout);
        const auto sb = sigma_block(params, layout);
        const std::size_t n = sys.nodes;
        sys.delta.assign(dim * dim, 0.0);
        sys.sigma.assign(dim * dim, 0.0);
        for (std::size_t bi = 0; bi < n; ++bi) {
            for (std::size_t bj = 0; bj < n; ++bj) {
                const double wij = w[bi * n + bj];
                if (wij == 0.0) continue;
                for (int r = 0; r < m; ++r) {
                    for (int c = 0; c < m; ++c) {
                        sys.delta[(bi * m + r) * dim + bj * m + c] =
                            wij * db[static_cast<std::size_t>(r) * m + c];
                    }
                }
            }
            for (int r = 0; r < m; ++r) {
                for (int c = 0; c < m; ++c) {
                    sys.sigma[(bi * m + r) * dim + bi * m + c] =
                        sb[static_cast<std::size_t>(r) * m + c];
                }
            }
        }
    }
    return sys;
}

namespace {

// Component-restricted dense operator for the verification path.
DenseOperator component_operator(const LayeredNetwork& net,
                                 const std::vector<std::uint32_t>& comp) {
    const std::size_t nc = comp.size();
    const std::size_t n = net.size();
    std::vector<double> w(nc * nc, 0.0), wt(nc * nc, 0.0);
    std::vector<double> e(n, 0.0), col(n, 0.0);
    for (std::size_t j = 0; j < nc; ++j) {
        e[comp[j]] = 1.0;
        net.apply_infection(e, col);
        for (std::size_t i = 0; i < nc; ++i) w[i * nc + j] = col[comp[i]];
        net.apply_tracing(e, col);
        for (std::size_t i = 0; i < nc; ++i) wt[i * nc + j] = col[comp[i]];
        e[comp[j]] = 0.0;
    }
    return DenseOperator(nc, std::move(w), std::move(wt));
}

} // namespace

ThresholdReport verify_threshold(const ModelParams& params, const PhaseLayout& layout,
                                 const LayeredNetwork& net) {
    const auto comp = net.largest_component();
    const int m = layout.k_e + layout.k_is + layout.k_ia;
    const std::size_t dim = comp.size() * static_cast<std::size_t>(m);
    if (dim == 0) {
        // No structure at all: the closed form is trivially 0 and stable.
        return {0.0, 0.0, -std::min({params.lambda_e, params.lambda_is, params.lambda_ia}), true};
    }
    if (dim > kDenseGuard) {
        throw input_error("verify_threshold: system too large for dense verification");
    }
    const DenseOperator op = component_operator(net, comp);
    const auto sys = build_linearized(params, layout, op);

    ThresholdReport rep;
    {
        const auto apply = [&](std::span<const double> x, std::span<double> y) {
            op.apply_infection(x, y);
        };
        rep.closed_form =
            threshold_factor(params, layout) * power_iteration(comp.size(), apply).value;
    }

    using Mat = Eigen::MatrixXd;
    using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const auto n = static_cast<Eigen::Index>(dim);
    const Mat delta = Eigen::Map<const RowMat>(sys.delta.data(), n, n);
    const Mat sigma = Eigen::Map<const RowMat>(sys.sigma.data(), n, n);
    const Mat minus_ds = -(delta * sigma.inverse());
    rep.numeric_rho = minus_ds.eigenvalues().cwiseAbs().maxCoeff();
    const Mat full = delta + sigma;
    rep.spectral_bound = full.eigenvalues().real().maxCoeff();

    const bool close =
        std::abs(rep.closed_form - rep.numeric_rho) <= 1e-8 * std::max(1.0, rep.numeric_rho);
    const auto sign = [](double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); };
    rep.consistent = close && sign(rep.spectral_bound) == sign(rep.numeric_rho - 1.0);
    return rep;
}

} // namespace saidr
