// saidr - non-Markovian networked epidemic model with contact tracing.
//
// Subcommands:
//   threshold  closed-form epidemic threshold plus numeric verification
//   simulate   mean-field trajectories (full network or grouped model)
//   fit        Metropolis-Hastings calibration against weekly case counts
//
// Exit codes: 0 success, 2 input error, 3 numerical error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "saidr/calibration.hpp"
#include "saidr/config.hpp"
#include "saidr/erlang.hpp"
#include "saidr/errors.hpp"
#include "saidr/grouped.hpp"
#include "saidr/kernels.hpp"
#include "saidr/meanfield.hpp"
#include "saidr/network.hpp"
#include "saidr/threshold.hpp"

namespace {

using namespace saidr;

struct CommonOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
    std::optional<double> lambda_tr_override;
};

ScenarioConfig load_scenario(const CommonOpts& opts) {
    ScenarioConfig cfg = opts.config_path.empty() ? default_config() : load_config(opts.config_path);
    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.lambda_tr_override) cfg.params.lambda_tr = *opts.lambda_tr_override;
    return cfg;
}

std::vector<double> output_grid(double t_end, double dt) {
    std::vector<double> times;
    const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
    for (std::size_t i = 0; i <= steps; ++i) times.push_back(std::min(i * dt, t_end));
    return times;
}

const char* regime_of(double r) {
    if (r < 1.0) return "subcritical";
    if (r > 1.0) return "supercritical";
    return "critical";
}

int cmd_threshold(const CommonOpts& opts, const std::string& edge_list, bool no_verify) {
    const ScenarioConfig cfg = load_scenario(opts);
    LayeredNetwork net;
    if (!edge_list.empty()) {
        net = load_edge_list(edge_list);
    } else {
        Rng rng(cfg.seed);
        net = build_network(scaled_groups(cfg), cfg.mixing, cfg.network, rng);
    }

    const double factor = threshold_factor(cfg.params, cfg.layout);
    const double rho = spectral_radius(net);
    const double r = factor * rho;
    std::printf("factor,rho_winf,R,regime\n");
    std::printf("%.10g,%.10g,%.10g,%s\n", factor, rho, r, regime_of(r));
    std::printf("R=%.6g %s\n", r, regime_of(r));

    const std::size_t m =
        static_cast<std::size_t>(cfg.layout.k_e + cfg.layout.k_is + cfg.layout.k_ia);
    const std::size_t dim = net.largest_component().size() * m;
    if (!no_verify && dim > 0 && dim <= kDenseGuard) {
        const ThresholdReport rep = verify_threshold(cfg.params, cfg.layout, net);
        std::printf("closed_form,numeric_rho,spectral_bound,consistent\n");
        std::printf("%.10g,%.10g,%.10g,%s\n", rep.closed_form, rep.numeric_rho,
                    rep.spectral_bound, rep.consistent ? "true" : "false");
    }
    return 0;
}

struct GroupSets {
    std::vector<std::string> labels;
    std::vector<std::vector<std::uint32_t>> rows;
};

GroupSets group_row_sets(const std::vector<GroupParams>& groups,
                         const std::vector<int>& node_group, bool grouped_model) {
    GroupSets gs;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        gs.labels.push_back("g" + std::to_string(groups[g].id));
        std::vector<std::uint32_t> rows;
        if (grouped_model) {
            rows.push_back(static_cast<std::uint32_t>(g));
        } else {
            for (std::uint32_t i = 0; i < node_group.size(); ++i) {
                if (node_group[i] == static_cast<int>(g)) rows.push_back(i);
            }
        }
        gs.rows.push_back(std::move(rows));
    }
    return gs;
}

int cmd_simulate(const CommonOpts& opts, bool grouped_model) {
    const ScenarioConfig cfg = load_scenario(opts);
    const auto groups = scaled_groups(cfg);
    std::filesystem::create_directories(opts.out_dir);
    const std::string prev_path = opts.out_dir + "/prevalence.csv";
    const std::string det_path = opts.out_dir + "/detected_cumulative.csv";
    std::ofstream prev_out(prev_path);
    std::ofstream det_out(det_path);
    if (!prev_out || !det_out) throw input_error("cannot write outputs under " + opts.out_dir);

    std::unique_ptr<ContactOperator> op;
    std::vector<int> node_group;
    std::vector<double> det_weight;
    if (grouped_model) {
        op = std::make_unique<GroupOperator>(
            build_group_matrices(groups, cfg.mixing, cfg.network));
        det_weight.assign(groups.size(), 0.0);
        for (int s : cfg.student_groups) {
            det_weight[s] = static_cast<double>(groups[s].population);
        }
    } else {
        Rng rng(cfg.seed);
        auto net = std::make_unique<LayeredNetwork>(
            build_network(groups, cfg.mixing, cfg.network, rng));
        node_group = net->node_group;
        det_weight.assign(node_group.size(), 0.0);
        for (std::size_t i = 0; i < node_group.size(); ++i) {
            for (int s : cfg.student_groups) {
                if (node_group[i] == s) det_weight[i] = 1.0;
            }
        }
        op = std::move(net);
    }

    const GroupSets gs = group_row_sets(groups, node_group, grouped_model);
    const StateMatrix init = uniform_initial(op->size(), cfg.layout, cfg.e1_initial);
    const auto times = output_grid(cfg.t_end, cfg.output_dt);

    constexpr Compartment kAll[] = {Compartment::S,  Compartment::A,  Compartment::E,
                                    Compartment::Is, Compartment::Ia, Compartment::D,
                                    Compartment::C,  Compartment::RC, Compartment::RD,
                                    Compartment::RU};
    const Compartment kDet[] = {Compartment::D, Compartment::C, Compartment::RC, Compartment::RD};

    prev_out << "t,group_or_node,state,probability\n";
    det_out << "t,count\n";
    char tbuf[64];
    std::size_t samples = 0;
    integrate_observe(
        init, *op, cfg.params, cfg.layout, times,
        [&](double t, const StateMatrix& st) {
            ++samples;
            std::snprintf(tbuf, sizeof(tbuf), "%.6f", t);
            for (std::size_t g = 0; g < gs.labels.size(); ++g) {
                for (auto comp : kAll) {
                    double acc = 0.0;
                    for (int c : compartment_columns(cfg.layout, comp)) {
                        const auto col = st.column(c);
                        for (auto i : gs.rows[g]) acc += col[i];
                    }
                    prev_out << tbuf << ',' << gs.labels[g] << ',' << compartment_name(comp) << ','
                             << acc / static_cast<double>(gs.rows[g].size()) << '\n';
                }
            }
            double det = 0.0;
            for (auto comp : kDet) {
                for (int c : compartment_columns(cfg.layout, comp)) {
                    const auto col = st.column(c);
                    for (std::size_t i = 0; i < det_weight.size(); ++i) {
                        det += det_weight[i] * col[i];
                    }
                }
            }
            det_out << tbuf << ',' << det << '\n';
        },
        cfg.integration);

    std::printf("model=%s nodes=%zu samples=%zu kernels=%s\n",
                grouped_model ? "grouped" : "network", op->size(), samples,
                kernels::backend_name());
    std::printf("wrote %s\n", prev_path.c_str());
    std::printf("wrote %s\n", det_path.c_str());
    return 0;
}

void write_histogram_csv(const std::string& path, const Histogram& h) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot write " + path);
    out << "bin_lo,bin_hi,count\n";
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
        out << h.edges[b] << ',' << h.edges[b + 1] << ',' << h.counts[b] << '\n';
    }
}

int cmd_fit(const CommonOpts& opts, const std::string& observed_path, std::size_t samples,
            std::optional<double> s_max_opt, bool synthetic, std::size_t synthetic_weeks,
            bool no_effectiveness) {
    const ScenarioConfig cfg = load_scenario(opts);
    FitScenario scenario = make_fit_scenario(cfg);
    std::filesystem::create_directories(opts.out_dir);

    ObservedSeries observed;
    std::optional<ParamVector> truth;
    if (synthetic) {
        ParamVector t;
        t.is_mean = 1.5;
        t.is_var = 2.25;
        t.beta.assign(scenario.n_beta(synthetic_weeks), cfg.params.beta_is.base);
        t.t0 = 7.0;
        t.f = cfg.network.f;
        observed = synthesize_observed(t, synthetic_weeks, scenario);
        truth = t;
        write_observed_csv(opts.out_dir + "/observed_synthetic.csv", observed);
        std::printf("synthetic truth: is_mean=%g is_var=%g beta=%g t0=%g f=%g\n", t.is_mean,
                    t.is_var, t.beta.front(), t.t0, t.f);
    } else {
        if (observed_path.empty()) throw input_error("fit needs --observed or --synthetic");
        observed = read_observed_csv(observed_path);
    }

    const std::size_t n_beta = scenario.n_beta(observed.counts.size());
    ParamVector initial;
    initial.is_mean = 3.0;
    initial.is_var = 4.0;
    initial.beta.assign(n_beta, 0.05);
    initial.t0 = 0.5 * scenario.t0_max;
    initial.f = 0.5;

    MhSettings mh;
    mh.samples = samples;
    mh.compute_effectiveness = !no_effectiveness;
    const auto& sd = cfg.fit_proposal_sd_named;
    mh.proposal_sd = {sd[0], sd[1]};
    mh.proposal_sd.insert(mh.proposal_sd.end(), n_beta, sd[2]);
    mh.proposal_sd.push_back(sd[3]);
    mh.proposal_sd.push_back(sd[4]);

    Rng rng(cfg.seed);
    const auto chain = metropolis_hastings(initial, mh, observed, scenario, rng);

    const std::string chain_path = opts.out_dir + "/chain.csv";
    {
        std::ofstream out(chain_path);
        if (!out) throw input_error("cannot write " + chain_path);
        out << "sample,is_mean,is_var";
        for (std::size_t w = 0; w < n_beta; ++w) out << ",beta_" << w;
        out << ",t0,f,error,effectiveness,accepted\n";
        for (std::size_t t = 0; t < chain.size(); ++t) {
            const auto& cs = chain[t];
            out << t << ',' << cs.params.is_mean << ',' << cs.params.is_var;
            for (double b : cs.params.beta) out << ',' << b;
            out << ',' << cs.params.t0 << ',' << cs.params.f << ',' << cs.error << ','
                << cs.effectiveness << ',' << (cs.accepted ? 1 : 0) << '\n';
        }
    }

    const double s_max = s_max_opt.value_or(cfg.fit_s_max);
    const ChainSummary sum = summarize(chain, s_max);

    std::size_t accepted = 0;
    for (const auto& cs : chain) accepted += cs.accepted ? 1 : 0;
    const double acc_rate = static_cast<double>(accepted) / static_cast<double>(chain.size());

    {
        std::ofstream out(opts.out_dir + "/summary.txt");
        out << "samples = " << sum.total << "\n";
        out << "used (error <= " << s_max << ") = " << sum.used << "\n";
        out << "acceptance_rate = " << acc_rate << "\n";
        out << "min_error = " << sum.min_error << "\n";
        out << "min_error_is_mean = " << sum.min_error_sample.is_mean << "\n";
        out << "min_error_is_var = " << sum.min_error_sample.is_var << "\n";
        out << "min_error_k_is = "
            << fit_erlang(sum.min_error_sample.is_mean, sum.min_error_sample.is_var).k << "\n";
        for (std::size_t w = 0; w < sum.min_error_sample.beta.size(); ++w) {
            out << "min_error_beta_" << w << " = " << sum.min_error_sample.beta[w] << "\n";
        }
        out << "min_error_t0 = " << sum.min_error_sample.t0 << "\n";
        out << "min_error_f = " << sum.min_error_sample.f << "\n";
        out << "effectiveness_mean = " << sum.effectiveness_mean << "\n";
        if (truth) {
            out << "synthetic_truth_beta = " << truth->beta.front() << "\n";
            out << "synthetic_truth_k_is = " << fit_erlang(truth->is_mean, truth->is_var).k
                << "\n";
        }
    }
    write_histogram_csv(opts.out_dir + "/error_hist.csv", sum.error_hist);
    write_histogram_csv(opts.out_dir + "/effectiveness_hist.csv", sum.effectiveness_hist);
    write_histogram_csv(opts.out_dir + "/k_is_hist.csv", sum.k_is_hist);
    write_histogram_csv(opts.out_dir + "/is_mean_hist.csv", sum.is_mean_hist);
    write_histogram_csv(opts.out_dir + "/f_hist.csv", sum.f_hist);
    {
        std::ofstream out(opts.out_dir + "/beta_windows.csv");
        out << "window,q1,median,q3\n";
        for (std::size_t w = 0; w < sum.beta_quartiles.size(); ++w) {
            out << w << ',' << sum.beta_quartiles[w][0] << ',' << sum.beta_quartiles[w][1] << ','
                << sum.beta_quartiles[w][2] << '\n';
        }
    }

    std::printf("chain=%zu accepted=%.3f min_error=%g effectiveness_mean=%g\n", chain.size(),
                acc_rate, sum.min_error, sum.effectiveness_mean);
    std::printf("wrote %s and summary files\n", chain_path.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"saidr: non-Markovian networked epidemic model with contact tracing"};
    app.require_subcommand(1);

    CommonOpts opts;
    app.add_option("--config", opts.config_path, "scenario config (JSON, // comments allowed)");
    app.add_option("--seed", opts.seed, "override the config seed");
    app.add_option("--out-dir", opts.out_dir, "output directory");
    app.add_option("--lambda-tr-override", opts.lambda_tr_override,
                   "override the contact-tracing rate");

    auto* th = app.add_subcommand("threshold", "epidemic threshold report");
    std::string edge_list;
    bool no_verify = false;
    th->add_option("--edge-list", edge_list, "edge list file (u v w_inf [w_tr])");
    th->add_flag("--no-verify", no_verify, "skip the dense numeric verification");

    auto* sim = app.add_subcommand("simulate", "run the mean-field model");
    bool use_grouped = false, use_network = false;
    sim->add_flag("--grouped", use_grouped, "grouped (reduced) model");
    sim->add_flag("--network", use_network, "full network model");

    auto* fit = app.add_subcommand("fit", "calibrate against weekly cumulative cases");
    std::string observed_path;
    std::size_t samples = 10000;
    std::optional<double> s_max;
    bool synthetic = false, no_eff = false;
    std::size_t synthetic_weeks = 8;
    fit->add_option("--observed", observed_path, "CSV week_index,cumulative_cases");
    fit->add_option("--samples", samples, "chain length");
    fit->add_option("--s-max", s_max, "error cutoff for the summary");
    fit->add_flag("--synthetic", synthetic, "generate observed data from a stated ground truth");
    fit->add_option("--weeks", synthetic_weeks, "number of synthetic observation weeks");
    fit->add_flag("--no-effectiveness", no_eff, "skip per-sample effectiveness runs");

    try {
        app.parse(argc, argv);
        if (th->parsed()) return cmd_threshold(opts, edge_list, no_verify);
        if (sim->parsed()) {
            if (use_grouped == use_network) {
                throw saidr::input_error("simulate needs exactly one of --grouped/--network");
            }
            return cmd_simulate(opts, use_grouped);
        }
        if (fit->parsed()) {
            return cmd_fit(opts, observed_path, samples, s_max, synthetic, synthetic_weeks,
                           no_eff);
        }
        return 2;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const saidr::numerical_error& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 3;
    } catch (const saidr::input_error& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 2;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
