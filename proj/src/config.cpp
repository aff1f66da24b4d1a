#include "saidr/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "saidr/errors.hpp"

namespace saidr {

using nlohmann::json;

std::vector<GroupParams> campus_groups(bool split_town) {
    // Survey means per group: close contacts, casual contacts and the
    // (proportion, weekly hours, people met) triples for bars/restaurants,
    // stores/services and social events.
    const auto mk = [](int id, std::int64_t pop, double v1, double v2, LocationParams l1,
                       LocationParams l2, LocationParams l3) {
        GroupParams g;
        g.id = id;
        g.population = pop;
        g.v1 = v1;
        g.v2 = v2;
        g.loc = {l1, l2, l3};
        return g;
    };
    std::vector<GroupParams> groups{
        mk(1, 4000, 3.5, 3.5, {0.5, 1.76, 4.0}, {0.91, 2.0, 4.5}, {0.3, 0.85, 6.0}),
        mk(2, 31000, 3.5, 2.3, {0.4, 0.7, 2.7}, {0.92, 1.7, 4.2}, {0.26, 0.7, 5.5}),
        mk(3, 8700, 5.8, 4.9, {0.6, 3.25, 6.0}, {0.89, 2.6, 4.9}, {0.45, 1.72, 8.0}),
        mk(4, 2000, 14.3, 10.7, {0.73, 4.46, 5.3}, {0.81, 2.1, 4.3}, {0.72, 4.5, 14.0}),
        mk(5, 4400, 4.5, 5.1, {0.53, 2.25, 5.3}, {0.75, 1.5, 4.7}, {0.56, 3.0, 8.6}),
        mk(6, 900, 3.5, 4.2, {0.5, 1.5, 3.0}, {0.91, 3.0, 4.7}, {0.33, 2.37, 4.9}),
    };
    if (split_town) {
        // The published faculty/staff population includes the surrounding
        // town; keep 5000 on campus and move the rest to a town group that
        // reuses the faculty/staff contact behaviour.
        GroupParams town = groups[1];
        town.id = 7;
        town.population = 26000;
        groups[1].population = 5000;
        groups.push_back(town);
    }
    return groups;
}

MixingRule campus_mixing(int group_count) {
    if (group_count == 7) return MixingRule::blocks(7, {{0}, {1, 6}, {2, 3, 4, 5}});
    if (group_count == 6) return MixingRule::blocks(6, {{0}, {1}, {2, 3, 4, 5}});
    throw input_error("campus mixing rule is defined for 6 or 7 groups");
}

ScenarioConfig default_config() {
    ScenarioConfig cfg;
    cfg.groups = campus_groups(true);
    cfg.mixing = campus_mixing(7);
    cfg.student_groups = {0, 2, 3, 4, 5};
    cfg.fit_proposal_sd_named = {0.2, 0.5, 0.01, 1.0, 0.05}; // is_mean, is_var, beta, t0, f
    return cfg;
}

namespace {

json groups_to_json(const std::vector<GroupParams>& groups) {
    json arr = json::array();
    for (const auto& g : groups) {
        json locs = json::array();
        for (const auto& l : g.loc) {
            locs.push_back({{"p", l.p}, {"h", l.h}, {"n", l.n}});
        }
        arr.push_back({{"id", g.id},
                       {"population", g.population},
                       {"v1", g.v1},
                       {"v2", g.v2},
                       {"locations", locs}});
    }
    return arr;
}

std::vector<GroupParams> groups_from_json(const json& arr) {
    std::vector<GroupParams> groups;
    for (const auto& jg : arr) {
        GroupParams g;
        g.id = jg.at("id").get<int>();
        g.population = jg.at("population").get<std::int64_t>();
        g.v1 = jg.at("v1").get<double>();
        g.v2 = jg.at("v2").get<double>();
        const auto& locs = jg.at("locations");
        if (locs.size() != 3) throw input_error("each group needs exactly 3 location records");
        for (int l = 0; l < 3; ++l) {
            g.loc[l].p = locs[l].at("p").get<double>();
            g.loc[l].h = locs[l].at("h").get<double>();
            g.loc[l].n = locs[l].at("n").get<double>();
        }
        groups.push_back(g);
    }
    return groups;
}

json mixing_to_json(const MixingRule& m) {
    json rows = json::array();
    for (int i = 0; i < m.groups; ++i) {
        json row = json::array();
        for (int j = 0; j < m.groups; ++j) row.push_back(static_cast<int>(m.allowed(i, j)));
        rows.push_back(row);
    }
    return rows;
}

MixingRule mixing_from_json(const json& rows) {
    MixingRule m;
    m.groups = static_cast<int>(rows.size());
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != m.groups) {
            throw input_error("mixing matrix must be square");
        }
        for (const auto& v : row) m.allow.push_back(v.get<int>() != 0 ? 1 : 0);
    }
    m.validate();
    return m;
}

} // namespace

std::pair<std::vector<GroupParams>, MixingRule> load_group_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open group-parameter file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    json j;
    try {
        j = json::parse(ss.str(), nullptr, true, /*ignore_comments=*/true);
        return {groups_from_json(j.at("groups")), mixing_from_json(j.at("mixing"))};
    } catch (const json::exception& e) {
        throw input_error(std::string("group-parameter file error: ") + e.what());
    }
}

std::string serialize_config(const ScenarioConfig& cfg) {
    json j;
    j["seed"] = cfg.seed;
    j["network"] = {{"f", cfg.network.f},
                    {"zeta1", cfg.network.zeta1},
                    {"zeta2", cfg.network.zeta2},
                    {"t_hours", cfg.network.t_hours},
                    {"population_scale", cfg.population_scale},
                    {"groups", groups_to_json(cfg.groups)},
                    {"mixing", mixing_to_json(cfg.mixing)}};
    j["phases"] = {{"k_a", cfg.layout.k_a}, {"k_e", cfg.layout.k_e},   {"k_is", cfg.layout.k_is},
                   {"k_ia", cfg.layout.k_ia}, {"k_d", cfg.layout.k_d}, {"k_c", cfg.layout.k_c}};
    j["rates"] = {{"beta_is", cfg.params.beta_is.base},
                  {"beta_is_windows", cfg.params.beta_is.values},
                  {"beta_window_days", cfg.params.beta_is.window},
                  {"beta_ia_ratio", cfg.params.beta_ia_ratio},
                  {"p_ia", cfg.params.p_ia},
                  {"lambda_a", cfg.params.lambda_a},
                  {"lambda_e", cfg.params.lambda_e},
                  {"lambda_is", cfg.params.lambda_is},
                  {"lambda_ia", cfg.params.lambda_ia},
                  {"lambda_d", cfg.params.lambda_d},
                  {"lambda_c", cfg.params.lambda_c},
                  {"lambda_tr", cfg.params.lambda_tr}};
    j["integration"] = {{"dt", cfg.integration.dt},
                        {"t_end", cfg.t_end},
                        {"output_dt", cfg.output_dt}};
    j["initial"] = {{"e1", cfg.e1_initial}};
    j["students"] = cfg.student_groups;
    j["fit"] = {{"t0_max", cfg.fit_t0_max},
                {"s_max", cfg.fit_s_max},
                {"dt", cfg.fit_dt},
                {"proposal_sd", cfg.fit_proposal_sd_named},
                {"detected_only_effectiveness", cfg.detected_only_effectiveness}};
    return j.dump(2) + "\n";
}

ScenarioConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw input_error(std::string("config parse error: ") + e.what());
    }
    ScenarioConfig cfg = default_config();
    try {
        if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("network")) {
            const auto& n = j["network"];
            if (n.contains("f")) cfg.network.f = n["f"].get<double>();
            if (n.contains("zeta1")) cfg.network.zeta1 = n["zeta1"].get<double>();
            if (n.contains("zeta2")) cfg.network.zeta2 = n["zeta2"].get<double>();
            if (n.contains("t_hours")) {
                const auto t = n["t_hours"].get<std::vector<double>>();
                if (t.size() != 3) throw input_error("t_hours needs 3 entries");
                std::copy(t.begin(), t.end(), cfg.network.t_hours.begin());
            }
            if (n.contains("population_scale")) {
                cfg.population_scale = n["population_scale"].get<double>();
            }
            if (n.contains("groups_file")) {
                const auto doc = load_group_file(n["groups_file"].get<std::string>());
                cfg.groups = doc.first;
                cfg.mixing = doc.second;
            }
            if (n.contains("groups")) cfg.groups = groups_from_json(n["groups"]);
            if (n.contains("mixing")) cfg.mixing = mixing_from_json(n["mixing"]);
        }
        if (j.contains("phases")) {
            const auto& p = j["phases"];
            if (p.contains("k_a")) cfg.layout.k_a = p["k_a"].get<int>();
            if (p.contains("k_e")) cfg.layout.k_e = p["k_e"].get<int>();
            if (p.contains("k_is")) cfg.layout.k_is = p["k_is"].get<int>();
            if (p.contains("k_ia")) cfg.layout.k_ia = p["k_ia"].get<int>();
            if (p.contains("k_d")) cfg.layout.k_d = p["k_d"].get<int>();
            if (p.contains("k_c")) cfg.layout.k_c = p["k_c"].get<int>();
        }
        if (j.contains("rates")) {
            const auto& r = j["rates"];
            if (r.contains("beta_is")) cfg.params.beta_is.base = r["beta_is"].get<double>();
            if (r.contains("beta_is_windows")) {
                cfg.params.beta_is.values = r["beta_is_windows"].get<std::vector<double>>();
            }
            if (r.contains("beta_window_days")) {
                cfg.params.beta_is.window = r["beta_window_days"].get<double>();
            }
            if (r.contains("beta_ia_ratio")) {
                cfg.params.beta_ia_ratio = r["beta_ia_ratio"].get<double>();
            }
            if (r.contains("p_ia")) cfg.params.p_ia = r["p_ia"].get<double>();
            if (r.contains("lambda_a")) cfg.params.lambda_a = r["lambda_a"].get<double>();
            if (r.contains("lambda_e")) cfg.params.lambda_e = r["lambda_e"].get<double>();
            if (r.contains("lambda_is")) cfg.params.lambda_is = r["lambda_is"].get<double>();
            if (r.contains("lambda_ia")) cfg.params.lambda_ia = r["lambda_ia"].get<double>();
            if (r.contains("lambda_d")) cfg.params.lambda_d = r["lambda_d"].get<double>();
            if (r.contains("lambda_c")) cfg.params.lambda_c = r["lambda_c"].get<double>();
            if (r.contains("lambda_tr")) cfg.params.lambda_tr = r["lambda_tr"].get<double>();
        }
        if (j.contains("integration")) {
            const auto& i = j["integration"];
            if (i.contains("dt")) cfg.integration.dt = i["dt"].get<double>();
            if (i.contains("t_end")) cfg.t_end = i["t_end"].get<double>();
            if (i.contains("output_dt")) cfg.output_dt = i["output_dt"].get<double>();
        }
        if (j.contains("initial") && j["initial"].contains("e1")) {
            cfg.e1_initial = j["initial"]["e1"].get<double>();
        }
        if (j.contains("students")) {
            cfg.student_groups = j["students"].get<std::vector<int>>();
        } else if (cfg.groups.size() != default_config().groups.size()) {
            // Custom populations without an explicit student list: count all.
            cfg.student_groups.clear();
            for (std::size_t g = 0; g < cfg.groups.size(); ++g) {
                cfg.student_groups.push_back(static_cast<int>(g));
            }
        }
        if (j.contains("fit")) {
            const auto& f = j["fit"];
            if (f.contains("t0_max")) cfg.fit_t0_max = f["t0_max"].get<double>();
            if (f.contains("s_max")) cfg.fit_s_max = f["s_max"].get<double>();
            if (f.contains("dt")) cfg.fit_dt = f["dt"].get<double>();
            if (f.contains("proposal_sd")) {
                cfg.fit_proposal_sd_named = f["proposal_sd"].get<std::vector<double>>();
                if (cfg.fit_proposal_sd_named.size() != 5) {
                    throw input_error("fit.proposal_sd needs 5 entries "
                                      "(is_mean, is_var, beta, t0, f)");
                }
            }
            if (f.contains("detected_only_effectiveness")) {
                cfg.detected_only_effectiveness = f["detected_only_effectiveness"].get<bool>();
            }
        }
    } catch (const json::exception& e) {
        throw input_error(std::string("config field error: ") + e.what());
    }
    for (int s : cfg.student_groups) {
        if (s < 0 || static_cast<std::size_t>(s) >= cfg.groups.size()) {
            throw input_error("students list references an unknown group index");
        }
    }
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open config: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::vector<GroupParams> scaled_groups(const ScenarioConfig& cfg) {
    std::vector<GroupParams> groups = cfg.groups;
    if (cfg.population_scale == 1.0) return groups;
    if (!(cfg.population_scale > 0.0)) throw input_error("population_scale must be positive");
    for (auto& g : groups) {
        const auto scaled = static_cast<std::int64_t>(
            std::llround(static_cast<double>(g.population) * cfg.population_scale));
        g.population = g.population > 0 ? std::max<std::int64_t>(1, scaled) : 0;
    }
    return groups;
}

FitScenario make_fit_scenario(const ScenarioConfig& cfg) {
    FitScenario sc;
    sc.groups = scaled_groups(cfg);
    sc.mixing = cfg.mixing;
    sc.net = cfg.network;
    sc.layout = cfg.layout;
    sc.params = cfg.params;
    sc.student_groups = cfg.student_groups;
    sc.t0_max = cfg.fit_t0_max;
    sc.e1_initial = cfg.e1_initial;
    sc.dt = cfg.fit_dt;
    sc.detected_only_effectiveness = cfg.detected_only_effectiveness;
    return sc;
}

} // namespace saidr
