#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "saidr/calibration.hpp"
#include "saidr/meanfield.hpp"
#include "saidr/network.hpp"

namespace saidr {

// Everything a CLI run needs. Parsing and serialization round-trip
// losslessly; the file format is JSON with // comments permitted.
struct ScenarioConfig {
    std::uint64_t seed = 1;
    std::vector<GroupParams> groups;
    MixingRule mixing;
    NetworkConfig network;
    double population_scale = 1.0; // scales every group population
    PhaseLayout layout;
    ModelParams params;
    IntegrationSettings integration;
    double t_end = 120.0;
    double output_dt = 1.0;
    double e1_initial = 0.005;
    std::vector<int> student_groups; // 0-based group indices
    // fit section
    double fit_t0_max = 30.0;
    double fit_s_max = 5000.0;
    double fit_dt = 0.1;
    std::vector<double> fit_proposal_sd_named; // is_mean, is_var, beta, t0, f
    bool detected_only_effectiveness = false;
};

// Survey-derived contact parameters of the university case study: six
// groups (graduate students; faculty and staff; off-campus, Greek-house and
// two on-campus undergraduate populations). With split_town, a seventh group
// clones the faculty/staff contact behaviour for the surrounding town and
// the published combined population is split between the two.
std::vector<GroupParams> campus_groups(bool split_town = true);

// Undergraduates mix only with undergraduates, graduate students only among
// themselves, faculty/staff/town form the third block.
MixingRule campus_mixing(int group_count);

ScenarioConfig default_config();

ScenarioConfig parse_config(const std::string& json_text);
ScenarioConfig load_config(const std::string& path);
std::string serialize_config(const ScenarioConfig& cfg);

// Standalone group-parameter document: {"groups": [...], "mixing": [[...]]}.
// Referenced from a scenario config via network.groups_file.
std::pair<std::vector<GroupParams>, MixingRule> load_group_file(const std::string& path);

// Group populations scaled by population_scale (rounded, minimum 1 when the
// unscaled population is positive).
std::vector<GroupParams> scaled_groups(const ScenarioConfig& cfg);

FitScenario make_fit_scenario(const ScenarioConfig& cfg);

} // namespace saidr
