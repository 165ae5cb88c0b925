#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "iotsec/harm.hpp"

namespace iotsec::assess {

// |truth - predicted| / truth * 100; N/A (nullopt) when truth is 0.
std::optional<double> percentage_error(double truth, double predicted);

struct MetricTuple {
    double probability = 0.0;
    double impact = 0.0;
    double risk = 0.0;
    double base = 0.0;  // sum of node base scores along the max-risk path
};

struct SystemAssessment {
    std::string system_name;
    std::vector<std::string> path_truth;
    std::vector<std::string> path_pred;
    MetricTuple truth;
    MetricTuple pred;
    // probability, impact, risk, base — percentages, nullopt where truth = 0.
    std::array<std::optional<double>, 4> errors;
    std::optional<std::string> failure;  // set when assessing this system failed
};

struct AssessmentReport {
    std::vector<SystemAssessment> rows;
    std::string config_hash;  // FNV-1a of the fixture-set source
    std::string bundle_ref;   // bundle manifest reference, empty when unused
};

// One assessed system: a name plus one or more topology documents that are
// built and merged in order.
struct SystemSpec {
    std::string name;
    std::vector<nlohmann::json> topologies;
    std::optional<std::size_t> max_path_nodes;
};

// Builds two HARMs over the same topology (ground-truth vs predicted
// scoring), finds each scoring's max-risk path, and compares the metric
// tuples. Entry/target overlap is rejected here; an unreachable target is
// reported naming the scoring that failed.
SystemAssessment assess_system(const SystemSpec& spec, const harm::Scoring& truth,
                               const harm::Scoring& predicted);

// Maps assess_system over the fixture set. A failing system is recorded in
// its row and does not abort the rest.
AssessmentReport assess_all(const std::vector<SystemSpec>& systems, const harm::Scoring& truth,
                            const harm::Scoring& predicted);

// Fixture-set manifest: a systems.json document listing rows in report
// order. Each entry has "name" and either "topology": "file.json" or
// "merge": ["a.json", "b.json"].
std::vector<SystemSpec> load_fixture_set(const std::filesystem::path& dir);

nlohmann::ordered_json report_to_json(const AssessmentReport& report);
AssessmentReport report_from_json(const nlohmann::json& j);

// Aligned-column rendering: a max-risk-path table and a percentage-error
// table.
std::string report_to_text(const AssessmentReport& report);
std::string report_to_csv(const AssessmentReport& report);

}  // namespace iotsec::assess
