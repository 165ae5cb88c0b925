#include "iotsec/assess.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "iotsec/util.hpp"

namespace iotsec::assess {

using nlohmann::json;
using nlohmann::ordered_json;

std::optional<double> percentage_error(double truth, double predicted) {
    if (!std::isfinite(truth) || !std::isfinite(predicted)) {
        throw Error("percentage_error requires finite inputs");
    }
    if (truth == 0.0) return std::nullopt;
    return std::abs(truth - predicted) / truth * 100.0;
}

namespace {

struct Evaluated {
    std::vector<std::string> path;
    MetricTuple tuple;
};

Evaluated evaluate_scoring(const SystemSpec& spec, const harm::Scoring& scoring,
                           const std::string& scoring_name) {
    if (spec.topologies.empty()) throw Error("system " + spec.name + " has no topology");

    harm::NetworkModel net = harm::build_network(spec.topologies.front(), scoring);
    for (std::size_t i = 1; i < spec.topologies.size(); ++i) {
        net = harm::merge_networks(net, harm::build_network(spec.topologies[i], scoring));
    }
    net.name = spec.name;

    for (const auto& entry : net.entry_points) {
        if (net.targets.count(entry) > 0) {
            throw Error("system " + spec.name + ": device " + entry +
                        " is both entry point and target");
        }
    }

    const harm::Harm h = harm::build_harm(net);
    harm::AttackPath best;
    try {
        best = harm::max_risk_path(h, spec.max_path_nodes);
    } catch (const Error&) {
        throw Error("system " + spec.name + ": target unreachable under " + scoring_name +
                    " scoring");
    }

    Evaluated out;
    out.path = best.nodes;
    out.tuple.probability = best.metrics.probability;
    out.tuple.impact = best.metrics.impact;
    out.tuple.risk = best.metrics.risk;
    out.tuple.base = harm::path_base_score(best.nodes, h);
    return out;
}

}  // namespace

SystemAssessment assess_system(const SystemSpec& spec, const harm::Scoring& truth,
                               const harm::Scoring& predicted) {
    const Evaluated t = evaluate_scoring(spec, truth, "ground-truth");
    const Evaluated p = evaluate_scoring(spec, predicted, "predicted");

    SystemAssessment row;
    row.system_name = spec.name;
    row.path_truth = t.path;
    row.path_pred = p.path;
    row.truth = t.tuple;
    row.pred = p.tuple;
    row.errors = {percentage_error(t.tuple.probability, p.tuple.probability),
                  percentage_error(t.tuple.impact, p.tuple.impact),
                  percentage_error(t.tuple.risk, p.tuple.risk),
                  percentage_error(t.tuple.base, p.tuple.base)};
    return row;
}

AssessmentReport assess_all(const std::vector<SystemSpec>& systems, const harm::Scoring& truth,
                            const harm::Scoring& predicted) {
    AssessmentReport report;
    for (const auto& spec : systems) {
        try {
            report.rows.push_back(assess_system(spec, truth, predicted));
        } catch (const Error& e) {
            SystemAssessment row;
            row.system_name = spec.name;
            row.failure = e.what();
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

std::vector<SystemSpec> load_fixture_set(const std::filesystem::path& dir) {
    const auto manifest_path = dir / "systems.json";
    if (!std::filesystem::exists(manifest_path)) {
        throw UsageError("fixture set manifest not found: " + manifest_path.string());
    }
    json manifest;
    try {
        manifest = json::parse(read_file(manifest_path));
    } catch (const json::parse_error& e) {
        throw Error("malformed fixture manifest " + manifest_path.string() + ": " + e.what());
    }

    std::vector<SystemSpec> systems;
    for (const auto& entry : manifest.at("systems")) {
        SystemSpec spec;
        spec.name = entry.at("name").get<std::string>();
        std::vector<std::string> files;
        if (entry.contains("topology")) {
            files.push_back(entry["topology"].get<std::string>());
        } else if (entry.contains("merge")) {
            for (const auto& f : entry["merge"]) files.push_back(f.get<std::string>());
        } else {
            throw Error("fixture entry " + spec.name + " needs \"topology\" or \"merge\"");
        }
        if (entry.contains("max_path_nodes")) {
            spec.max_path_nodes = entry["max_path_nodes"].get<std::size_t>();
        }
        for (const auto& file : files) {
            const auto path = dir / file;
            try {
                spec.topologies.push_back(json::parse(read_file(path)));
            } catch (const json::parse_error& e) {
                throw Error("malformed topology " + path.string() + ": " + e.what());
            }
        }
        systems.push_back(std::move(spec));
    }
    return systems;
}

namespace {

std::string error_cell(const std::optional<double>& error) {
    if (!error.has_value()) return "N/A";
    return format_fixed(*error, 2) + "%";
}

ordered_json tuple_to_json(const MetricTuple& tuple) {
    ordered_json j;
    j["probability"] = round_to(tuple.probability, 6);
    j["impact"] = round_to(tuple.impact, 4);
    j["risk"] = round_to(tuple.risk, 4);
    j["base"] = round_to(tuple.base, 1);
    return j;
}

MetricTuple tuple_from_json(const json& j) {
    MetricTuple tuple;
    tuple.probability = j.at("probability").get<double>();
    tuple.impact = j.at("impact").get<double>();
    tuple.risk = j.at("risk").get<double>();
    tuple.base = j.at("base").get<double>();
    return tuple;
}

}  // namespace

ordered_json report_to_json(const AssessmentReport& report) {
    ordered_json j;
    j["provenance"] = {{"config_hash", report.config_hash}, {"bundle", report.bundle_ref}};
    j["systems"] = ordered_json::array();
    for (const auto& row : report.rows) {
        ordered_json r;
        r["name"] = row.system_name;
        if (row.failure.has_value()) {
            r["error"] = *row.failure;
            j["systems"].push_back(std::move(r));
            continue;
        }
        r["max_risk_path_truth"] = row.path_truth;
        r["max_risk_path_truth_text"] = harm::format_path(row.path_truth);
        r["max_risk_path_predicted"] = row.path_pred;
        r["max_risk_path_predicted_text"] = harm::format_path(row.path_pred);
        r["truth"] = tuple_to_json(row.truth);
        r["predicted"] = tuple_to_json(row.pred);
        const char* names[4] = {"probability", "impact", "risk", "base"};
        ordered_json errors;
        for (int i = 0; i < 4; ++i) {
            if (row.errors[i].has_value()) {
                errors[names[i]] = round_to(*row.errors[i], 2);
            } else {
                errors[names[i]] = nullptr;  // N/A
            }
        }
        r["percentage_error"] = std::move(errors);
        j["systems"].push_back(std::move(r));
    }
    return j;
}

AssessmentReport report_from_json(const json& j) {
    AssessmentReport report;
    report.config_hash = j.at("provenance").value("config_hash", "");
    report.bundle_ref = j.at("provenance").value("bundle", "");
    for (const auto& r : j.at("systems")) {
        SystemAssessment row;
        row.system_name = r.at("name").get<std::string>();
        if (r.contains("error")) {
            row.failure = r["error"].get<std::string>();
            report.rows.push_back(std::move(row));
            continue;
        }
        row.path_truth = r.at("max_risk_path_truth").get<std::vector<std::string>>();
        row.path_pred = r.at("max_risk_path_predicted").get<std::vector<std::string>>();
        row.truth = tuple_from_json(r.at("truth"));
        row.pred = tuple_from_json(r.at("predicted"));
        const char* names[4] = {"probability", "impact", "risk", "base"};
        for (int i = 0; i < 4; ++i) {
            const auto& cell = r.at("percentage_error").at(names[i]);
            if (!cell.is_null()) row.errors[i] = cell.get<double>();
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

namespace {

void append_table(std::string& out, const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> widths;
    for (const auto& row : rows) {
        if (widths.size() < row.size()) widths.resize(row.size(), 0);
        for (std::size_t c = 0; c < row.size(); ++c) {
            // Count display columns, not bytes: the arrow is 3 UTF-8 bytes wide.
            std::size_t display = 0;
            for (unsigned char ch : row[c]) {
                if ((ch & 0xC0) != 0x80) ++display;
            }
            widths[c] = std::max(widths[c], display);
        }
    }
    for (const auto& row : rows) {
        std::string line;
        for (std::size_t c = 0; c < row.size(); ++c) {
            std::size_t display = 0;
            for (unsigned char ch : row[c]) {
                if ((ch & 0xC0) != 0x80) ++display;
            }
            line += row[c];
            if (c + 1 < row.size()) line += std::string(widths[c] - display + 2, ' ');
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out += line;
        out += '\n';
    }
}

}  // namespace

std::string report_to_text(const AssessmentReport& report) {
    std::string out;
    out += "Most risky attack paths\n";
    out += "=======================\n";
    std::vector<std::vector<std::string>> paths;
    paths.push_back({"System", "Max-risk path (ground truth)", "Max-risk path (predicted)"});
    for (const auto& row : report.rows) {
        if (row.failure.has_value()) {
            paths.push_back({row.system_name, "error: " + *row.failure, ""});
        } else {
            paths.push_back({row.system_name, harm::format_path(row.path_truth),
                             harm::format_path(row.path_pred)});
        }
    }
    append_table(out, paths);

    out += "\nPercentage error in predicting probability, impact, risk, and base score\n";
    out += "=========================================================================\n";
    std::vector<std::vector<std::string>> errors;
    errors.push_back({"System", "Probability", "Impact", "Risk", "Base score"});
    for (const auto& row : report.rows) {
        if (row.failure.has_value()) {
            errors.push_back({row.system_name, "error", "error", "error", "error"});
        } else {
            errors.push_back({row.system_name, error_cell(row.errors[0]), error_cell(row.errors[1]),
                              error_cell(row.errors[2]), error_cell(row.errors[3])});
        }
    }
    append_table(out, errors);
    return out;
}

std::string report_to_csv(const AssessmentReport& report) {
    std::string out =
        "system,path_truth,path_predicted,probability_truth,impact_truth,risk_truth,base_truth,"
        "probability_predicted,impact_predicted,risk_predicted,base_predicted,"
        "probability_error,impact_error,risk_error,base_error\n";
    auto cell = [](const std::optional<double>& v) {
        return v.has_value() ? format_fixed(*v, 2) : std::string("N/A");
    };
    for (const auto& row : report.rows) {
        if (row.failure.has_value()) {
            out += row.system_name + ",error,,,,,,,,,,,,,\n";
            continue;
        }
        std::ostringstream line;
        line << row.system_name << ',' << harm::format_path(row.path_truth) << ','
             << harm::format_path(row.path_pred) << ',' << format_fixed(row.truth.probability, 6)
             << ',' << format_fixed(row.truth.impact, 4) << ',' << format_fixed(row.truth.risk, 4)
             << ',' << format_fixed(row.truth.base, 1) << ','
             << format_fixed(row.pred.probability, 6) << ',' << format_fixed(row.pred.impact, 4)
             << ',' << format_fixed(row.pred.risk, 4) << ',' << format_fixed(row.pred.base, 1)
             << ',' << cell(row.errors[0]) << ',' << cell(row.errors[1]) << ','
             << cell(row.errors[2]) << ',' << cell(row.errors[3]) << '\n';
        out += line.str();
    }
    return out;
}

}  // namespace iotsec::assess
