#pragma once

#include <array>
#include <string>
#include <string_view>

namespace iotsec::cvss {

// CVSS v2 base metric value domains. Every metric has exactly three values.
enum class AccessVector { Local, AdjacentNetwork, Network };
enum class AccessComplexity { High, Medium, Low };
enum class Authentication { Multiple, Single, None };
enum class ImpactLevel { None, Partial, Complete };

struct Categories {
    AccessVector access_vector = AccessVector::Local;
    AccessComplexity access_complexity = AccessComplexity::High;
    Authentication authentication = Authentication::Multiple;
    ImpactLevel confidentiality = ImpactLevel::None;
    ImpactLevel integrity = ImpactLevel::None;
    ImpactLevel availability = ImpactLevel::None;

    bool operator==(const Categories&) const = default;
};

struct PrivilegeFlags {
    bool all_privilege = false;
    bool user_privilege = false;
    bool other_privilege = false;

    bool operator==(const PrivilegeFlags&) const = default;
};

struct Scores {
    double impact = 0.0;          // [0, 10.001], unrounded
    double exploitability = 0.0;  // [0, 10.0], unrounded
    double base = 0.0;            // [0, 10], one decimal
};

// Names of the six metrics, in canonical order. Also used as task names by
// the classifier module.
inline constexpr std::array<std::string_view, 6> kMetricNames = {
    "access_vector",     "access_complexity", "authentication",
    "confidentiality",   "integrity",         "availability",
};

// Standard numeric weights.
double weight(AccessVector v);
double weight(AccessComplexity v);
double weight(Authentication v);
double weight(ImpactLevel v);

// Generic lookup by metric/value name (uppercase tokens, e.g.
// ("access_vector", "NETWORK")). Throws Error on unknown value.
double metric_weight(std::string_view metric, std::string_view value);

double impact_subscore(double conf_w, double integ_w, double avail_w);
double exploitability_subscore(double av_w, double ac_w, double au_w);

// 0 when impact is exactly 0, 1.176 otherwise.
double f_impact(double impact);

// Combines the two subscores, rounds half-up to one decimal, clamps to [0,10].
double base_score(double impact, double exploitability);

Scores score_categories(const Categories& cats);

// Text codes: value <-> uppercase token ("NETWORK") and short vector code ("N").
std::string_view to_token(AccessVector v);
std::string_view to_token(AccessComplexity v);
std::string_view to_token(Authentication v);
std::string_view to_token(ImpactLevel v);

AccessVector access_vector_from_token(std::string_view token);
AccessComplexity access_complexity_from_token(std::string_view token);
Authentication authentication_from_token(std::string_view token);
ImpactLevel impact_level_from_token(std::string_view token);

// "AV:N/AC:L/Au:N/C:P/I:P/A:P" <-> Categories. Parsing is case-insensitive;
// errors name the offending component.
Categories parse_vector(std::string_view text);
std::string format_vector(const Categories& cats);

// Per-task label helpers: the three labels of a metric, in domain order.
std::array<std::string, 3> label_domain(std::string_view metric);
std::string label_of(const Categories& cats, std::string_view metric);
Categories categories_from_labels(const std::array<std::string, 6>& labels);

}  // namespace iotsec::cvss
