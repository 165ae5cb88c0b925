#include "iotsec/cvss.hpp"

#include <algorithm>
#include <cmath>

#include "iotsec/util.hpp"

namespace iotsec::cvss {

double weight(AccessVector v) {
    switch (v) {
        case AccessVector::Local: return 0.395;
        case AccessVector::AdjacentNetwork: return 0.646;
        case AccessVector::Network: return 1.0;
    }
    throw Error("invalid access_vector value");
}

double weight(AccessComplexity v) {
    switch (v) {
        case AccessComplexity::High: return 0.35;
        case AccessComplexity::Medium: return 0.61;
        case AccessComplexity::Low: return 0.71;
    }
    throw Error("invalid access_complexity value");
}

double weight(Authentication v) {
    switch (v) {
        case Authentication::Multiple: return 0.45;
        case Authentication::Single: return 0.56;
        case Authentication::None: return 0.704;
    }
    throw Error("invalid authentication value");
}

double weight(ImpactLevel v) {
    switch (v) {
        case ImpactLevel::None: return 0.0;
        case ImpactLevel::Partial: return 0.275;
        case ImpactLevel::Complete: return 0.660;
    }
    throw Error("invalid impact value");
}

double metric_weight(std::string_view metric, std::string_view value) {
    if (metric == "access_vector") return weight(access_vector_from_token(value));
    if (metric == "access_complexity") return weight(access_complexity_from_token(value));
    if (metric == "authentication") return weight(authentication_from_token(value));
    if (metric == "confidentiality" || metric == "integrity" || metric == "availability") {
        return weight(impact_level_from_token(value));
    }
    throw Error("unknown CVSS metric: " + std::string(metric));
}

double impact_subscore(double conf_w, double integ_w, double avail_w) {
    return 10.41 * (1.0 - (1.0 - conf_w) * (1.0 - integ_w) * (1.0 - avail_w));
}

double exploitability_subscore(double av_w, double ac_w, double au_w) {
    return 20.0 * ac_w * au_w * av_w;
}

double f_impact(double impact) {
    return impact == 0.0 ? 0.0 : 1.176;
}

double base_score(double impact, double exploitability) {
    const double raw = (0.6 * impact + 0.4 * exploitability - 1.5) * f_impact(impact);
    return std::clamp(round_to(raw, 1), 0.0, 10.0);
}

Scores score_categories(const Categories& cats) {
    Scores s;
    s.impact = impact_subscore(weight(cats.confidentiality), weight(cats.integrity),
                               weight(cats.availability));
    s.exploitability = exploitability_subscore(
        weight(cats.access_vector), weight(cats.access_complexity), weight(cats.authentication));
    s.base = base_score(s.impact, s.exploitability);
    return s;
}

std::string_view to_token(AccessVector v) {
    switch (v) {
        case AccessVector::Local: return "LOCAL";
        case AccessVector::AdjacentNetwork: return "ADJACENT_NETWORK";
        case AccessVector::Network: return "NETWORK";
    }
    throw Error("invalid access_vector value");
}

std::string_view to_token(AccessComplexity v) {
    switch (v) {
        case AccessComplexity::High: return "HIGH";
        case AccessComplexity::Medium: return "MEDIUM";
        case AccessComplexity::Low: return "LOW";
    }
    throw Error("invalid access_complexity value");
}

std::string_view to_token(Authentication v) {
    switch (v) {
        case Authentication::Multiple: return "MULTIPLE";
        case Authentication::Single: return "SINGLE";
        case Authentication::None: return "NONE";
    }
    throw Error("invalid authentication value");
}

std::string_view to_token(ImpactLevel v) {
    switch (v) {
        case ImpactLevel::None: return "NONE";
        case ImpactLevel::Partial: return "PARTIAL";
        case ImpactLevel::Complete: return "COMPLETE";
    }
    throw Error("invalid impact value");
}

AccessVector access_vector_from_token(std::string_view token) {
    if (token == "LOCAL") return AccessVector::Local;
    if (token == "ADJACENT_NETWORK") return AccessVector::AdjacentNetwork;
    if (token == "NETWORK") return AccessVector::Network;
    throw Error("unknown access_vector value: " + std::string(token));
}

AccessComplexity access_complexity_from_token(std::string_view token) {
    if (token == "HIGH") return AccessComplexity::High;
    if (token == "MEDIUM") return AccessComplexity::Medium;
    if (token == "LOW") return AccessComplexity::Low;
    throw Error("unknown access_complexity value: " + std::string(token));
}

Authentication authentication_from_token(std::string_view token) {
    if (token == "MULTIPLE") return Authentication::Multiple;
    if (token == "SINGLE") return Authentication::Single;
    if (token == "NONE") return Authentication::None;
    throw Error("unknown authentication value: " + std::string(token));
}

ImpactLevel impact_level_from_token(std::string_view token) {
    if (token == "NONE") return ImpactLevel::None;
    if (token == "PARTIAL") return ImpactLevel::Partial;
    if (token == "COMPLETE") return ImpactLevel::Complete;
    throw Error("unknown impact value: " + std::string(token));
}

namespace {

struct VectorCode {
    std::string_view component;
    char code;
};

char parse_code(std::string_view text, std::size_t& pos, std::string_view component) {
    const std::string prefix = lowercase_ascii(std::string(component) + ":");
    if (pos >= text.size()) throw Error("CVSS vector missing component " + std::string(component));
    std::string head = lowercase_ascii(text.substr(pos, prefix.size()));
    if (head != prefix) throw Error("CVSS vector missing component " + std::string(component));
    pos += prefix.size();
    if (pos >= text.size()) throw Error("CVSS vector missing value for " + std::string(component));
    char code = text[pos];
    if (code >= 'a' && code <= 'z') code = static_cast<char>(code - 'a' + 'A');
    ++pos;
    if (pos < text.size()) {
        if (text[pos] != '/') throw Error("malformed CVSS vector near component " + std::string(component));
        ++pos;
    }
    return code;
}

}  // namespace

Categories parse_vector(std::string_view text) {
    Categories out;
    std::size_t pos = 0;
    const char av = parse_code(text, pos, "AV");
    const char ac = parse_code(text, pos, "AC");
    const char au = parse_code(text, pos, "Au");
    const char c = parse_code(text, pos, "C");
    const char i = parse_code(text, pos, "I");
    const char a = parse_code(text, pos, "A");
    if (pos != text.size()) throw Error("trailing data in CVSS vector: " + std::string(text));

    switch (av) {
        case 'L': out.access_vector = AccessVector::Local; break;
        case 'A': out.access_vector = AccessVector::AdjacentNetwork; break;
        case 'N': out.access_vector = AccessVector::Network; break;
        default: throw Error(std::string("unknown code for AV: ") + av);
    }
    switch (ac) {
        case 'H': out.access_complexity = AccessComplexity::High; break;
        case 'M': out.access_complexity = AccessComplexity::Medium; break;
        case 'L': out.access_complexity = AccessComplexity::Low; break;
        default: throw Error(std::string("unknown code for AC: ") + ac);
    }
    switch (au) {
        case 'M': out.authentication = Authentication::Multiple; break;
        case 'S': out.authentication = Authentication::Single; break;
        case 'N': out.authentication = Authentication::None; break;
        default: throw Error(std::string("unknown code for Au: ") + au);
    }
    auto impact_of = [](char code, std::string_view comp) {
        switch (code) {
            case 'N': return ImpactLevel::None;
            case 'P': return ImpactLevel::Partial;
            case 'C': return ImpactLevel::Complete;
            default: throw Error("unknown code for " + std::string(comp) + ": " + code);
        }
    };
    out.confidentiality = impact_of(c, "C");
    out.integrity = impact_of(i, "I");
    out.availability = impact_of(a, "A");
    return out;
}

std::string format_vector(const Categories& cats) {
    auto av = [&] {
        switch (cats.access_vector) {
            case AccessVector::Local: return 'L';
            case AccessVector::AdjacentNetwork: return 'A';
            case AccessVector::Network: return 'N';
        }
        throw Error("invalid access_vector value");
    }();
    auto ac = [&] {
        switch (cats.access_complexity) {
            case AccessComplexity::High: return 'H';
            case AccessComplexity::Medium: return 'M';
            case AccessComplexity::Low: return 'L';
        }
        throw Error("invalid access_complexity value");
    }();
    auto au = [&] {
        switch (cats.authentication) {
            case Authentication::Multiple: return 'M';
            case Authentication::Single: return 'S';
            case Authentication::None: return 'N';
        }
        throw Error("invalid authentication value");
    }();
    auto imp = [](ImpactLevel v) {
        switch (v) {
            case ImpactLevel::None: return 'N';
            case ImpactLevel::Partial: return 'P';
            case ImpactLevel::Complete: return 'C';
        }
        throw Error("invalid impact value");
    };
    std::string out = "AV:";
    out += av;
    out += "/AC:";
    out += ac;
    out += "/Au:";
    out += au;
    out += "/C:";
    out += imp(cats.confidentiality);
    out += "/I:";
    out += imp(cats.integrity);
    out += "/A:";
    out += imp(cats.availability);
    return out;
}

std::array<std::string, 3> label_domain(std::string_view metric) {
    if (metric == "access_vector") return {"LOCAL", "ADJACENT_NETWORK", "NETWORK"};
    if (metric == "access_complexity") return {"HIGH", "MEDIUM", "LOW"};
    if (metric == "authentication") return {"MULTIPLE", "SINGLE", "NONE"};
    if (metric == "confidentiality" || metric == "integrity" || metric == "availability") {
        return {"NONE", "PARTIAL", "COMPLETE"};
    }
    throw Error("unknown CVSS metric: " + std::string(metric));
}

std::string label_of(const Categories& cats, std::string_view metric) {
    if (metric == "access_vector") return std::string(to_token(cats.access_vector));
    if (metric == "access_complexity") return std::string(to_token(cats.access_complexity));
    if (metric == "authentication") return std::string(to_token(cats.authentication));
    if (metric == "confidentiality") return std::string(to_token(cats.confidentiality));
    if (metric == "integrity") return std::string(to_token(cats.integrity));
    if (metric == "availability") return std::string(to_token(cats.availability));
    throw Error("unknown CVSS metric: " + std::string(metric));
}

Categories categories_from_labels(const std::array<std::string, 6>& labels) {
    Categories cats;
    cats.access_vector = access_vector_from_token(labels[0]);
    cats.access_complexity = access_complexity_from_token(labels[1]);
    cats.authentication = authentication_from_token(labels[2]);
    cats.confidentiality = impact_level_from_token(labels[3]);
    cats.integrity = impact_level_from_token(labels[4]);
    cats.availability = impact_level_from_token(labels[5]);
    return cats;
}

}  // namespace iotsec::cvss
