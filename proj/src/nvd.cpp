#include "iotsec/nvd.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "iotsec/util.hpp"

namespace iotsec::nvd {

using nlohmann::json;

namespace {

std::optional<std::string> first_english_description(const json& cve) {
    const auto* data = cve.contains("description") && cve["description"].contains("description_data")
                           ? &cve["description"]["description_data"]
                           : nullptr;
    if (data == nullptr || !data->is_array()) return std::nullopt;
    for (const auto& entry : *data) {
        if (entry.value("lang", "") == "en" && entry.contains("value")) {
            return entry["value"].get<std::string>();
        }
    }
    return std::nullopt;
}

int year_from_item(const json& item, const std::string& id) {
    // publishedDate looks like "2019-12-31T20:15Z"; fall back to the id year.
    if (item.contains("publishedDate") && item["publishedDate"].is_string()) {
        const auto date = item["publishedDate"].get<std::string>();
        if (date.size() >= 4) {
            const int year = std::atoi(date.substr(0, 4).c_str());
            if (year > 0) return year;
        }
    }
    // "CVE-2019-0001" -> 2019
    if (id.size() >= 8 && id.rfind("CVE-", 0) == 0) {
        const int year = std::atoi(id.substr(4, 4).c_str());
        if (year > 0) return year;
    }
    return 0;
}

std::optional<cvss::Categories> categories_from_item(const json& metric_block) {
    if (!metric_block.contains("cvssV2")) return std::nullopt;
    const auto& v2 = metric_block["cvssV2"];
    const char* fields[] = {"accessVector",          "accessComplexity", "authentication",
                            "confidentialityImpact", "integrityImpact",  "availabilityImpact"};
    for (const char* f : fields) {
        if (!v2.contains(f) || !v2[f].is_string()) return std::nullopt;
    }
    std::array<std::string, 6> labels = {
        v2["accessVector"].get<std::string>(),        v2["accessComplexity"].get<std::string>(),
        v2["authentication"].get<std::string>(),      v2["confidentialityImpact"].get<std::string>(),
        v2["integrityImpact"].get<std::string>(),     v2["availabilityImpact"].get<std::string>()};
    return cvss::categories_from_labels(labels);
}

std::optional<cvss::PrivilegeFlags> privileges_from_item(const json& metric_block) {
    const char* fields[] = {"obtainAllPrivilege", "obtainUserPrivilege", "obtainOtherPrivilege"};
    for (const char* f : fields) {
        if (!metric_block.contains(f) || !metric_block[f].is_boolean()) return std::nullopt;
    }
    cvss::PrivilegeFlags flags;
    flags.all_privilege = metric_block["obtainAllPrivilege"].get<bool>();
    flags.user_privilege = metric_block["obtainUserPrivilege"].get<bool>();
    flags.other_privilege = metric_block["obtainOtherPrivilege"].get<bool>();
    return flags;
}

}  // namespace

FeedResult parse_feed(std::string_view feed_bytes, const std::string& source) {
    json doc;
    try {
        doc = json::parse(feed_bytes);
    } catch (const json::parse_error& e) {
        throw Error("malformed feed " + source + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("CVE_Items") || !doc["CVE_Items"].is_array()) {
        throw Error("feed " + source + " has no CVE_Items array");
    }

    FeedResult out;
    for (const auto& item : doc["CVE_Items"]) {
        ++out.report.items;
        const json* cve = item.contains("cve") ? &item["cve"] : nullptr;
        std::string id;
        if (cve != nullptr && cve->contains("CVE_data_meta") &&
            (*cve)["CVE_data_meta"].contains("ID") && (*cve)["CVE_data_meta"]["ID"].is_string()) {
            id = (*cve)["CVE_data_meta"]["ID"].get<std::string>();
        }
        std::optional<std::string> description =
            cve != nullptr ? first_english_description(*cve) : std::nullopt;
        if (id.empty() || !description.has_value() || trim(*description).empty()) {
            ++out.report.skipped;
            continue;
        }

        CveRecord record;
        record.id = id;
        record.description = *description;
        record.published_year = year_from_item(item, id);
        if (item.contains("impact") && item["impact"].contains("baseMetricV2")) {
            const auto& block = item["impact"]["baseMetricV2"];
            record.cvss_v2 = categories_from_item(block);
            record.privileges = privileges_from_item(block);
        }
        out.records.push_back(std::move(record));
        ++out.report.parsed;
    }
    return out;
}

std::vector<CveRecord> filter_by_keywords(const std::vector<CveRecord>& records,
                                          const std::set<std::string>& keywords) {
    if (keywords.empty()) throw Error("keyword set must not be empty");
    std::vector<CveRecord> out;
    for (const auto& record : records) {
        const std::string haystack = lowercase_ascii(record.description);
        const bool hit = std::any_of(keywords.begin(), keywords.end(), [&](const std::string& kw) {
            return !kw.empty() && haystack.find(kw) != std::string::npos;
        });
        if (hit) out.push_back(record);
    }
    return out;
}

CorpusSplit split_dataset(const std::vector<CveRecord>& records, const SplitRatios& ratios,
                          std::uint64_t seed) {
    if (records.size() < 10) {
        throw Error("split needs at least 10 records, got " + std::to_string(records.size()));
    }
    const double ratio_sum = ratios.train + ratios.validation + ratios.test;
    if (std::abs(ratio_sum - 1.0) > 1e-9) throw Error("split ratios must sum to 1");
    for (const auto& record : records) {
        if (!record.scored()) {
            throw Error("record " + record.id + " lacks CVSS metrics or privileges; cannot split");
        }
    }

    std::vector<std::size_t> order(records.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(seed);
    shuffle(order, rng);

    const std::size_t n = records.size();
    const std::size_t n_validation = static_cast<std::size_t>(n * ratios.validation);
    const std::size_t n_test = static_cast<std::size_t>(n * ratios.test);
    const std::size_t n_train = n - n_validation - n_test;

    CorpusSplit split;
    split.train.reserve(n_train);
    split.validation.reserve(n_validation);
    split.test.reserve(n_test);
    for (std::size_t i = 0; i < n; ++i) {
        const CveRecord& record = records[order[i]];
        if (i < n_train) {
            split.train.push_back(record);
        } else if (i < n_train + n_validation) {
            split.validation.push_back(record);
        } else {
            split.test.push_back(record);
        }
    }
    return split;
}

namespace {

json categories_to_json(const cvss::Categories& cats) {
    json j;
    j["access_vector"] = cvss::to_token(cats.access_vector);
    j["access_complexity"] = cvss::to_token(cats.access_complexity);
    j["authentication"] = cvss::to_token(cats.authentication);
    j["confidentiality"] = cvss::to_token(cats.confidentiality);
    j["integrity"] = cvss::to_token(cats.integrity);
    j["availability"] = cvss::to_token(cats.availability);
    return j;
}

cvss::Categories categories_from_json(const json& j) {
    std::array<std::string, 6> labels = {
        j.at("access_vector").get<std::string>(),  j.at("access_complexity").get<std::string>(),
        j.at("authentication").get<std::string>(), j.at("confidentiality").get<std::string>(),
        j.at("integrity").get<std::string>(),      j.at("availability").get<std::string>()};
    return cvss::categories_from_labels(labels);
}

}  // namespace

std::string record_to_json_line(const CveRecord& record) {
    nlohmann::ordered_json j;
    j["id"] = record.id;
    j["description"] = record.description;
    j["published_year"] = record.published_year;
    if (record.cvss_v2.has_value()) j["cvss_v2"] = categories_to_json(*record.cvss_v2);
    if (record.privileges.has_value()) {
        j["privileges"] = {{"all_privilege", record.privileges->all_privilege},
                           {"user_privilege", record.privileges->user_privilege},
                           {"other_privilege", record.privileges->other_privilege}};
    }
    return j.dump();
}

CveRecord record_from_json_line(std::string_view line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw Error(std::string("malformed record line: ") + e.what());
    }
    CveRecord record;
    record.id = j.at("id").get<std::string>();
    record.description = j.at("description").get<std::string>();
    record.published_year = j.value("published_year", 0);
    if (record.id.empty()) throw Error("record with empty id");
    if (trim(record.description).empty()) throw Error("record " + record.id + " has empty description");
    if (j.contains("cvss_v2")) record.cvss_v2 = categories_from_json(j["cvss_v2"]);
    if (j.contains("privileges")) {
        const auto& p = j["privileges"];
        cvss::PrivilegeFlags flags;
        flags.all_privilege = p.at("all_privilege").get<bool>();
        flags.user_privilege = p.at("user_privilege").get<bool>();
        flags.other_privilege = p.at("other_privilege").get<bool>();
        record.privileges = flags;
    }
    return record;
}

std::string records_to_ndjson(const std::vector<CveRecord>& records) {
    std::string out;
    for (const auto& record : records) {
        out += record_to_json_line(record);
        out += '\n';
    }
    return out;
}

std::vector<CveRecord> records_from_ndjson(std::string_view text) {
    std::vector<CveRecord> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        if (!trim(line).empty()) out.push_back(record_from_json_line(line));
        pos = end + 1;
    }
    return out;
}

}  // namespace iotsec::nvd
