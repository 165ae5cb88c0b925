#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "iotsec/cvss.hpp"

namespace iotsec::nvd {

struct CveRecord {
    std::string id;
    std::string description;
    int published_year = 0;
    std::optional<cvss::Categories> cvss_v2;
    std::optional<cvss::PrivilegeFlags> privileges;

    // Usable for training: carries both the CVSS categories and the
    // privilege flags.
    bool scored() const { return cvss_v2.has_value() && privileges.has_value(); }
};

struct ParseReport {
    std::size_t items = 0;    // feed items seen
    std::size_t parsed = 0;   // records produced
    std::size_t skipped = 0;  // items missing id or description

    // Invariant: parsed + skipped == items.
};

struct FeedResult {
    std::vector<CveRecord> records;
    ParseReport report;
};

// Parses one NVD JSON 1.1 feed document. Malformed JSON or a missing
// CVE_Items array raises Error naming the byte offset and source. Items
// without an id or a non-empty English description are skipped and counted.
// `source` is used only in error messages.
FeedResult parse_feed(std::string_view feed_bytes, const std::string& source = "<feed>");

// Records whose lowercased description contains at least one keyword as a
// substring. Keywords must be lowercase and non-empty. Order preserved.
std::vector<CveRecord> filter_by_keywords(const std::vector<CveRecord>& records,
                                          const std::set<std::string>& keywords);

struct SplitRatios {
    double train = 0.8;
    double validation = 0.1;
    double test = 0.1;
};

struct CorpusSplit {
    std::vector<CveRecord> train;
    std::vector<CveRecord> validation;
    std::vector<CveRecord> test;
};

// Seeded shuffle then cut. All records must be scored; fewer than 10 records
// is an error. Part sizes: validation and test get floor(n * ratio), train
// takes the remainder (reproduces the conventional 80/10/10 cut to within
// one record).
CorpusSplit split_dataset(const std::vector<CveRecord>& records, const SplitRatios& ratios,
                          std::uint64_t seed);

// NDJSON (one record per line) serialization.
std::string record_to_json_line(const CveRecord& record);
CveRecord record_from_json_line(std::string_view line);
std::string records_to_ndjson(const std::vector<CveRecord>& records);
std::vector<CveRecord> records_from_ndjson(std::string_view text);

}  // namespace iotsec::nvd
