#include "iotsec/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_map>

#include "iotsec/stopwords_data.hpp"
#include "iotsec/util.hpp"

namespace iotsec::clf {

const std::set<std::string>& default_stopwords() {
    static const std::set<std::string> words = [] {
        std::set<std::string> out;
        std::istringstream in{std::string(kStopwordsData)};
        std::string line;
        while (std::getline(in, line)) {
            line = trim(line);
            if (!line.empty() && line[0] != '#') out.insert(lowercase_ascii(line));
        }
        return out;
    }();
    return words;
}

namespace {

bool is_token_char(unsigned char c) {
    if (c >= 0x80) return true;  // non-ASCII bytes stay inside tokens
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

}  // namespace

std::vector<std::string> preprocess(std::string_view description,
                                    const std::set<std::string>& stopwords) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            if (stopwords.find(current) == stopwords.end()) tokens.push_back(current);
            current.clear();
        }
    };
    for (unsigned char c : description) {
        if (is_token_char(c)) {
            if (c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c - 'A' + 'a');
            current.push_back(static_cast<char>(c));
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

Vocabulary::Vocabulary(std::vector<std::pair<std::string, std::size_t>> terms_with_df,
                       std::size_t corpus_size, NgramRange range)
    : terms_(std::move(terms_with_df)), corpus_size_(corpus_size), range_(range) {
    std::sort(terms_.begin(), terms_.end());
}

std::size_t Vocabulary::index_of(std::string_view term) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), term,
                               [](const auto& entry, std::string_view t) { return entry.first < t; });
    if (it == terms_.end() || it->first != term) return npos;
    return static_cast<std::size_t>(it - terms_.begin());
}

std::size_t Vocabulary::document_frequency(std::string_view term) const {
    const std::size_t idx = index_of(term);
    return idx == npos ? 0 : terms_[idx].second;
}

std::string Vocabulary::to_tsv() const {
    std::string out = "# corpus_size=" + std::to_string(corpus_size_) +
                      " ngram_lo=" + std::to_string(range_.lo) +
                      " ngram_hi=" + std::to_string(range_.hi) + "\n";
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        out += terms_[i].first;
        out += '\t';
        out += std::to_string(i);
        out += '\t';
        out += std::to_string(terms_[i].second);
        out += '\n';
    }
    return out;
}

Vocabulary Vocabulary::from_tsv(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line)) throw Error("empty vocabulary file");
    std::size_t corpus_size = 0;
    NgramRange range;
    if (std::sscanf(line.c_str(), "# corpus_size=%zu ngram_lo=%d ngram_hi=%d", &corpus_size,
                    &range.lo, &range.hi) != 3) {
        throw Error("vocabulary file missing header line");
    }
    std::vector<std::pair<std::string, std::size_t>> terms;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::size_t tab1 = line.find('\t');
        const std::size_t tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
        if (tab2 == std::string::npos) throw Error("malformed vocabulary line: " + line);
        terms.emplace_back(line.substr(0, tab1),
                           static_cast<std::size_t>(std::stoull(line.substr(tab2 + 1))));
    }
    return Vocabulary(std::move(terms), corpus_size, range);
}

namespace {

template <typename Fn>
void for_each_ngram(const std::vector<std::string>& tokens, NgramRange range, Fn&& fn) {
    for (int n = range.lo; n <= range.hi; ++n) {
        if (n <= 0 || tokens.size() < static_cast<std::size_t>(n)) continue;
        for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
            std::string gram = tokens[i];
            for (std::size_t k = 1; k < static_cast<std::size_t>(n); ++k) {
                gram += ' ';
                gram += tokens[i + k];
            }
            fn(std::move(gram));
        }
    }
}

}  // namespace

Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& corpus, NgramRange range,
                            std::size_t min_df) {
    if (corpus.empty()) throw Error("cannot build vocabulary from an empty corpus");
    std::unordered_map<std::string, std::size_t> df;
    std::set<std::string> seen;  // per-document
    for (const auto& tokens : corpus) {
        seen.clear();
        for_each_ngram(tokens, range, [&](std::string gram) { seen.insert(std::move(gram)); });
        for (const auto& gram : seen) ++df[gram];
    }
    std::vector<std::pair<std::string, std::size_t>> kept;
    for (auto& [term, count] : df) {
        if (count >= min_df) kept.emplace_back(term, count);
    }
    if (kept.empty()) throw Error("empty vocabulary: no n-gram reaches min_df");
    return Vocabulary(std::move(kept), corpus.size(), range);
}

double FeatureVector::norm() const {
    double sum = 0.0;
    for (const auto& [idx, w] : entries) sum += w * w;
    return std::sqrt(sum);
}

FeatureVector vectorize(const std::vector<std::string>& tokens, const Vocabulary& vocab) {
    std::map<std::uint32_t, double> counts;
    for_each_ngram(tokens, vocab.ngram_range(), [&](std::string gram) {
        const std::size_t idx = vocab.index_of(gram);
        if (idx != Vocabulary::npos) counts[static_cast<std::uint32_t>(idx)] += 1.0;
    });

    FeatureVector out;
    if (counts.empty()) return out;

    const double n_docs = static_cast<double>(vocab.corpus_size());
    out.entries.reserve(counts.size());
    double norm_sq = 0.0;
    for (const auto& [idx, tf] : counts) {
        const double df = static_cast<double>(vocab.terms()[idx].second);
        const double idf = std::log((1.0 + n_docs) / (1.0 + df)) + 1.0;
        const double w = tf * idf;
        out.entries.emplace_back(idx, w);
        norm_sq += w * w;
    }
    const double norm = std::sqrt(norm_sq);
    for (auto& [idx, w] : out.entries) w /= norm;
    return out;
}

}  // namespace iotsec::clf
