#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace iotsec::clf {

// The pinned English stop-word list (data/stopwords.txt, embedded at build
// time). Lowercase, one word per entry.
const std::set<std::string>& default_stopwords();

// Lowercases, splits on runs of non-alphanumeric ASCII, drops stop words.
// Bytes >= 0x80 pass through untouched inside tokens.
std::vector<std::string> preprocess(std::string_view description,
                                    const std::set<std::string>& stopwords = default_stopwords());

struct NgramRange {
    int lo = 1;
    int hi = 3;
};

// Term -> dense column index; columns ordered lexicographically by n-gram
// text. N-grams are tokens joined by single spaces.
class Vocabulary {
public:
    Vocabulary() = default;
    Vocabulary(std::vector<std::pair<std::string, std::size_t>> terms_with_df,
               std::size_t corpus_size, NgramRange range);

    std::size_t size() const { return terms_.size(); }
    std::size_t corpus_size() const { return corpus_size_; }
    NgramRange ngram_range() const { return range_; }

    // Index of a term, or npos when absent.
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t index_of(std::string_view term) const;
    std::size_t document_frequency(std::string_view term) const;

    // (term, df) in column order.
    const std::vector<std::pair<std::string, std::size_t>>& terms() const { return terms_; }

    std::string to_tsv() const;
    static Vocabulary from_tsv(std::string_view text);

private:
    std::vector<std::pair<std::string, std::size_t>> terms_;  // sorted by term
    std::size_t corpus_size_ = 0;
    NgramRange range_;
};

// Every contiguous n-gram (lo..hi) with document frequency >= min_df.
// Throws when the corpus is empty or nothing clears min_df.
Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& corpus, NgramRange range,
                            std::size_t min_df);

// Sparse L2-normalized TF-IDF vector: strictly increasing indices, positive
// weights. Empty when the document shares no term with the vocabulary.
struct FeatureVector {
    std::vector<std::pair<std::uint32_t, double>> entries;

    bool empty() const { return entries.empty(); }
    double norm() const;
};

// tf = raw in-document count, idf = ln((1+N)/(1+df)) + 1, then L2 normalize.
FeatureVector vectorize(const std::vector<std::string>& tokens, const Vocabulary& vocab);

}  // namespace iotsec::clf
