#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>

#include "awe/corpus.hpp"
#include "awe/embedding_io.hpp"

namespace awe {

/// Directed (premise word, hypothesis word) pair.
struct WordPair {
    std::string premise_word;
    std::string hypothesis_word;

    auto operator<=>(const WordPair&) const = default;
};

/// Multiset of word pairs, ordered by (premise_word, hypothesis_word).
class WordPairSet {
public:
    using Map = std::map<WordPair, std::uint64_t>;

    void add(const WordPair& pair, std::uint64_t count = 1);
    void merge(const WordPairSet& other);
    bool contains(const WordPair& pair) const { return counts_.count(pair) != 0; }
    std::uint64_t count(const WordPair& pair) const;

    std::size_t distinct() const noexcept { return counts_.size(); }
    std::uint64_t total() const noexcept { return total_; }
    bool empty() const noexcept { return counts_.empty(); }
    const Map& counts() const noexcept { return counts_; }

    bool operator==(const WordPairSet& other) const { return counts_ == other.counts_; }

private:
    Map counts_;
    std::uint64_t total_ = 0;
};

struct ExtractionStats {
    std::uint64_t n_ent_pairs_raw = 0;  ///< total count of U_ent
    std::uint64_t n_neu_pairs = 0;      ///< total count of U_neu
    std::uint64_t n_final = 0;          ///< total count of U
    std::uint64_t n_oov_tokens_skipped = 0;
};

/// Every (w in premise, c in hypothesis) with cosine(w, c) > threshold.
/// Tokens missing from the table or with zero-norm vectors are skipped.
WordPairSet candidate_pairs(const SentencePair& pair, const EmbeddingTable& table,
                            double threshold);

/// U = U_ent minus every pair type that occurs in U_neu. Contradiction pairs
/// are ignored.
WordPairSet extract(std::span<const SentencePair> corpus, const EmbeddingTable& table,
                    double t_plus, double t_minus, ExtractionStats* stats = nullptr);

/// TSV "premise<TAB>hypothesis<TAB>count", sorted by (premise, hypothesis).
void save_pairs(const WordPairSet& set, std::ostream& out);
WordPairSet load_pairs(std::istream& in);

void save_pairs_file(const WordPairSet& set, const std::string& path);
WordPairSet load_pairs_file(const std::string& path);

}  // namespace awe
