#include "awe/pair_extraction.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <vector>

namespace awe {

void WordPairSet::add(const WordPair& pair, std::uint64_t count) {
    if (count == 0) throw Error("word pair count must be positive");
    counts_[pair] += count;
    total_ += count;
}

void WordPairSet::merge(const WordPairSet& other) {
    for (const auto& [pair, count] : other.counts_) add(pair, count);
}

std::uint64_t WordPairSet::count(const WordPair& pair) const {
    auto it = counts_.find(pair);
    return it == counts_.end() ? 0 : it->second;
}

namespace {

struct ResolvedToken {
    const std::string* token;
    std::optional<std::span<const double>> vec;  // empty when OOV or zero-norm
};

std::vector<ResolvedToken> resolve(const Tokens& tokens, const EmbeddingTable& table,
                                   std::uint64_t& oov) {
    std::vector<ResolvedToken> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) {
        ResolvedToken entry{&t, std::nullopt};
        if (auto row = table.find(t)) {
            bool nonzero = false;
            for (double v : *row) nonzero = nonzero || v != 0.0;
            if (nonzero) entry.vec = *row;
        }
        if (!entry.vec) ++oov;
        out.push_back(entry);
    }
    return out;
}

WordPairSet candidates_impl(const SentencePair& pair, const EmbeddingTable& table,
                            double threshold, std::uint64_t& oov) {
    WordPairSet out;
    const auto premise = resolve(pair.premise, table, oov);
    const auto hypothesis = resolve(pair.hypothesis, table, oov);
    for (const auto& w : premise) {
        if (!w.vec) continue;
        for (const auto& c : hypothesis) {
            if (c.vec && cosine(*w.vec, *c.vec) > threshold) out.add({*w.token, *c.token});
        }
    }
    return out;
}

}  // namespace

WordPairSet candidate_pairs(const SentencePair& pair, const EmbeddingTable& table,
                            double threshold) {
    std::uint64_t oov = 0;
    return candidates_impl(pair, table, threshold, oov);
}

WordPairSet extract(std::span<const SentencePair> corpus, const EmbeddingTable& table,
                    double t_plus, double t_minus, ExtractionStats* stats) {
    if (!(t_plus > 0.0 && t_plus <= 1.0) || !(t_minus > 0.0 && t_minus <= 1.0)) {
        throw Error("thresholds must lie in (0, 1]");
    }
    WordPairSet entailed, neutral;
    std::uint64_t oov = 0;
    for (const auto& pair : corpus) {
        switch (pair.label) {
            case Label::Entailment: entailed.merge(candidates_impl(pair, table, t_plus, oov)); break;
            case Label::Neutral: neutral.merge(candidates_impl(pair, table, t_minus, oov)); break;
            case Label::Contradiction: break;
        }
    }
    WordPairSet clean;
    for (const auto& [wp, count] : entailed.counts()) {
        if (!neutral.contains(wp)) clean.add(wp, count);
    }
    if (stats) {
        stats->n_ent_pairs_raw = entailed.total();
        stats->n_neu_pairs = neutral.total();
        stats->n_final = clean.total();
        stats->n_oov_tokens_skipped = oov;
    }
    return clean;
}

void save_pairs(const WordPairSet& set, std::ostream& out) {
    for (const auto& [wp, count] : set.counts()) {
        out << wp.premise_word << '\t' << wp.hypothesis_word << '\t' << count << '\n';
    }
    out.flush();
    if (!out) throw Error("write failure while saving word pairs");
}

WordPairSet load_pairs(std::istream& in) {
    WordPairSet set;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto t1 = line.find('\t');
        const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
        if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos) {
            throw ParseError(lineno, "expected 3 tab-separated fields");
        }
        WordPair wp{line.substr(0, t1), line.substr(t1 + 1, t2 - t1 - 1)};
        if (wp.premise_word.empty() || wp.hypothesis_word.empty()) {
            throw ParseError(lineno, "empty word");
        }
        const std::string_view count_text(line.data() + t2 + 1, line.size() - t2 - 1);
        std::uint64_t count = 0;
        auto [ptr, ec] = std::from_chars(count_text.data(), count_text.data() + count_text.size(), count);
        if (ec != std::errc() || ptr != count_text.data() + count_text.size()) {
            throw ParseError(lineno, "malformed count '" + std::string(count_text) + "'");
        }
        if (count < 1) throw ParseError(lineno, "count must be at least 1");
        if (set.contains(wp)) throw ParseError(lineno, "duplicate word pair");
        set.add(wp, count);
    }
    if (in.bad()) throw Error("read failure while loading word pairs");
    return set;
}

void save_pairs_file(const WordPairSet& set, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path);
    save_pairs(set, out);
}

WordPairSet load_pairs_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open pair file: " + path);
    try {
        return load_pairs(in);
    } catch (const ParseError& e) {
        throw ParseError(e.line(), e.detail(), path);
    }
}

}  // namespace awe
