#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace awe {

enum class Label { Entailment = 0, Neutral = 1, Contradiction = 2 };

std::string_view label_name(Label label);

using Tokens = std::vector<std::string>;

struct SentencePair {
    Tokens premise;
    Tokens hypothesis;
    Label label = Label::Entailment;

    bool operator==(const SentencePair&) const = default;
};

struct Corpus {
    std::vector<SentencePair> pairs;
    /// Lines that yielded no pair: blank lines, gold label "-", or a side
    /// that tokenizes to nothing.
    std::size_t skipped = 0;
};

enum class CorpusFormat { Snli, SciTail };

/// Lowercases, splits on Unicode whitespace, and trims non-alphanumeric
/// characters from both ends of each token. Empty tokens are dropped.
Tokens tokenize(std::string_view text);

/// SNLI JSONL: one object per line with gold_label, sentence1, sentence2.
Corpus parse_snli(std::istream& in);

/// SciTail TSV: premise TAB hypothesis TAB {entails|neutral}.
Corpus parse_scitail(std::istream& in);

Corpus parse_corpus(std::istream& in, CorpusFormat format);

/// Reads a corpus file; the format follows the extension (".jsonl"/".json"
/// -> SNLI, anything else -> SciTail TSV).
Corpus load_corpus_file(const std::string& path);
CorpusFormat format_for_path(const std::string& path);

}  // namespace awe
