#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "awe/corpus.hpp"
#include "awe/embedding_io.hpp"

namespace awe {

// Synthetic entailment data driven by a hidden one-way word-implication
// relation. Every rule pairs two words whose pretrained vectors are nearly
// parallel, so cosine similarity cannot tell the direction apart:
//
//   entailment:         premise holds the source word, hypothesis the target
//   neutral (reversed): premise holds the target, hypothesis the source
//   neutral (unrelated): hypothesis holds a word from a different rule
//
// The remaining slots are filled with filler words from one of several
// disjoint filler groups, so two corpora can share rules without sharing
// their filler vocabulary.

struct SyntheticWorldConfig {
    std::size_t rules = 80;
    std::size_t filler_groups = 2;
    std::size_t fillers_per_group = 20;
    std::size_t dim = 16;
    double min_rule_cosine = 0.98;
    double max_rule_cosine = 0.995;
    std::uint64_t seed = 2024;
};

struct ImplicationRule {
    std::string source;  ///< entails `target`
    std::string target;
};

struct SyntheticWorld {
    std::vector<ImplicationRule> rules;
    std::vector<std::vector<std::string>> filler_groups;
    EmbeddingTable vectors;  ///< "pretrained" vectors for every word
};

SyntheticWorld make_world(const SyntheticWorldConfig& config);

struct SyntheticCorpusConfig {
    std::size_t size = 1000;
    std::size_t filler_group = 0;
    std::size_t premise_fillers = 3;
    std::size_t hypothesis_fillers = 2;
    double entailment_fraction = 0.5;
    double reversed_fraction = 0.25;  ///< remainder is unrelated-neutral
    std::uint64_t seed = 1;
};

std::vector<SentencePair> make_corpus(const SyntheticWorld& world, const SyntheticCorpusConfig& config);

/// Writes a corpus as SNLI-style JSONL.
void write_snli_jsonl(const std::vector<SentencePair>& pairs, const std::string& path);

}  // namespace awe
