#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "awe/common.hpp"
#include "awe/embedding_io.hpp"
#include "awe/pair_extraction.hpp"

namespace awe {

inline constexpr std::string_view kUnkPremise = "<UNK1>";
inline constexpr std::string_view kUnkHypothesis = "<UNK2>";

/// Premise-side u-vectors and hypothesis-side v-vectors. Each table carries
/// its UNK row as the last entry.
class AsymmetricEmbeddings {
public:
    AsymmetricEmbeddings() = default;
    AsymmetricEmbeddings(EmbeddingTable premise, EmbeddingTable hypothesis);

    const EmbeddingTable& premise_table() const noexcept { return premise_; }
    const EmbeddingTable& hypothesis_table() const noexcept { return hypothesis_; }
    std::size_t dim() const noexcept { return premise_.dim(); }

    std::size_t unk_premise_id() const noexcept { return unk_premise_; }
    std::size_t unk_hypothesis_id() const noexcept { return unk_hypothesis_; }

    /// Row id for a premise-side word, falling back to UNK1.
    std::size_t premise_id(std::string_view word) const;
    /// Row id for a hypothesis-side word, falling back to UNK2.
    std::size_t hypothesis_id(std::string_view word) const;

    std::span<const double> u(std::string_view word) const { return premise_.row(premise_id(word)); }
    std::span<const double> v(std::string_view word) const {
        return hypothesis_.row(hypothesis_id(word));
    }

    /// Mutable access for the trainer.
    EmbeddingTable& premise_table_mut() noexcept { return premise_; }
    EmbeddingTable& hypothesis_table_mut() noexcept { return hypothesis_; }

private:
    EmbeddingTable premise_;
    EmbeddingTable hypothesis_;
    std::size_t unk_premise_ = 0;
    std::size_t unk_hypothesis_ = 0;
};

struct TrainConfig {
    std::size_t dim = 300;
    std::size_t negatives = 5;
    std::size_t epochs = 5;
    double initial_step_size = 0.025;
    double distribution_exponent = 1.0;
    std::uint64_t seed = 1;

    void validate() const;
};

/// Walker/Vose alias sampler over hypothesis-side words, with weights equal
/// to their total occurrence count in U raised to `exponent`. UNK2 is not
/// part of the support.
class NegativeSampler {
public:
    NegativeSampler(std::span<const double> weights, double exponent);

    std::size_t sample(Rng& rng) const;
    std::size_t size() const noexcept { return probability_.size(); }
    /// Normalized target probabilities.
    const std::vector<double>& distribution() const noexcept { return target_; }

private:
    std::vector<double> target_;
    std::vector<double> probability_;
    std::vector<std::size_t> alias_;
};

/// Stable log(sigmoid(x)).
double log_sigmoid(double x);
double sigmoid(double x);

/// Vector views entering the per-pair objective. `negatives` may be empty.
struct PairTerms {
    std::span<const double> u_w;
    std::span<const double> v_c;
    std::vector<std::span<const double>> negatives;
    std::span<const double> v_unk2;
    std::span<const double> u_unk1;
};

struct PairGradients {
    Vector u_w;
    Vector v_c;
    std::vector<Vector> negatives;
    Vector v_unk2;
    Vector u_unk1;
};

/// log s(v_c.u_w) + sum log s(-v_n.u_w) + log s(-v_unk2.u_w) + log s(-v_c.u_unk1)
double pair_objective(const PairTerms& terms);

/// Gradient of pair_objective with respect to each vector in `terms`.
PairGradients pair_gradients(const PairTerms& terms);

using EpochObserver = std::function<void(std::size_t epoch, const AsymmetricEmbeddings&)>;

/// Stochastic gradient ascent on the UNK-augmented negative-sampling
/// objective. `resume`, when given, seeds rows for tokens it shares with the
/// new vocabularies; its dimension must match `config.dim`.
AsymmetricEmbeddings train(const WordPairSet& pairs, const TrainConfig& config,
                           const AsymmetricEmbeddings* resume = nullptr,
                           const EpochObserver& on_epoch = {});

/// The state `train` starts from before its first update.
AsymmetricEmbeddings initial_embeddings(const WordPairSet& pairs, const TrainConfig& config,
                                        const AsymmetricEmbeddings* resume = nullptr);

/// Mean pair_objective over every occurrence in `pairs`, with negatives drawn
/// from a fresh sampler seeded by `seed`.
double mean_objective(const AsymmetricEmbeddings& emb, const WordPairSet& pairs,
                      std::size_t negatives, double exponent, std::uint64_t seed);

/// sigma(v_c . u_w): how strongly premise word w entails hypothesis word c.
double entailment_score(const AsymmetricEmbeddings& emb, std::string_view w, std::string_view c);

/// Writes `<prefix>.premise.txt`, `<prefix>.hypothesis.txt`.
void save_asymmetric(const AsymmetricEmbeddings& emb, const std::string& prefix);
AsymmetricEmbeddings load_asymmetric(const std::string& prefix);

}  // namespace awe
