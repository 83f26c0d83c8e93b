#include "awe/awe_trainer.hpp"

#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <utility>

namespace awe {

AsymmetricEmbeddings::AsymmetricEmbeddings(EmbeddingTable premise, EmbeddingTable hypothesis)
    : premise_(std::move(premise)), hypothesis_(std::move(hypothesis)) {
    if (premise_.dim() != hypothesis_.dim()) {
        throw Error("premise and hypothesis tables differ in dimension (" +
                    std::to_string(premise_.dim()) + " vs " + std::to_string(hypothesis_.dim()) +
                    ")");
    }
    auto unk1 = premise_.vocab().lookup(kUnkPremise);
    auto unk2 = hypothesis_.vocab().lookup(kUnkHypothesis);
    if (!unk1) throw Error("premise table lacks the " + std::string(kUnkPremise) + " row");
    if (!unk2) throw Error("hypothesis table lacks the " + std::string(kUnkHypothesis) + " row");
    unk_premise_ = *unk1;
    unk_hypothesis_ = *unk2;
}

std::size_t AsymmetricEmbeddings::premise_id(std::string_view word) const {
    return premise_.vocab().lookup(word).value_or(unk_premise_);
}

std::size_t AsymmetricEmbeddings::hypothesis_id(std::string_view word) const {
    return hypothesis_.vocab().lookup(word).value_or(unk_hypothesis_);
}

void TrainConfig::validate() const {
    if (dim < 1) throw Error("dim must be at least 1");
    if (epochs < 1) throw Error("epochs must be at least 1");
    if (!(initial_step_size > 0.0)) throw Error("initial step size must be positive");
    if (!(distribution_exponent >= 0.0)) throw Error("distribution exponent must be >= 0");
}

NegativeSampler::NegativeSampler(std::span<const double> weights, double exponent) {
    const std::size_t n = weights.size();
    if (n == 0) throw Error("negative sampler needs at least one word");
    target_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(weights[i] > 0.0)) throw Error("negative sampler weights must be positive");
        target_[i] = std::pow(weights[i], exponent);
    }
    const double total = std::accumulate(target_.begin(), target_.end(), 0.0);
    for (double& p : target_) p /= total;

    // Vose's alias construction.
    probability_.assign(n, 1.0);
    alias_.resize(n);
    std::iota(alias_.begin(), alias_.end(), std::size_t{0});
    std::vector<double> scaled(n);
    std::vector<std::size_t> small, large;
    for (std::size_t i = 0; i < n; ++i) {
        scaled[i] = target_[i] * static_cast<double>(n);
        (scaled[i] < 1.0 ? small : large).push_back(i);
    }
    while (!small.empty() && !large.empty()) {
        const std::size_t s = small.back();
        small.pop_back();
        const std::size_t l = large.back();
        probability_[s] = scaled[s];
        alias_[s] = l;
        scaled[l] = (scaled[l] + scaled[s]) - 1.0;
        if (scaled[l] < 1.0) {
            large.pop_back();
            small.push_back(l);
        }
    }
    // Leftovers are 1 up to rounding.
    for (std::size_t i : small) probability_[i] = 1.0;
    for (std::size_t i : large) probability_[i] = 1.0;
}

std::size_t NegativeSampler::sample(Rng& rng) const {
    const std::size_t column = rng.below(probability_.size());
    return rng.uniform() < probability_[column] ? column : alias_[column];
}

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double log_sigmoid(double x) {
    if (x >= 0.0) return -std::log1p(std::exp(-x));
    return x - std::log1p(std::exp(x));
}

namespace {

void check_dims(const PairTerms& t) {
    const std::size_t d = t.u_w.size();
    bool ok = t.v_c.size() == d && t.v_unk2.size() == d && t.u_unk1.size() == d;
    for (const auto& n : t.negatives) ok = ok && n.size() == d;
    if (!ok) throw std::invalid_argument("pair objective: vector dimensions differ");
}

double dotp(std::span<const double> a, std::span<const double> b) {
    return dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, Vector& y) {
    for (std::size_t k = 0; k < y.size(); ++k) y[k] += alpha * x[k];
}

}  // namespace

double pair_objective(const PairTerms& t) {
    check_dims(t);
    double obj = log_sigmoid(dotp(t.v_c, t.u_w));
    for (const auto& n : t.negatives) obj += log_sigmoid(-dotp(n, t.u_w));
    obj += log_sigmoid(-dotp(t.v_unk2, t.u_w));
    obj += log_sigmoid(-dotp(t.v_c, t.u_unk1));
    return obj;
}

PairGradients pair_gradients(const PairTerms& t) {
    check_dims(t);
    const std::size_t d = t.u_w.size();
    PairGradients g;
    g.u_w.assign(d, 0.0);
    g.v_c.assign(d, 0.0);
    g.v_unk2.assign(d, 0.0);
    g.u_unk1.assign(d, 0.0);

    const double pos = 1.0 - sigmoid(dotp(t.v_c, t.u_w));
    axpy(pos, t.v_c, g.u_w);
    axpy(pos, t.u_w, g.v_c);

    g.negatives.reserve(t.negatives.size());
    for (const auto& n : t.negatives) {
        const double s = sigmoid(dotp(n, t.u_w));
        axpy(-s, n, g.u_w);
        Vector gn(d, 0.0);
        axpy(-s, t.u_w, gn);
        g.negatives.push_back(std::move(gn));
    }

    const double s_unk2 = sigmoid(dotp(t.v_unk2, t.u_w));
    axpy(-s_unk2, t.v_unk2, g.u_w);
    axpy(-s_unk2, t.u_w, g.v_unk2);

    const double s_unk1 = sigmoid(dotp(t.v_c, t.u_unk1));
    axpy(-s_unk1, t.u_unk1, g.v_c);
    axpy(-s_unk1, t.v_c, g.u_unk1);
    return g;
}

namespace {

struct Occurrence {
    std::size_t w;
    std::size_t c;
};

struct TrainingLayout {
    Vocabulary premise;
    Vocabulary hypothesis;
    std::vector<Occurrence> occurrences;
    std::vector<double> hypothesis_weights;  // excludes UNK2
};

TrainingLayout layout_for(const WordPairSet& pairs) {
    std::set<std::string> premise_words, hypothesis_words;
    for (const auto& [wp, count] : pairs.counts()) {
        if (wp.premise_word == kUnkPremise || wp.hypothesis_word == kUnkHypothesis) {
            throw Error("word pairs may not use the reserved UNK tokens");
        }
        premise_words.insert(wp.premise_word);
        hypothesis_words.insert(wp.hypothesis_word);
    }
    TrainingLayout layout;
    for (const auto& w : premise_words) layout.premise.add(w);
    layout.premise.add(kUnkPremise);
    for (const auto& c : hypothesis_words) layout.hypothesis.add(c);
    layout.hypothesis.add(kUnkHypothesis);

    layout.hypothesis_weights.assign(hypothesis_words.size(), 0.0);
    for (const auto& [wp, count] : pairs.counts()) {
        const std::size_t w = *layout.premise.lookup(wp.premise_word);
        const std::size_t c = *layout.hypothesis.lookup(wp.hypothesis_word);
        layout.hypothesis_weights[c] += static_cast<double>(count);
        for (std::uint64_t k = 0; k < count; ++k) layout.occurrences.push_back({w, c});
    }
    return layout;
}

// Draws up to `k` negatives distinct from `positive`; a slot whose 100
// redraws all collide stays empty.
void draw_negatives(const NegativeSampler& sampler, Rng& rng, std::size_t positive,
                    std::size_t k, std::vector<std::size_t>& out) {
    out.clear();
    for (std::size_t slot = 0; slot < k; ++slot) {
        for (int attempt = 0; attempt < 100; ++attempt) {
            const std::size_t n = sampler.sample(rng);
            if (n != positive) {
                out.push_back(n);
                break;
            }
        }
    }
}

void apply(std::span<double> row, double step, const Vector& grad) {
    for (std::size_t k = 0; k < row.size(); ++k) row[k] += step * grad[k];
}

AsymmetricEmbeddings init_embeddings(const TrainingLayout& layout, const TrainConfig& config,
                                     Rng& rng, const AsymmetricEmbeddings* resume) {
    const std::size_t dim = config.dim;
    const double bound = 0.5 / static_cast<double>(dim);
    auto init_table = [&](const Vocabulary& vocab, const EmbeddingTable* previous) {
        std::vector<double> values(vocab.size() * dim);
        for (double& x : values) x = rng.uniform(-bound, bound);
        if (previous) {
            for (std::size_t id = 0; id < vocab.size(); ++id) {
                if (auto row = previous->find(vocab.token_of(id))) {
                    std::copy(row->begin(), row->end(), values.begin() + id * dim);
                }
            }
        }
        return EmbeddingTable(vocab, dim, std::move(values));
    };
    EmbeddingTable premise = init_table(layout.premise, resume ? &resume->premise_table() : nullptr);
    EmbeddingTable hypothesis =
        init_table(layout.hypothesis, resume ? &resume->hypothesis_table() : nullptr);
    return AsymmetricEmbeddings(std::move(premise), std::move(hypothesis));
}

void check_train_inputs(const WordPairSet& pairs, const TrainConfig& config,
                        const AsymmetricEmbeddings* resume) {
    config.validate();
    if (pairs.empty()) throw Error("cannot train embeddings on an empty word-pair set");
    if (resume && resume->dim() != config.dim) {
        throw Error("resumed embeddings have dimension " + std::to_string(resume->dim()) +
                    ", config asks for " + std::to_string(config.dim));
    }
}

}  // namespace

AsymmetricEmbeddings initial_embeddings(const WordPairSet& pairs, const TrainConfig& config,
                                        const AsymmetricEmbeddings* resume) {
    check_train_inputs(pairs, config, resume);
    Rng rng(config.seed);
    return init_embeddings(layout_for(pairs), config, rng, resume);
}

AsymmetricEmbeddings train(const WordPairSet& pairs, const TrainConfig& config,
                           const AsymmetricEmbeddings* resume, const EpochObserver& on_epoch) {
    check_train_inputs(pairs, config, resume);
    TrainingLayout layout = layout_for(pairs);
    Rng rng(config.seed);
    AsymmetricEmbeddings emb = init_embeddings(layout, config, rng, resume);
    EmbeddingTable& u = emb.premise_table_mut();
    EmbeddingTable& v = emb.hypothesis_table_mut();
    const std::size_t unk1 = emb.unk_premise_id();
    const std::size_t unk2 = emb.unk_hypothesis_id();

    const NegativeSampler sampler(layout.hypothesis_weights, config.distribution_exponent);

    const std::size_t total_steps = config.epochs * layout.occurrences.size();
    const double final_step = config.initial_step_size / 100.0;
    std::size_t step = 0;
    std::vector<std::size_t> negatives;
    PairTerms terms;

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        rng.shuffle(layout.occurrences);
        for (const auto& occ : layout.occurrences) {
            const double progress =
                total_steps > 1 ? static_cast<double>(step) / static_cast<double>(total_steps - 1)
                                : 0.0;
            const double lr =
                config.initial_step_size + (final_step - config.initial_step_size) * progress;
            ++step;

            draw_negatives(sampler, rng, occ.c, config.negatives, negatives);
            terms.u_w = u.row(occ.w);
            terms.v_c = v.row(occ.c);
            terms.negatives.clear();
            for (std::size_t n : negatives) terms.negatives.push_back(v.row(n));
            terms.v_unk2 = v.row(unk2);
            terms.u_unk1 = u.row(unk1);

            const PairGradients g = pair_gradients(terms);
            apply(u.row(occ.w), lr, g.u_w);
            apply(v.row(occ.c), lr, g.v_c);
            for (std::size_t k = 0; k < negatives.size(); ++k) apply(v.row(negatives[k]), lr, g.negatives[k]);
            apply(v.row(unk2), lr, g.v_unk2);
            apply(u.row(unk1), lr, g.u_unk1);
        }
        if (on_epoch) on_epoch(epoch, emb);
    }
    return emb;
}

double mean_objective(const AsymmetricEmbeddings& emb, const WordPairSet& pairs,
                      std::size_t negatives, double exponent, std::uint64_t seed) {
    if (pairs.empty()) throw Error("mean objective of an empty word-pair set");
    const TrainingLayout layout = layout_for(pairs);
    const NegativeSampler sampler(layout.hypothesis_weights, exponent);
    const auto& u = emb.premise_table();
    const auto& v = emb.hypothesis_table();
    Rng rng(seed);
    std::vector<std::size_t> drawn;
    double sum = 0.0;
    for (const auto& occ : layout.occurrences) {
        draw_negatives(sampler, rng, occ.c, negatives, drawn);
        PairTerms terms;
        terms.u_w = emb.u(layout.premise.token_of(occ.w));
        terms.v_c = emb.v(layout.hypothesis.token_of(occ.c));
        for (std::size_t n : drawn) terms.negatives.push_back(emb.v(layout.hypothesis.token_of(n)));
        terms.v_unk2 = v.row(emb.unk_hypothesis_id());
        terms.u_unk1 = u.row(emb.unk_premise_id());
        sum += pair_objective(terms);
    }
    return sum / static_cast<double>(layout.occurrences.size());
}

double entailment_score(const AsymmetricEmbeddings& emb, std::string_view w, std::string_view c) {
    const auto uw = emb.u(w);
    const auto vc = emb.v(c);
    return sigmoid(dot(uw.data(), vc.data(), uw.size()));
}

void save_asymmetric(const AsymmetricEmbeddings& emb, const std::string& prefix) {
    save_text_embeddings_file(emb.premise_table(), prefix + ".premise.txt");
    save_text_embeddings_file(emb.hypothesis_table(), prefix + ".hypothesis.txt");
}

AsymmetricEmbeddings load_asymmetric(const std::string& prefix) {
    return AsymmetricEmbeddings(load_text_embeddings_file(prefix + ".premise.txt"),
                                load_text_embeddings_file(prefix + ".hypothesis.txt"));
}

}  // namespace awe
