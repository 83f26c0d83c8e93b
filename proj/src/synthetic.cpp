#include "awe/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>

#include "awe/common.hpp"

namespace awe {

namespace {

double gaussian(Rng& rng) {
    // Box-Muller; 1 - u keeps the log argument positive.
    const double u1 = 1.0 - rng.uniform();
    const double u2 = rng.uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Vector random_unit(Rng& rng, std::size_t dim) {
    Vector v(dim);
    double norm = 0.0;
    for (double& x : v) {
        x = gaussian(rng);
        norm += x * x;
    }
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
    return v;
}

// Unit vector at exactly angle acos(cos_target) from the unit vector `base`.
Vector rotate_towards_random(Rng& rng, const Vector& base, double cos_target) {
    Vector r = random_unit(rng, base.size());
    const double proj = dot(r.data(), base.data(), base.size());
    double norm = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) {
        r[k] -= proj * base[k];
        norm += r[k] * r[k];
    }
    norm = std::sqrt(norm);
    const double sin_target = std::sqrt(1.0 - cos_target * cos_target);
    Vector out(base.size());
    for (std::size_t k = 0; k < r.size(); ++k) out[k] = cos_target * base[k] + sin_target * r[k] / norm;
    return out;
}

std::string numbered(const char* prefix, std::size_t n) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%03zu", prefix, n);
    return buf;
}

}  // namespace

SyntheticWorld make_world(const SyntheticWorldConfig& config) {
    if (config.rules < 2) throw Error("synthetic world needs at least two rules");
    if (config.dim < 2) throw Error("synthetic world needs dim >= 2");
    if (config.filler_groups == 0 || config.fillers_per_group == 0) {
        throw Error("synthetic world needs filler words");
    }
    if (!(config.min_rule_cosine > 0.0 && config.min_rule_cosine <= config.max_rule_cosine &&
          config.max_rule_cosine < 1.0)) {
        throw Error("rule cosine range must satisfy 0 < min <= max < 1");
    }
    Rng rng(config.seed);
    SyntheticWorld world;
    Vocabulary vocab;
    std::vector<double> values;
    auto add_word = [&](const std::string& word, const Vector& vec) {
        vocab.add(word);
        values.insert(values.end(), vec.begin(), vec.end());
    };

    // Rule words are numbered so that the name never reveals the direction.
    for (std::size_t k = 0; k < config.rules; ++k) {
        const Vector a = random_unit(rng, config.dim);
        const double cos = rng.uniform(config.min_rule_cosine, config.max_rule_cosine);
        const Vector b = rotate_towards_random(rng, a, cos);
        std::string first = numbered("w", 2 * k), second = numbered("w", 2 * k + 1);
        add_word(first, a);
        add_word(second, b);
        if (rng.uniform() < 0.5) std::swap(first, second);
        world.rules.push_back({first, second});
    }
    const char* group_names[] = {"fa", "fb", "fc", "fd", "fe", "ff", "fg", "fh"};
    if (config.filler_groups > std::size(group_names)) throw Error("too many filler groups");
    for (std::size_t g = 0; g < config.filler_groups; ++g) {
        std::vector<std::string> group;
        for (std::size_t k = 0; k < config.fillers_per_group; ++k) {
            group.push_back(numbered(group_names[g], k));
            add_word(group.back(), random_unit(rng, config.dim));
        }
        world.filler_groups.push_back(std::move(group));
    }
    world.vectors = EmbeddingTable(std::move(vocab), config.dim, std::move(values));
    return world;
}

std::vector<SentencePair> make_corpus(const SyntheticWorld& world, const SyntheticCorpusConfig& config) {
    if (config.filler_group >= world.filler_groups.size()) throw Error("no such filler group");
    if (config.entailment_fraction < 0.0 || config.reversed_fraction < 0.0 ||
        config.entailment_fraction + config.reversed_fraction > 1.0) {
        throw Error("example-type fractions must be non-negative and sum to at most 1");
    }
    const auto& fillers = world.filler_groups[config.filler_group];
    Rng rng(config.seed);
    std::vector<SentencePair> out;
    out.reserve(config.size);
    auto pick_filler = [&] { return fillers[rng.below(fillers.size())]; };

    for (std::size_t n = 0; n < config.size; ++n) {
        const double kind = rng.uniform();
        const auto& rule = world.rules[rng.below(world.rules.size())];
        SentencePair sp;
        if (kind < config.entailment_fraction) {
            sp.premise.push_back(rule.source);
            sp.hypothesis.push_back(rule.target);
            sp.label = Label::Entailment;
        } else if (kind < config.entailment_fraction + config.reversed_fraction) {
            sp.premise.push_back(rule.target);
            sp.hypothesis.push_back(rule.source);
            sp.label = Label::Neutral;
        } else {
            std::size_t other = rng.below(world.rules.size() - 1);
            const auto& rule_ptr = &rule - world.rules.data();
            if (other >= static_cast<std::size_t>(rule_ptr)) ++other;
            const auto& unrelated = world.rules[other];
            sp.premise.push_back(rng.uniform() < 0.5 ? rule.source : rule.target);
            sp.hypothesis.push_back(rng.uniform() < 0.5 ? unrelated.source : unrelated.target);
            sp.label = Label::Neutral;
        }
        for (std::size_t k = 0; k < config.premise_fillers; ++k) sp.premise.push_back(pick_filler());
        for (std::size_t k = 0; k < config.hypothesis_fillers; ++k) sp.hypothesis.push_back(pick_filler());
        rng.shuffle(sp.premise);
        rng.shuffle(sp.hypothesis);
        out.push_back(std::move(sp));
    }
    return out;
}

void write_snli_jsonl(const std::vector<SentencePair>& pairs, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path);
    auto join = [](const Tokens& tokens) {
        std::string s;
        for (const auto& t : tokens) {
            if (!s.empty()) s += ' ';
            s += t;
        }
        return s;
    };
    for (const auto& sp : pairs) {
        nlohmann::ordered_json j;
        j["gold_label"] = label_name(sp.label);
        j["sentence1"] = join(sp.premise);
        j["sentence2"] = join(sp.hypothesis);
        out << j.dump() << '\n';
    }
    if (!out) throw Error("write failure: " + path);
}

}  // namespace awe
