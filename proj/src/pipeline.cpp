#include "awe/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "awe/corpus.hpp"
#include "awe/interaction.hpp"

namespace awe {

namespace fs = std::filesystem;

namespace {

void require_file(const std::string& path, const char* what) {
    if (path.empty()) throw Error(std::string("no ") + what + " path configured");
    if (!fs::is_regular_file(path)) throw Error(std::string(what) + " not found: " + path);
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory " + dir + ": " + ec.message());
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path);
    out << content;
    if (!out) throw Error("write failure: " + path);
}

std::uint64_t fnv1a(const std::string& data, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char ch : data) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t x) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
    return buf;
}

std::string fixed6(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return buf;
}

nlohmann::ordered_json awe_config_json(const TrainConfig& c) {
    return {{"dim", c.dim},
            {"negatives", c.negatives},
            {"epochs", c.epochs},
            {"initial_step_size", c.initial_step_size},
            {"distribution_exponent", c.distribution_exponent},
            {"seed", c.seed}};
}

TrainConfig awe_config_from_json(const nlohmann::json& j) {
    TrainConfig c;
    c.dim = j.at("dim").get<std::size_t>();
    c.negatives = j.at("negatives").get<std::size_t>();
    c.epochs = j.at("epochs").get<std::size_t>();
    c.initial_step_size = j.at("initial_step_size").get<double>();
    c.distribution_exponent = j.at("distribution_exponent").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

template <typename T>
void read_opt(const nlohmann::json& obj, const char* key, T& out) {
    if (auto it = obj.find(key); it != obj.end()) out = it->get<T>();
}

void reject_unknown(const nlohmann::json& obj, std::initializer_list<const char*> keys,
                    const std::string& where) {
    if (!obj.is_object()) throw Error("config section '" + where + "' must be an object");
    for (const auto& [key, _] : obj.items()) {
        if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; })) {
            throw Error("unknown config key '" + where + "." + key + "'");
        }
    }
}

}  // namespace

void PipelineConfig::validate() const {
    if (!(t_plus > 0.0 && t_plus <= 1.0)) throw Error("t_plus must lie in (0, 1]");
    if (!(t_minus > 0.0 && t_minus <= 1.0)) throw Error("t_minus must lie in (0, 1]");
    awe.validate();
    model.validate();
    if (paths.output_dir.empty()) throw Error("output_dir must be set");
}

PipelineConfig config_from_json(const nlohmann::json& j) {
    PipelineConfig c;
    reject_unknown(j, {"seed", "paths", "extraction", "awe", "model"}, "config");
    read_opt(j, "seed", c.seed);
    if (auto it = j.find("paths"); it != j.end()) {
        reject_unknown(*it, {"train", "dev", "test", "pretrained", "model_vectors", "output_dir"}, "paths");
        read_opt(*it, "train", c.paths.train);
        read_opt(*it, "dev", c.paths.dev);
        read_opt(*it, "test", c.paths.test);
        read_opt(*it, "pretrained", c.paths.pretrained);
        read_opt(*it, "model_vectors", c.paths.model_vectors);
        read_opt(*it, "output_dir", c.paths.output_dir);
    }
    if (auto it = j.find("extraction"); it != j.end()) {
        reject_unknown(*it, {"t_plus", "t_minus"}, "extraction");
        read_opt(*it, "t_plus", c.t_plus);
        read_opt(*it, "t_minus", c.t_minus);
    }
    if (auto it = j.find("awe"); it != j.end()) {
        reject_unknown(*it, {"dim", "negatives", "epochs", "initial_step_size", "distribution_exponent"}, "awe");
        read_opt(*it, "dim", c.awe.dim);
        read_opt(*it, "negatives", c.awe.negatives);
        read_opt(*it, "epochs", c.awe.epochs);
        read_opt(*it, "initial_step_size", c.awe.initial_step_size);
        read_opt(*it, "distribution_exponent", c.awe.distribution_exponent);
    }
    if (auto it = j.find("model"); it != j.end()) {
        reject_unknown(*it, {"variant", "hidden", "class_count", "epochs", "batch_size", "learning_rate", "dropout"},
                       "model");
        if (auto v = it->find("variant"); v != it->end()) c.model.variant = parse_variant(v->get<std::string>());
        read_opt(*it, "hidden", c.model.hidden);
        read_opt(*it, "class_count", c.model.class_count);
        read_opt(*it, "epochs", c.model_training.epochs);
        read_opt(*it, "batch_size", c.model_training.batch_size);
        read_opt(*it, "learning_rate", c.model_training.learning_rate);
        read_opt(*it, "dropout", c.model_training.dropout);
    }
    return c;
}

nlohmann::ordered_json config_to_json(const PipelineConfig& c) {
    nlohmann::ordered_json j;
    j["seed"] = c.seed;
    j["paths"] = {{"train", c.paths.train},           {"dev", c.paths.dev},
                  {"test", c.paths.test},             {"pretrained", c.paths.pretrained},
                  {"model_vectors", c.paths.model_vectors}, {"output_dir", c.paths.output_dir}};
    j["extraction"] = {{"t_plus", c.t_plus}, {"t_minus", c.t_minus}};
    j["awe"] = {{"dim", c.awe.dim},
                {"negatives", c.awe.negatives},
                {"epochs", c.awe.epochs},
                {"initial_step_size", c.awe.initial_step_size},
                {"distribution_exponent", c.awe.distribution_exponent}};
    j["model"] = {{"variant", variant_name(c.model.variant)},
                  {"hidden", c.model.hidden},
                  {"class_count", c.model.class_count},
                  {"epochs", c.model_training.epochs},
                  {"batch_size", c.model_training.batch_size},
                  {"learning_rate", c.model_training.learning_rate},
                  {"dropout", c.model_training.dropout}};
    return j;
}

PipelineConfig load_pipeline_config(const std::string& path) {
    try {
        return config_from_json(nlohmann::json::parse(read_file(path)));
    } catch (const nlohmann::json::exception& e) {
        throw Error("malformed config " + path + ": " + e.what());
    }
}

ArtifactPaths::ArtifactPaths(const std::string& dir) {
    const fs::path d(dir);
    pairs = (d / "pairs.tsv").string();
    extract_stats = (d / "extract_stats.json").string();
    awe_prefix = (d / "awe").string();
    awe_sidecar = (d / "awe.json").string();
    checkpoint = (d / "model.json").string();
    history = (d / "history.tsv").string();
    metrics = (d / "metrics.json").string();
    sweep = (d / "sweep.tsv").string();
    sweep_summary = (d / "sweep.json").string();
}

ExtractOutcome cmd_extract_pairs(const PipelineConfig& config) {
    config.validate();
    require_file(config.paths.train, "training corpus");
    require_file(config.paths.pretrained, "pretrained vectors");
    ensure_dir(config.paths.output_dir);
    const ArtifactPaths out(config.paths.output_dir);

    const Corpus corpus = load_corpus_file(config.paths.train);
    LoadReport report;
    const EmbeddingTable table = load_text_embeddings_file(config.paths.pretrained, std::nullopt, &report);
    if (report.duplicates > 0) {
        spdlog::warn("{}: ignored {} duplicate token rows", config.paths.pretrained, report.duplicates);
    }
    ExtractOutcome result;
    result.pairs = extract(corpus.pairs, table, config.t_plus, config.t_minus, &result.stats);
    if (result.pairs.empty()) {
        spdlog::warn("no entailment word pairs survived at t_plus={} t_minus={}", config.t_plus, config.t_minus);
    }
    save_pairs_file(result.pairs, out.pairs);

    nlohmann::ordered_json stats = {{"n_ent_pairs_raw", result.stats.n_ent_pairs_raw},
                                    {"n_neu_pairs", result.stats.n_neu_pairs},
                                    {"n_final", result.stats.n_final},
                                    {"n_final_distinct", result.pairs.distinct()},
                                    {"n_oov_tokens_skipped", result.stats.n_oov_tokens_skipped},
                                    {"n_corpus_pairs", corpus.pairs.size()},
                                    {"n_corpus_skipped", corpus.skipped},
                                    {"t_plus", config.t_plus},
                                    {"t_minus", config.t_minus}};
    write_file(out.extract_stats, stats.dump(2) + "\n");
    return result;
}

std::string awe_config_hash(const TrainConfig& config, const std::string& pairs_path) {
    const std::uint64_t pairs_hash = fnv1a(read_file(pairs_path));
    return hex64(fnv1a(awe_config_json(config).dump(), pairs_hash));
}

namespace {

TrainConfig stage_awe_config(const PipelineConfig& config) {
    TrainConfig tc = config.awe;
    tc.seed = config.awe_seed();
    return tc;
}

std::string serialize_table(const EmbeddingTable& table) {
    std::ostringstream ss;
    save_text_embeddings(table, ss);
    return ss.str();
}

}  // namespace

AweOutcome cmd_train_awe(const PipelineConfig& config, const std::optional<std::string>& resume_prefix) {
    config.validate();
    const ArtifactPaths out(config.paths.output_dir);
    require_file(out.pairs, "word-pair file");
    const WordPairSet pairs = load_pairs_file(out.pairs);
    if (pairs.empty()) throw Error("word-pair file is empty: " + out.pairs);

    const TrainConfig tc = stage_awe_config(config);
    std::optional<AsymmetricEmbeddings> resume;
    if (resume_prefix) resume = load_asymmetric(*resume_prefix);

    AweOutcome result{train(pairs, tc, resume ? &*resume : nullptr), awe_config_hash(tc, out.pairs)};
    save_asymmetric(result.embeddings, out.awe_prefix);

    nlohmann::ordered_json sidecar;
    sidecar["config"] = awe_config_json(tc);
    sidecar["seed"] = tc.seed;
    sidecar["pairs"] = fs::path(out.pairs).filename().string();  // relative to the sidecar
    sidecar["config_hash"] = result.config_hash;
    sidecar["resumed_from"] = resume_prefix ? fs::absolute(*resume_prefix).string() : std::string();
    write_file(out.awe_sidecar, sidecar.dump(2) + "\n");
    return result;
}

bool cmd_verify_awe(const std::string& output_dir) {
    const ArtifactPaths out(output_dir);
    require_file(out.awe_sidecar, "embedding sidecar");
    nlohmann::json sidecar;
    try {
        sidecar = nlohmann::json::parse(read_file(out.awe_sidecar));
    } catch (const nlohmann::json::exception& e) {
        throw Error("malformed sidecar " + out.awe_sidecar + ": " + e.what());
    }
    const TrainConfig tc = awe_config_from_json(sidecar.at("config"));
    const std::string pairs_path = (fs::path(output_dir) / sidecar.at("pairs").get<std::string>()).string();
    require_file(pairs_path, "word-pair file");
    if (awe_config_hash(tc, pairs_path) != sidecar.at("config_hash").get<std::string>()) return false;

    std::optional<AsymmetricEmbeddings> resume;
    const std::string resumed = sidecar.value("resumed_from", std::string());
    if (!resumed.empty()) resume = load_asymmetric(resumed);
    const AsymmetricEmbeddings again = train(load_pairs_file(pairs_path), tc, resume ? &*resume : nullptr);
    return serialize_table(again.premise_table()) == read_file(out.awe_prefix + ".premise.txt") &&
           serialize_table(again.hypothesis_table()) == read_file(out.awe_prefix + ".hypothesis.txt");
}

namespace {

std::vector<Example> load_examples(const std::string& corpus_path, const EmbeddingTable& vectors,
                                   std::size_t class_count, const AsymmetricEmbeddings* awe) {
    const Corpus corpus = load_corpus_file(corpus_path);
    if (corpus.pairs.empty()) throw Error("corpus has no usable pairs: " + corpus_path);
    return make_examples(corpus.pairs, vectors, class_count, awe);
}

void write_history(const std::vector<EpochRecord>& history, const std::string& path) {
    std::string s = "epoch\tloss\ttrain_acc\tdev_acc\n";
    for (const auto& r : history) {
        s += std::to_string(r.epoch) + "\t" + fixed6(r.loss) + "\t" + fixed6(r.train_accuracy) + "\t" +
             format_accuracy(r.dev_accuracy) + "\n";
    }
    write_file(path, s);
}

// Plain or AWE model trained from `config` with artifacts under its output dir.
TrainedModel train_stage(const PipelineConfig& config) {
    config.validate();
    require_file(config.paths.train, "training corpus");
    require_file(config.model_vectors_path(), "model vectors");
    if (!config.paths.dev.empty()) require_file(config.paths.dev, "dev corpus");
    ensure_dir(config.paths.output_dir);
    const ArtifactPaths out(config.paths.output_dir);

    const EmbeddingTable vectors = load_text_embeddings_file(config.model_vectors_path());
    std::optional<AsymmetricEmbeddings> awe;
    if (config.model.variant == Variant::Awe) {
        require_file(out.awe_prefix + ".premise.txt", "premise-side embeddings");
        awe = load_asymmetric(out.awe_prefix);
    }
    ModelConfig mc = config.model;
    mc.input_dim = vectors.dim();
    const auto train = load_examples(config.paths.train, vectors, mc.class_count, awe ? &*awe : nullptr);
    std::vector<Example> dev;
    if (!config.paths.dev.empty()) dev = load_examples(config.paths.dev, vectors, mc.class_count, awe ? &*awe : nullptr);

    ModelTrainConfig tc = config.model_training;
    tc.seed = config.model_seed();
    TrainedModel model = train_model(train, mc, tc, dev);
    save_checkpoint(model.params, tc.seed, out.checkpoint);
    write_history(model.history, out.history);
    return model;
}

}  // namespace

TrainedModel cmd_train_model(const PipelineConfig& config) { return train_stage(config); }

EvaluateOutcome cmd_evaluate(const std::string& checkpoint, const std::string& dataset,
                             const std::string& dataset_tag, const std::string& vectors_path,
                             const std::optional<std::string>& awe_prefix, const std::string& metrics_path) {
    require_file(checkpoint, "checkpoint");
    require_file(dataset, "evaluation corpus");
    require_file(vectors_path, "model vectors");
    std::uint64_t seed = 0;
    const ModelParams params = load_checkpoint(checkpoint, &seed);
    const EmbeddingTable vectors = load_text_embeddings_file(vectors_path);
    if (vectors.dim() != params.config().input_dim) {
        throw Error("model vectors have dimension " + std::to_string(vectors.dim()) + ", checkpoint expects " +
                    std::to_string(params.config().input_dim));
    }
    std::optional<AsymmetricEmbeddings> awe;
    if (params.config().variant == Variant::Awe) {
        if (!awe_prefix) throw Error("AWE checkpoint needs asymmetric embeddings");
        awe = load_asymmetric(*awe_prefix);
    }
    const auto examples = load_examples(dataset, vectors, params.config().class_count, awe ? &*awe : nullptr);

    EvaluateOutcome result;
    result.evaluation = evaluate(params, examples);
    result.metrics["variant"] = variant_name(params.config().variant);
    result.metrics["dataset"] = dataset_tag;
    result.metrics["seed"] = seed;
    result.metrics["accuracy"] = result.evaluation.accuracy;
    result.metrics["correct"] = result.evaluation.correct;
    result.metrics["total"] = result.evaluation.total;
    result.metrics["confusion"] = result.evaluation.confusion;
    if (!metrics_path.empty()) {
        const auto parent = fs::path(metrics_path).parent_path();
        if (!parent.empty()) ensure_dir(parent.string());
        write_file(metrics_path, result.metrics.dump(2) + "\n");
    }
    return result;
}

SweepOutcome cmd_sweep(const PipelineConfig& config, std::vector<double> thresholds) {
    config.validate();
    if (thresholds.empty()) throw Error("sweep needs at least one threshold");
    std::vector<double> unique;
    for (double t : thresholds) {
        if (std::find(unique.begin(), unique.end(), t) != unique.end()) {
            spdlog::warn("duplicate sweep threshold {} dropped", t);
            continue;
        }
        unique.push_back(t);
    }
    ensure_dir(config.paths.output_dir);
    const ArtifactPaths out(config.paths.output_dir);
    const std::string vectors = config.model_vectors_path();

    auto evaluate_split = [&](const PipelineConfig& stage, const std::string& split, const char* tag,
                              std::optional<double>& slot) {
        if (split.empty()) return;
        const ArtifactPaths a(stage.paths.output_dir);
        const std::optional<std::string> prefix =
            stage.model.variant == Variant::Awe ? std::optional<std::string>(a.awe_prefix) : std::nullopt;
        slot = cmd_evaluate(a.checkpoint, split, tag, vectors, prefix,
                            (fs::path(stage.paths.output_dir) / (std::string("metrics_") + tag + ".json")).string())
                   .evaluation.accuracy;
    };

    SweepOutcome result;
    {
        PipelineConfig base = config;
        base.model.variant = Variant::Plain;
        base.paths.output_dir = (fs::path(config.paths.output_dir) / "base").string();
        train_stage(base);
        evaluate_split(base, config.paths.dev, "dev", result.base_dev_accuracy);
        evaluate_split(base, config.paths.test, "test", result.base_test_accuracy);
    }
    for (double t : unique) {
        PipelineConfig stage = config;
        stage.t_plus = t;
        stage.model.variant = Variant::Awe;
        char name[32];
        std::snprintf(name, sizeof name, "t_%.4f", t);
        stage.paths.output_dir = (fs::path(config.paths.output_dir) / name).string();
        SweepRow row;
        row.t_plus = t;
        row.n_pairs = cmd_extract_pairs(stage).stats.n_final;
        if (row.n_pairs == 0) {
            spdlog::warn("threshold {}: empty pair set, no AWE model trained", t);
        } else {
            cmd_train_awe(stage);
            train_stage(stage);
            evaluate_split(stage, config.paths.dev, "dev", row.dev_accuracy);
            evaluate_split(stage, config.paths.test, "test", row.test_accuracy);
        }
        result.rows.push_back(row);
    }

    std::string tsv = "t_plus\tn_pairs\tdev_acc\ttest_acc\n";
    for (const auto& r : result.rows) {
        tsv += fixed6(r.t_plus) + "\t" + std::to_string(r.n_pairs) + "\t" + format_accuracy(r.dev_accuracy) + "\t" +
               format_accuracy(r.test_accuracy) + "\n";
    }
    write_file(out.sweep, tsv);
    nlohmann::ordered_json summary;
    summary["t_minus"] = config.t_minus;
    summary["seed"] = config.seed;
    summary["base_dev_acc"] = result.base_dev_accuracy ? nlohmann::ordered_json(*result.base_dev_accuracy) : nlohmann::ordered_json(nullptr);
    summary["base_test_acc"] = result.base_test_accuracy ? nlohmann::ordered_json(*result.base_test_accuracy) : nlohmann::ordered_json(nullptr);
    write_file(out.sweep_summary, summary.dump(2) + "\n");
    return result;
}

QueryResult cmd_query(const AsymmetricEmbeddings& emb, const std::string& w, const std::string& c) {
    QueryResult r;
    r.forward = entailment_score(emb, w, c);
    r.backward = entailment_score(emb, c, w);
    r.w_known_premise = emb.premise_table().vocab().contains(w);
    r.c_known_hypothesis = emb.hypothesis_table().vocab().contains(c);
    r.c_known_premise = emb.premise_table().vocab().contains(c);
    r.w_known_hypothesis = emb.hypothesis_table().vocab().contains(w);
    return r;
}

std::string cmd_dump_interactions(const EmbeddingTable& vectors, const AsymmetricEmbeddings& emb,
                                  const std::string& premise_text, const std::string& hypothesis_text) {
    const Tokens premise = tokenize(premise_text);
    const Tokens hypothesis = tokenize(hypothesis_text);
    if (premise.empty() || hypothesis.empty()) throw Error("dump-interactions: empty sentence");
    auto lookup = [&](const std::string& w) {
        if (auto row = vectors.find(w)) return Vector(row->begin(), row->end());
        return Vector(vectors.dim(), 0.0);
    };
    std::vector<Vector> p, h;
    for (const auto& w : premise) p.push_back(lookup(w));
    for (const auto& w : hypothesis) h.push_back(lookup(w));

    const Matrix i0 = interaction_sym(p, h);
    const Matrix i1 = interaction_ent(emb, premise, hypothesis);
    const Matrix ic = interaction_combined(i0, i1);
    const auto a0 = importance_deiste(i0);
    const auto a1 = importance_awe(i0, i1);
    const auto best = hard_best_match(ic);

    std::string s = "kind\ti\tj\tpremise\thypothesis\tvalue\n";
    auto emit_matrix = [&](const char* kind, const Matrix& m) {
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0; j < m.cols(); ++j)
                s += std::string(kind) + "\t" + std::to_string(i) + "\t" + std::to_string(j) + "\t" + premise[i] +
                     "\t" + hypothesis[j] + "\t" + fixed6(m(i, j)) + "\n";
    };
    emit_matrix("I0", i0);
    emit_matrix("I1", i1);
    emit_matrix("Iprime", ic);
    for (std::size_t i = 0; i < premise.size(); ++i) {
        s += "importance_deiste\t" + std::to_string(i) + "\t-\t" + premise[i] + "\t-\t" + fixed6(a0[i]) + "\n";
    }
    for (std::size_t i = 0; i < premise.size(); ++i) {
        s += "importance_awe\t" + std::to_string(i) + "\t-\t" + premise[i] + "\t-\t" + fixed6(a1[i]) + "\n";
    }
    for (std::size_t i = 0; i < premise.size(); ++i) {
        s += "best_match\t" + std::to_string(i) + "\t" + std::to_string(best[i]) + "\t" + premise[i] + "\t" +
             hypothesis[best[i]] + "\t" + fixed6(ic(i, best[i])) + "\n";
    }
    return s;
}

std::string format_accuracy(const std::optional<double>& acc) { return acc ? fixed6(*acc) : "nan"; }

}  // namespace awe
