#include <doctest.h>

#include <filesystem>
#include <nlohmann/json.hpp>
#include <sstream>

#include "awe/pipeline.hpp"
#include "awe/synthetic.hpp"
#include "support.hpp"

using namespace awe;
namespace fs = std::filesystem;

namespace {

PipelineConfig fixture_config(const std::string& out_dir) {
    PipelineConfig c;
    c.paths.train = test::data_path("corpus.jsonl");
    c.paths.pretrained = test::data_path("vectors.txt");
    c.paths.output_dir = out_dir;
    c.awe.dim = 4;
    c.awe.epochs = 3;
    c.awe.negatives = 2;
    c.model.hidden = 6;
    c.model.class_count = 3;
    c.model_training.epochs = 3;
    c.model_training.learning_rate = 0.01;
    c.seed = 7;
    return c;
}

// Small synthetic task written to `dir`, with a config pointing at it.
PipelineConfig synthetic_config(const test::TempDir& dir, std::uint64_t seed) {
    SyntheticWorldConfig wc;
    wc.rules = 20;
    wc.fillers_per_group = 10;
    wc.dim = 8;
    wc.seed = seed;
    const auto world = make_world(wc);
    save_text_embeddings_file(world.vectors, dir / "vectors.txt");
    SyntheticCorpusConfig cc;
    cc.size = 240;
    cc.seed = seed + 1;
    write_snli_jsonl(make_corpus(world, cc), dir / "train.jsonl");
    cc.size = 80;
    cc.seed = seed + 2;
    write_snli_jsonl(make_corpus(world, cc), dir / "dev.jsonl");
    cc.seed = seed + 3;
    write_snli_jsonl(make_corpus(world, cc), dir / "test.jsonl");

    PipelineConfig c;
    c.paths.train = dir / "train.jsonl";
    c.paths.dev = dir / "dev.jsonl";
    c.paths.test = dir / "test.jsonl";
    c.paths.pretrained = dir / "vectors.txt";
    c.paths.output_dir = dir / "out";
    c.awe.dim = 8;
    c.awe.epochs = 3;
    c.model.hidden = 8;
    c.model_training.epochs = 2;
    c.model_training.batch_size = 16;
    c.model_training.learning_rate = 0.005;
    c.seed = seed;
    return c;
}

}  // namespace

TEST_CASE("config JSON round trip and validation") {
    const auto c = fixture_config("x");
    const auto back = config_from_json(nlohmann::json::parse(config_to_json(c).dump()));
    CHECK(config_to_json(back).dump() == config_to_json(c).dump());

    CHECK_THROWS(config_from_json(nlohmann::json::parse(R"({"sede": 3})")));
    CHECK_THROWS(config_from_json(nlohmann::json::parse(R"({"awe": {"dimm": 3}})")));
    const auto partial = config_from_json(nlohmann::json::parse(R"({"extraction": {"t_plus": 0.8}})"));
    CHECK(partial.t_plus == 0.8);
    CHECK(partial.t_minus == 0.9);

    auto bad = c;
    bad.t_plus = 0.0;
    CHECK_THROWS(bad.validate());
    bad = c;
    bad.t_minus = 1.1;
    CHECK_THROWS(bad.validate());
}

TEST_CASE("stage seeds are fixed offsets of the pipeline seed") {
    PipelineConfig c;
    c.seed = 100;
    CHECK(c.awe_seed() == 101);
    CHECK(c.model_seed() == 102);
}

TEST_CASE("extract-pairs matches the committed golden file") {
    test::TempDir dir;
    const auto c = fixture_config(dir / "out");
    const auto outcome = cmd_extract_pairs(c);
    const ArtifactPaths a(c.paths.output_dir);
    CHECK(test::slurp(a.pairs) == test::slurp(test::data_path("golden_pairs_0.7_0.9.tsv")));
    const auto stats = nlohmann::json::parse(test::slurp(a.extract_stats));
    CHECK(stats.at("n_final").get<std::uint64_t>() == outcome.pairs.total());
    for (const char* key : {"n_ent_pairs_raw", "n_neu_pairs", "n_final", "n_oov_tokens_skipped"})
        CHECK(stats.contains(key));
}

TEST_CASE("t_plus = 1.0 gives an empty pair file") {
    test::TempDir dir;
    auto c = fixture_config(dir / "out");
    c.t_plus = 1.0;
    CHECK(cmd_extract_pairs(c).pairs.empty());
    CHECK(test::slurp(ArtifactPaths(c.paths.output_dir).pairs).empty());
    CHECK_THROWS(cmd_train_awe(c));
}

TEST_CASE("missing inputs are errors") {
    test::TempDir dir;
    auto c = fixture_config(dir / "out");
    c.paths.train = dir / "nope.jsonl";
    CHECK_THROWS(cmd_extract_pairs(c));
    c = fixture_config(dir / "out");
    CHECK_THROWS(cmd_train_awe(c));  // no pair file yet
    CHECK_THROWS(cmd_evaluate(dir / "missing.json", test::data_path("eval.jsonl"), "x",
                              test::data_path("vectors.txt"), std::nullopt, ""));
}

TEST_CASE("train-awe is deterministic and verifiable") {
    test::TempDir one, two;
    const auto c1 = fixture_config(one / "out");
    const auto c2 = fixture_config(two / "out");
    cmd_extract_pairs(c1);
    cmd_extract_pairs(c2);
    const auto r1 = cmd_train_awe(c1);
    const auto r2 = cmd_train_awe(c2);
    const ArtifactPaths a1(c1.paths.output_dir), a2(c2.paths.output_dir);
    CHECK(test::slurp(a1.awe_prefix + ".premise.txt") == test::slurp(a2.awe_prefix + ".premise.txt"));
    CHECK(test::slurp(a1.awe_prefix + ".hypothesis.txt") == test::slurp(a2.awe_prefix + ".hypothesis.txt"));
    CHECK(r1.config_hash == r2.config_hash);

    const auto sidecar = nlohmann::json::parse(test::slurp(a1.awe_sidecar));
    CHECK(sidecar.at("seed").get<std::uint64_t>() == c1.awe_seed());
    CHECK(sidecar.at("config_hash").get<std::string>() == r1.config_hash);
    CHECK(cmd_verify_awe(c1.paths.output_dir));

    // Tampering with an artifact is detected.
    test::spit(a1.awe_prefix + ".premise.txt", test::slurp(a1.awe_prefix + ".premise.txt") + "extra 0 0 0 0\n");
    CHECK_FALSE(cmd_verify_awe(c1.paths.output_dir));
}

TEST_CASE("train-awe resume checks the dimension") {
    test::TempDir dir;
    auto c = fixture_config(dir / "out");
    cmd_extract_pairs(c);
    cmd_train_awe(c);
    const std::string prev = dir / "prev";
    const ArtifactPaths a(c.paths.output_dir);
    fs::copy_file(a.awe_prefix + ".premise.txt", prev + ".premise.txt");
    fs::copy_file(a.awe_prefix + ".hypothesis.txt", prev + ".hypothesis.txt");
    CHECK_NOTHROW(cmd_train_awe(c, prev));
    CHECK(cmd_verify_awe(c.paths.output_dir));
    c.awe.dim = 6;
    CHECK_THROWS(cmd_train_awe(c, prev));
}

TEST_CASE("evaluate a committed checkpoint against golden metrics") {
    test::TempDir dir;
    for (const std::string variant : {"plain", "awe"}) {
        const auto prefix = variant == "awe" ? std::optional<std::string>(test::data_path("awe")) : std::nullopt;
        const auto r = cmd_evaluate(test::data_path("tiny_" + variant + ".json"), test::data_path("eval.jsonl"),
                                    "fixture", test::data_path("vectors.txt"), prefix, dir / (variant + ".json"));
        const auto golden = nlohmann::json::parse(test::slurp(test::data_path("tiny_" + variant + "_metrics.json")));
        const auto written = nlohmann::json::parse(test::slurp(dir / (variant + ".json")));
        CHECK(written.at("accuracy").get<double>() == golden.at("accuracy").get<double>());
        CHECK(written.at("correct") == golden.at("correct"));
        CHECK(written.at("total") == golden.at("total"));
        CHECK(written.at("confusion") == golden.at("confusion"));
        CHECK(written.at("variant").get<std::string>() == variant);
        CHECK(written.at("dataset").get<std::string>() == "fixture");
        CHECK(written.contains("seed"));
        CHECK(r.evaluation.total == 4);
    }
    CHECK_THROWS(cmd_evaluate(test::data_path("tiny_awe.json"), test::data_path("eval.jsonl"), "fixture",
                              test::data_path("vectors.txt"), std::nullopt, ""));
}

TEST_CASE("train-model writes checkpoint and history") {
    test::TempDir dir;
    auto c = fixture_config(dir / "out");
    c.paths.dev = test::data_path("eval.jsonl");
    const auto model = cmd_train_model(c);
    const ArtifactPaths a(c.paths.output_dir);
    const auto history = test::slurp(a.history);
    std::istringstream lines(history);
    std::string header;
    std::getline(lines, header);
    CHECK(header == "epoch\tloss\ttrain_acc\tdev_acc");
    CHECK(std::count(history.begin(), history.end(), '\n') == 4);
    std::uint64_t seed = 0;
    const auto back = load_checkpoint(a.checkpoint, &seed);
    CHECK(seed == c.model_seed());
    CHECK(back.config().input_dim == 4);
    CHECK(model.history.size() == 3);

    c.model.variant = Variant::Awe;
    CHECK_THROWS(cmd_train_model(c));  // no embeddings in the output dir yet
}

TEST_CASE("every stage is byte-for-byte reproducible") {
    test::TempDir one, two;
    std::vector<std::string> outputs;
    for (const auto* d : {&one, &two}) {
        auto c = fixture_config(*d / "out");
        c.paths.dev = test::data_path("eval.jsonl");
        c.model.variant = Variant::Awe;
        cmd_extract_pairs(c);
        cmd_train_awe(c);
        cmd_train_model(c);
        const ArtifactPaths a(c.paths.output_dir);
        cmd_evaluate(a.checkpoint, test::data_path("eval.jsonl"), "dev", test::data_path("vectors.txt"),
                     a.awe_prefix, a.metrics);
        std::string all;
        for (const auto& f : {a.pairs, a.extract_stats, a.awe_prefix + ".premise.txt",
                              a.awe_prefix + ".hypothesis.txt", a.checkpoint, a.history, a.metrics})
            all += test::slurp(f) + "\x1f";
        outputs.push_back(all);
    }
    CHECK(outputs[0] == outputs[1]);
}

TEST_CASE("query reports both directions and unknown words") {
    const auto emb = load_asymmetric(test::data_path("awe"));
    const auto q = cmd_query(emb, "man", "person");
    CHECK(q.w_known_premise);
    CHECK(q.c_known_hypothesis);
    CHECK_FALSE(q.c_known_premise);
    CHECK_FALSE(q.w_known_hypothesis);
    CHECK(q.forward == entailment_score(emb, "man", "person"));
    CHECK(q.backward == entailment_score(emb, "person", "man"));
    const auto u = cmd_query(emb, "zzz", "qqq");
    CHECK(u.forward == entailment_score(emb, kUnkPremise, kUnkHypothesis));
}

TEST_CASE("dump-interactions output") {
    const auto vectors = load_text_embeddings_file(test::data_path("vectors.txt"));
    const auto emb = load_asymmetric(test::data_path("awe"));
    const auto tsv = cmd_dump_interactions(vectors, emb, "A man runs.", "A person moves.");
    std::istringstream in(tsv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "kind\ti\tj\tpremise\thypothesis\tvalue");
    std::map<std::string, int> kinds;
    while (std::getline(in, line)) ++kinds[line.substr(0, line.find('\t'))];
    CHECK(kinds["I0"] == 9);
    CHECK(kinds["I1"] == 9);
    CHECK(kinds["Iprime"] == 9);
    CHECK(kinds["importance_deiste"] == 3);
    CHECK(kinds["importance_awe"] == 3);
    CHECK(kinds["best_match"] == 3);
    CHECK_THROWS(cmd_dump_interactions(vectors, emb, "...", "A person moves."));
}

TEST_CASE("sweep rows, deduplication and composition") {
    test::TempDir dir;
    auto c = synthetic_config(dir, 31);
    const auto sweep = cmd_sweep(c, {0.5, 0.7, 0.9, 0.7});
    REQUIRE(sweep.rows.size() == 3);
    for (std::size_t k = 1; k < sweep.rows.size(); ++k) CHECK(sweep.rows[k].n_pairs <= sweep.rows[k - 1].n_pairs);
    CHECK(sweep.base_dev_accuracy.has_value());
    CHECK(sweep.base_test_accuracy.has_value());
    const ArtifactPaths a(c.paths.output_dir);
    const auto tsv = test::slurp(a.sweep);
    CHECK(tsv.rfind("t_plus\tn_pairs\tdev_acc\ttest_acc\n", 0) == 0);
    CHECK(std::count(tsv.begin(), tsv.end(), '\n') == 4);
    CHECK(nlohmann::json::parse(test::slurp(a.sweep_summary)).contains("base_test_acc"));
    CHECK_THROWS(cmd_sweep(c, {}));

    // A one-threshold sweep produces the same artifacts as running the stages by hand.
    auto single = c;
    single.paths.output_dir = dir / "single";
    cmd_sweep(single, {0.7});
    auto manual = c;
    manual.model.variant = Variant::Awe;
    manual.t_plus = 0.7;
    manual.paths.output_dir = dir / "manual";
    cmd_extract_pairs(manual);
    cmd_train_awe(manual);
    cmd_train_model(manual);
    const ArtifactPaths s(dir / "single/t_0.7000"), m(manual.paths.output_dir);
    CHECK(test::slurp(s.pairs) == test::slurp(m.pairs));
    CHECK(test::slurp(s.awe_prefix + ".premise.txt") == test::slurp(m.awe_prefix + ".premise.txt"));
    CHECK(test::slurp(s.checkpoint) == test::slurp(m.checkpoint));
    CHECK(test::slurp(s.history) == test::slurp(m.history));
}

TEST_CASE("format_accuracy") {
    CHECK(format_accuracy(0.5) == "0.500000");
    CHECK(format_accuracy(std::nullopt) == "nan");
}
