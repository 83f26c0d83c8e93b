#include <doctest.h>

#include <array>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <sys/wait.h>

#include "support.hpp"

using namespace awe;

namespace {

struct Run {
    int status = -1;
    std::string out;  ///< stdout and stderr, interleaved
};

Run run(const std::string& args) {
    const std::string cmd = std::string(AWE_CLI_PATH) + " " + args + " 2>&1";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

std::string fixture_flags(const test::TempDir& dir) {
    return "--train " + test::data_path("corpus.jsonl") + " --pretrained " + test::data_path("vectors.txt") +
           " -o " + (dir / "out") + " --seed 7 --awe-dim 4 --awe-epochs 3 --negatives 2";
}

}  // namespace

TEST_CASE("extract-pairs writes the golden pair file") {
    test::TempDir dir;
    const auto r = run("extract-pairs " + fixture_flags(dir));
    CHECK(r.status == 0);
    CHECK(test::slurp(dir / "out/pairs.tsv") == test::slurp(test::data_path("golden_pairs_0.7_0.9.tsv")));
}

TEST_CASE("extract-pairs: strict threshold at 1.0 and missing inputs") {
    test::TempDir dir;
    auto r = run("extract-pairs " + fixture_flags(dir) + " --t-plus 1.0");
    CHECK(r.status == 0);
    CHECK(test::slurp(dir / "out/pairs.tsv").empty());
    CHECK(r.out.find("warn") != std::string::npos);

    r = run("extract-pairs --train /nonexistent/corpus.jsonl --pretrained " + test::data_path("vectors.txt") +
            " -o " + (dir / "o2"));
    CHECK(r.status != 0);
    r = run("extract-pairs");
    CHECK(r.status != 0);
}

TEST_CASE("config file with flag overrides") {
    test::TempDir dir;
    test::spit(dir / "cfg.json", nlohmann::json{{"paths",
                                                 {{"train", test::data_path("corpus.jsonl")},
                                                  {"pretrained", test::data_path("vectors.txt")},
                                                  {"output_dir", dir / "from_config"}}},
                                                {"extraction", {{"t_plus", 1.0}}}}
                                       .dump());
    CHECK(run("extract-pairs -c " + (dir / "cfg.json")).status == 0);
    CHECK(test::slurp(dir / "from_config/pairs.tsv").empty());
    CHECK(run("extract-pairs -c " + (dir / "cfg.json") + " --t-plus 0.7").status == 0);
    CHECK(test::slurp(dir / "from_config/pairs.tsv") == test::slurp(test::data_path("golden_pairs_0.7_0.9.tsv")));

    test::spit(dir / "bad.json", R"({"paths": {"trian": "x"}})");
    CHECK(run("extract-pairs -c " + (dir / "bad.json")).status != 0);
}

TEST_CASE("train-awe: determinism, verify, resume") {
    test::TempDir a, b;
    for (const auto* d : {&a, &b}) {
        REQUIRE(run("extract-pairs " + fixture_flags(*d)).status == 0);
        REQUIRE(run("train-awe " + fixture_flags(*d)).status == 0);
    }
    CHECK(test::slurp(a / "out/awe.premise.txt") == test::slurp(b / "out/awe.premise.txt"));
    CHECK(test::slurp(a / "out/awe.hypothesis.txt") == test::slurp(b / "out/awe.hypothesis.txt"));

    auto r = run("train-awe --verify -o " + (a / "out"));
    CHECK(r.status == 0);
    CHECK(r.out.find("match") != std::string::npos);
    CHECK(r.out.find("mismatch") == std::string::npos);

    r = run("train-awe " + fixture_flags(a) + " --awe-dim 6 --resume " + (b / "out/awe"));
    CHECK(r.status != 0);
    CHECK(run("train-awe " + fixture_flags(a) + " --resume " + (b / "out/awe")).status == 0);

    test::TempDir empty;
    REQUIRE(run("extract-pairs " + fixture_flags(empty) + " --t-plus 1.0").status == 0);
    CHECK(run("train-awe " + fixture_flags(empty)).status != 0);
}

TEST_CASE("evaluate the committed checkpoints") {
    test::TempDir dir;
    for (const std::string variant : {"plain", "awe"}) {
        std::string args = "evaluate --checkpoint " + test::data_path("tiny_" + variant + ".json") + " --data " +
                           test::data_path("eval.jsonl") + " --vectors " + test::data_path("vectors.txt") +
                           " --tag fixture --metrics " + (dir / (variant + ".json"));
        if (variant == "awe") args += " --awe " + test::data_path("awe");
        const auto r = run(args);
        CHECK(r.status == 0);
        const auto golden = nlohmann::json::parse(test::slurp(test::data_path("tiny_" + variant + "_metrics.json")));
        const auto got = nlohmann::json::parse(test::slurp(dir / (variant + ".json")));
        CHECK(got.at("accuracy").get<double>() == golden.at("accuracy").get<double>());
        CHECK(got.at("confusion") == golden.at("confusion"));
        CHECK(got.at("variant").get<std::string>() == variant);
    }
    const auto r = run("evaluate --checkpoint " + (dir / "missing.json") + " --data " + test::data_path("eval.jsonl") +
                       " --vectors " + test::data_path("vectors.txt") + " --metrics " + (dir / "m.json"));
    CHECK(r.status != 0);
}

TEST_CASE("query") {
    test::TempDir dir;
    auto r = run("query --awe " + test::data_path("awe") + " man person");
    CHECK(r.status == 0);
    CHECK(r.out.find("man -> person") != std::string::npos);
    CHECK(r.out.find("person -> man") != std::string::npos);
    r = run("query --awe " + test::data_path("awe") + " zzz qqq");
    CHECK(r.status == 0);
    CHECK(r.out.find("(unk)") != std::string::npos);

    test::spit(dir / "bad.premise.txt", "a 1 2\nb 1\n");
    test::spit(dir / "bad.hypothesis.txt", "<UNK2> 1 2\n");
    CHECK(run("query --awe " + (dir / "bad") + " a b").status != 0);
}

TEST_CASE("trained toy embeddings score the mined direction higher") {
    test::TempDir dir;
    test::spit(dir / "out/pairs.tsv", "");
    std::filesystem::create_directories(dir / "out");
    test::spit(dir / "out/pairs.tsv", "a\tb\t60\nb\tc\t60\nc\td\t60\nx\ty\t60\n");
    REQUIRE(run("train-awe -o " + (dir / "out") + " --awe-dim 8 --awe-epochs 20 --negatives 3 --seed 41").status == 0);
    const auto r = run("query --awe " + (dir / "out/awe") + " x y");
    REQUIRE(r.status == 0);
    const auto forward = std::stod(r.out.substr(r.out.find("x -> y\t") + 7));
    const auto backward = std::stod(r.out.substr(r.out.find("y -> x\t") + 7));
    CHECK(forward > backward);
}

TEST_CASE("dump-interactions") {
    const auto r = run("dump-interactions --vectors " + test::data_path("vectors.txt") + " --awe " +
                       test::data_path("awe") + " --premise 'A man runs.' --hypothesis 'A person moves.'");
    CHECK(r.status == 0);
    CHECK(r.out.rfind("kind\ti\tj\tpremise\thypothesis\tvalue\n", 0) == 0);
    CHECK(r.out.find("importance_awe\t") != std::string::npos);
}

TEST_CASE("synthetic task: train then evaluate") {
    test::TempDir dir;
    REQUIRE(run("synth -o " + (dir / "data") + " --seed 5 --train-size 1500 --dev-size 200 --test-size 200").status == 0);
    const std::string flags = " --train " + (dir / "data/train.jsonl") + " --dev " + (dir / "data/dev.jsonl") +
                              " --pretrained " + (dir / "data/vectors.txt") + " -o " + (dir / "out") +
                              " --seed 5 --awe-dim 16 --awe-epochs 10 --variant awe --hidden 32 --epochs 20"
                              " --batch-size 16 --lr 0.005 --dropout 0.2";
    REQUIRE(run("extract-pairs" + flags).status == 0);
    REQUIRE(run("train-awe" + flags).status == 0);
    REQUIRE(run("train-model" + flags).status == 0);
    const auto r = run("evaluate --checkpoint " + (dir / "out/model.json") + " --data " +
                       (dir / "data/train.jsonl") + " --vectors " + (dir / "data/vectors.txt") + " --awe " +
                       (dir / "out/awe") + " --tag train --metrics " + (dir / "out/train_metrics.json"));
    REQUIRE(r.status == 0);
    const auto metrics = nlohmann::json::parse(test::slurp(dir / "out/train_metrics.json"));
    CHECK(metrics.at("accuracy").get<double>() >= 0.95);
    const auto history = test::slurp(dir / "out/history.tsv");
    CHECK(std::count(history.begin(), history.end(), '\n') == 21);
}

TEST_CASE("sweep command") {
    test::TempDir dir;
    REQUIRE(run("synth -o " + (dir / "data") + " --seed 9 --train-size 300 --dev-size 60 --test-size 60").status == 0);
    const auto r = run("sweep --train " + (dir / "data/train.jsonl") + " --dev " + (dir / "data/dev.jsonl") +
                       " --test " + (dir / "data/test.jsonl") + " --pretrained " + (dir / "data/vectors.txt") +
                       " -o " + (dir / "out") +
                       " --awe-dim 8 --awe-epochs 2 --hidden 8 --epochs 2 --batch-size 16 --lr 0.005"
                       " --thresholds 0.5,0.7,0.9,0.9");
    CHECK(r.status == 0);
    const auto tsv = test::slurp(dir / "out/sweep.tsv");
    CHECK(std::count(tsv.begin(), tsv.end(), '\n') == 4);
    CHECK(r.out.find("duplicate") != std::string::npos);
    CHECK(run("sweep --train " + (dir / "data/train.jsonl") + " --pretrained " + (dir / "data/vectors.txt") +
              " -o " + (dir / "o2") + " --thresholds ''")
              .status != 0);
}

TEST_CASE("unknown subcommand and help") {
    CHECK(run("frobnicate").status != 0);
    CHECK(run("--help").status == 0);
}
