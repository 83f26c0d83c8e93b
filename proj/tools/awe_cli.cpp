// Command-line front end for the asymmetric-embedding entailment pipeline.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/cfg/env.h>
#include <spdlog/spdlog.h>
#include <spdlog/sinks/stdout_color_sinks.h>

#include "awe/pipeline.hpp"
#include "awe/synthetic.hpp"

namespace {

using awe::PipelineConfig;

// Flags shared by the pipeline subcommands. Every flag overrides the JSON
// config only when given on the command line.
struct PipelineFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out, train, dev, test, pretrained, model_vectors;
    std::optional<double> t_plus, t_minus;
    std::optional<std::size_t> awe_dim, negatives, awe_epochs;
    std::optional<double> awe_step, exponent;
    std::optional<std::string> variant;
    std::optional<std::size_t> hidden, classes, epochs, batch_size;
    std::optional<double> lr, dropout;

    void attach(CLI::App* app) {
        app->add_option("-c,--config", config_path, "JSON pipeline config")->check(CLI::ExistingFile);
        app->add_option("--seed", seed, "Pipeline seed; stage seeds are derived from it");
        app->add_option("-o,--out", out, "Output directory");
        app->add_option("--train", train, "Training corpus (.jsonl SNLI or .tsv SciTail)");
        app->add_option("--dev", dev, "Development corpus");
        app->add_option("--test", test, "Test corpus");
        app->add_option("--pretrained", pretrained, "Pretrained vectors used for pair mining");
        app->add_option("--model-vectors", model_vectors, "Model input vectors (default: --pretrained)");
        app->add_option("--t-plus", t_plus, "Entailment threshold T+");
        app->add_option("--t-minus", t_minus, "Neutral threshold T-");
        app->add_option("--awe-dim", awe_dim, "Asymmetric embedding dimension");
        app->add_option("--negatives", negatives, "Negative samples per pair");
        app->add_option("--awe-epochs", awe_epochs, "Embedding training epochs");
        app->add_option("--awe-step", awe_step, "Initial embedding step size");
        app->add_option("--exponent", exponent, "Negative-sampling distribution exponent");
        app->add_option("--variant", variant, "Model variant: plain or awe");
        app->add_option("--hidden", hidden, "Hidden width of F, G, H");
        app->add_option("--classes", classes, "Class count (2 or 3)");
        app->add_option("--epochs", epochs, "Model training epochs");
        app->add_option("--batch-size", batch_size, "Model batch size");
        app->add_option("--lr", lr, "Adam step size");
        app->add_option("--dropout", dropout, "Dropout ratio on feed-forward inputs");
    }

    PipelineConfig resolve() const {
        PipelineConfig c = config_path.empty() ? PipelineConfig{} : awe::load_pipeline_config(config_path);
        if (seed) c.seed = *seed;
        if (out) c.paths.output_dir = *out;
        if (train) c.paths.train = *train;
        if (dev) c.paths.dev = *dev;
        if (test) c.paths.test = *test;
        if (pretrained) c.paths.pretrained = *pretrained;
        if (model_vectors) c.paths.model_vectors = *model_vectors;
        if (t_plus) c.t_plus = *t_plus;
        if (t_minus) c.t_minus = *t_minus;
        if (awe_dim) c.awe.dim = *awe_dim;
        if (negatives) c.awe.negatives = *negatives;
        if (awe_epochs) c.awe.epochs = *awe_epochs;
        if (awe_step) c.awe.initial_step_size = *awe_step;
        if (exponent) c.awe.distribution_exponent = *exponent;
        if (variant) c.model.variant = awe::parse_variant(*variant);
        if (hidden) c.model.hidden = *hidden;
        if (classes) c.model.class_count = *classes;
        if (epochs) c.model_training.epochs = *epochs;
        if (batch_size) c.model_training.batch_size = *batch_size;
        if (lr) c.model_training.learning_rate = *lr;
        if (dropout) c.model_training.dropout = *dropout;
        c.validate();
        return c;
    }
};

void print_evaluation(const awe::Evaluation& ev) {
    std::printf("accuracy\t%.6f\t(%zu/%zu)\n", ev.accuracy, ev.correct, ev.total);
}

}  // namespace

int main(int argc, char** argv) {
    spdlog::set_default_logger(spdlog::stderr_color_mt("awe"));
    spdlog::cfg::load_env_levels();  // SPDLOG_LEVEL=debug etc.

    CLI::App app{"Asymmetric word embeddings for textual entailment"};
    app.require_subcommand(1);

    PipelineFlags extract_flags, train_awe_flags, train_model_flags, sweep_flags;

    auto* extract_cmd = app.add_subcommand("extract-pairs", "Mine entailment word pairs from a labeled corpus");
    extract_flags.attach(extract_cmd);

    auto* train_awe_cmd = app.add_subcommand("train-awe", "Train asymmetric embeddings on the mined pairs");
    train_awe_flags.attach(train_awe_cmd);
    std::optional<std::string> resume;
    bool verify = false;
    train_awe_cmd->add_option("--resume", resume, "Prefix of embeddings to start from");
    train_awe_cmd->add_flag("--verify", verify, "Re-run from the sidecar and compare with stored files");

    auto* train_model_cmd = app.add_subcommand("train-model", "Train a (AWE-)Decomp-Att classifier");
    train_model_flags.attach(train_model_cmd);

    auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate a checkpoint on a corpus");
    std::string eval_checkpoint, eval_data, eval_vectors, eval_tag = "eval", eval_metrics;
    std::optional<std::string> eval_awe;
    eval_cmd->add_option("--checkpoint", eval_checkpoint, "Model checkpoint")->required();
    eval_cmd->add_option("--data", eval_data, "Corpus to evaluate on")->required();
    eval_cmd->add_option("--vectors", eval_vectors, "Model input vectors")->required();
    eval_cmd->add_option("--awe", eval_awe, "Asymmetric embedding prefix (AWE checkpoints)");
    eval_cmd->add_option("--tag", eval_tag, "Dataset tag recorded in the metrics");
    eval_cmd->add_option("--metrics", eval_metrics, "Metrics JSON output path");

    auto* sweep_cmd = app.add_subcommand("sweep", "Accuracy against the entailment threshold T+");
    sweep_flags.attach(sweep_cmd);
    std::vector<double> thresholds;
    sweep_cmd->add_option("--thresholds", thresholds, "T+ values")->delimiter(',')->required();

    auto* query_cmd = app.add_subcommand("query", "Directional entailment score of a word pair");
    std::string query_prefix, query_w, query_c;
    query_cmd->add_option("--awe", query_prefix, "Asymmetric embedding prefix")->required();
    query_cmd->add_option("premise_word", query_w)->required();
    query_cmd->add_option("hypothesis_word", query_c)->required();

    auto* dump_cmd = app.add_subcommand("dump-interactions", "I0 / I1 / I' and importance scores for one pair");
    std::string dump_vectors, dump_awe, dump_premise, dump_hypothesis, dump_output;
    dump_cmd->add_option("--vectors", dump_vectors, "Symmetric word vectors")->required();
    dump_cmd->add_option("--awe", dump_awe, "Asymmetric embedding prefix")->required();
    dump_cmd->add_option("--premise", dump_premise, "Premise sentence")->required();
    dump_cmd->add_option("--hypothesis", dump_hypothesis, "Hypothesis sentence")->required();
    dump_cmd->add_option("--output", dump_output, "TSV output path (default: stdout)");

    auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic directional-implication dataset");
    std::string synth_out = "synthetic";
    std::uint64_t synth_seed = 2024;
    std::size_t synth_train = 2000, synth_dev = 500, synth_test = 500, synth_group = 0;
    synth_cmd->add_option("-o,--out", synth_out, "Output directory");
    synth_cmd->add_option("--seed", synth_seed, "Seed for the world and the corpora");
    synth_cmd->add_option("--train-size", synth_train);
    synth_cmd->add_option("--dev-size", synth_dev);
    synth_cmd->add_option("--test-size", synth_test);
    synth_cmd->add_option("--filler-group", synth_group, "Which filler vocabulary the corpora use");

    CLI11_PARSE(app, argc, argv);

    try {
        if (extract_cmd->parsed()) {
            const auto cfg = extract_flags.resolve();
            const auto r = awe::cmd_extract_pairs(cfg);
            std::printf("pairs\t%zu distinct\t%llu total\n", r.pairs.distinct(),
                        static_cast<unsigned long long>(r.stats.n_final));
        } else if (train_awe_cmd->parsed()) {
            const auto cfg = train_awe_flags.resolve();
            if (verify) {
                const bool ok = awe::cmd_verify_awe(cfg.paths.output_dir);
                std::puts(ok ? "match" : "mismatch");
                return ok ? 0 : 1;
            }
            const auto r = awe::cmd_train_awe(cfg, resume);
            std::printf("embeddings\t%zu premise rows\t%zu hypothesis rows\thash %s\n",
                        r.embeddings.premise_table().rows(), r.embeddings.hypothesis_table().rows(),
                        r.config_hash.c_str());
        } else if (train_model_cmd->parsed()) {
            const auto cfg = train_model_flags.resolve();
            const auto model = awe::cmd_train_model(cfg);
            const auto& last = model.history.back();
            std::printf("epoch %zu\tloss %.6f\ttrain_acc %.6f\tdev_acc %s\n", last.epoch, last.loss,
                        last.train_accuracy, awe::format_accuracy(last.dev_accuracy).c_str());
        } else if (eval_cmd->parsed()) {
            const auto r = awe::cmd_evaluate(eval_checkpoint, eval_data, eval_tag, eval_vectors, eval_awe, eval_metrics);
            print_evaluation(r.evaluation);
        } else if (sweep_cmd->parsed()) {
            const auto cfg = sweep_flags.resolve();
            const auto r = awe::cmd_sweep(cfg, thresholds);
            std::printf("t_plus\tn_pairs\tdev_acc\ttest_acc\n");
            for (const auto& row : r.rows) {
                std::printf("%.6f\t%llu\t%s\t%s\n", row.t_plus, static_cast<unsigned long long>(row.n_pairs),
                            awe::format_accuracy(row.dev_accuracy).c_str(),
                            awe::format_accuracy(row.test_accuracy).c_str());
            }
            std::printf("base\t-\t%s\t%s\n", awe::format_accuracy(r.base_dev_accuracy).c_str(),
                        awe::format_accuracy(r.base_test_accuracy).c_str());
        } else if (query_cmd->parsed()) {
            const auto emb = awe::load_asymmetric(query_prefix);
            const auto r = awe::cmd_query(emb, query_w, query_c);
            const bool fwd_unk = !r.w_known_premise || !r.c_known_hypothesis;
            const bool bwd_unk = !r.c_known_premise || !r.w_known_hypothesis;
            std::printf("%s -> %s\t%.6f%s\n", query_w.c_str(), query_c.c_str(), r.forward, fwd_unk ? "\t(unk)" : "");
            std::printf("%s -> %s\t%.6f%s\n", query_c.c_str(), query_w.c_str(), r.backward, bwd_unk ? "\t(unk)" : "");
        } else if (dump_cmd->parsed()) {
            const auto vectors = awe::load_text_embeddings_file(dump_vectors);
            const auto emb = awe::load_asymmetric(dump_awe);
            const std::string tsv = awe::cmd_dump_interactions(vectors, emb, dump_premise, dump_hypothesis);
            if (dump_output.empty()) {
                std::cout << tsv;
            } else {
                std::ofstream out(dump_output, std::ios::binary);
                out << tsv;
                if (!out) throw awe::Error("write failure: " + dump_output);
            }
        } else if (synth_cmd->parsed()) {
            awe::SyntheticWorldConfig wc;
            wc.seed = synth_seed;
            const auto world = awe::make_world(wc);
            std::filesystem::create_directories(synth_out);
            const std::filesystem::path dir(synth_out);
            awe::save_text_embeddings_file(world.vectors, (dir / "vectors.txt").string());
            const std::pair<const char*, std::size_t> splits[] = {
                {"train.jsonl", synth_train}, {"dev.jsonl", synth_dev}, {"test.jsonl", synth_test}};
            std::uint64_t offset = 1;
            for (const auto& [name, size] : splits) {
                awe::SyntheticCorpusConfig cc;
                cc.size = size;
                cc.filler_group = synth_group;
                cc.seed = synth_seed * 1000 + offset++;
                awe::write_snli_jsonl(awe::make_corpus(world, cc), (dir / name).string());
            }
            std::ofstream rules(dir / "rules.tsv", std::ios::binary);
            for (const auto& r : world.rules) rules << r.source << '\t' << r.target << '\n';
            std::printf("wrote %s\n", synth_out.c_str());
        }
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 1;
    }
    return 0;
}
