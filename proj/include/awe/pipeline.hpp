#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "awe/awe_trainer.hpp"
#include "awe/neural_te.hpp"
#include "awe/pair_extraction.hpp"

namespace awe {

// Orchestration of the extract -> train-awe -> train-model -> evaluate
// pipeline. Every stage reads its inputs from files named in a
// PipelineConfig and writes its artifacts under `output_dir`.

struct PipelinePaths {
    std::string train;          ///< corpus used for mining and model training
    std::string dev;            ///< optional
    std::string test;           ///< optional
    std::string pretrained;     ///< vectors used for pair mining
    std::string model_vectors;  ///< model input vectors; defaults to `pretrained`
    std::string output_dir = "out";
};

struct PipelineConfig {
    PipelinePaths paths;
    double t_plus = 0.7;
    double t_minus = 0.9;
    TrainConfig awe;
    ModelConfig model;
    ModelTrainConfig model_training;
    std::uint64_t seed = 7;

    void validate() const;

    /// Stage seeds, derived by fixed offsets from `seed`.
    std::uint64_t awe_seed() const { return seed + 1; }
    std::uint64_t model_seed() const { return seed + 2; }

    std::string model_vectors_path() const {
        return paths.model_vectors.empty() ? paths.pretrained : paths.model_vectors;
    }
};

/// Unknown keys are rejected; missing keys keep their defaults.
PipelineConfig config_from_json(const nlohmann::json& j);
nlohmann::ordered_json config_to_json(const PipelineConfig& config);
PipelineConfig load_pipeline_config(const std::string& path);

/// Artifact locations inside the output directory.
struct ArtifactPaths {
    std::string pairs;
    std::string extract_stats;
    std::string awe_prefix;
    std::string awe_sidecar;
    std::string checkpoint;
    std::string history;
    std::string metrics;
    std::string sweep;
    std::string sweep_summary;

    explicit ArtifactPaths(const std::string& dir);
};

struct ExtractOutcome {
    WordPairSet pairs;
    ExtractionStats stats;
};

ExtractOutcome cmd_extract_pairs(const PipelineConfig& config);

struct AweOutcome {
    AsymmetricEmbeddings embeddings;
    std::string config_hash;
};

/// Trains on the pair file in the output directory. `resume_prefix` names a
/// previous run's embedding files.
AweOutcome cmd_train_awe(const PipelineConfig& config,
                         const std::optional<std::string>& resume_prefix = std::nullopt);

/// Re-runs training from the sidecar in `output_dir` and compares against
/// the stored embedding files byte for byte.
bool cmd_verify_awe(const std::string& output_dir);

/// Hash of the settings that determine the embedding artifacts.
std::string awe_config_hash(const TrainConfig& config, const std::string& pairs_path);

TrainedModel cmd_train_model(const PipelineConfig& config);

struct EvaluateOutcome {
    Evaluation evaluation;
    nlohmann::ordered_json metrics;
};

/// Evaluates a checkpoint on a corpus file and writes the metrics JSON.
/// `awe_prefix` must be given for an AWE checkpoint.
EvaluateOutcome cmd_evaluate(const std::string& checkpoint, const std::string& dataset,
                             const std::string& dataset_tag, const std::string& vectors,
                             const std::optional<std::string>& awe_prefix,
                             const std::string& metrics_path);

struct SweepRow {
    double t_plus = 0.0;
    std::uint64_t n_pairs = 0;
    std::optional<double> dev_accuracy;
    std::optional<double> test_accuracy;
};

struct SweepOutcome {
    std::vector<SweepRow> rows;
    std::optional<double> base_dev_accuracy;
    std::optional<double> base_test_accuracy;
};

/// For each threshold (duplicates dropped): extract, train embeddings, train
/// the AWE model, evaluate. Also trains the plain model once as reference.
SweepOutcome cmd_sweep(const PipelineConfig& config, std::vector<double> thresholds);

struct QueryResult {
    double forward = 0.0;   ///< score(w -> c)
    double backward = 0.0;  ///< score(c -> w)
    bool w_known_premise = false;
    bool c_known_hypothesis = false;
    bool c_known_premise = false;
    bool w_known_hypothesis = false;
};

QueryResult cmd_query(const AsymmetricEmbeddings& emb, const std::string& w, const std::string& c);

/// TSV dump of I0, I1, I', and both importance vectors for one pair.
std::string cmd_dump_interactions(const EmbeddingTable& vectors, const AsymmetricEmbeddings& emb,
                                  const std::string& premise, const std::string& hypothesis);

std::string format_accuracy(const std::optional<double>& acc);

}  // namespace awe
