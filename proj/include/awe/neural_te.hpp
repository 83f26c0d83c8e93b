#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "awe/awe_trainer.hpp"
#include "awe/common.hpp"
#include "awe/corpus.hpp"
#include "awe/embedding_io.hpp"
#include "awe/matrix.hpp"

namespace awe {

enum class Variant { Plain, Awe };

std::string_view variant_name(Variant v);
Variant parse_variant(std::string_view name);

/// Architecture. F: d -> hidden -> hidden, G: 2d -> hidden -> hidden,
/// H: 2 hidden -> hidden -> classes. Every network is affine-ReLU-affine.
struct ModelConfig {
    std::size_t input_dim = 16;
    std::size_t hidden = 32;
    std::size_t class_count = 2;
    Variant variant = Variant::Plain;

    void validate() const;
    bool operator==(const ModelConfig&) const = default;
};

/// Shape and location of one named tensor inside ModelParams::values.
struct TensorSpec {
    std::string name;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t offset = 0;

    std::size_t size() const noexcept { return rows * cols; }
};

/// Read-only view of one feed-forward network's parameters.
struct FeedForwardView {
    std::size_t in = 0, hidden = 0, out = 0;
    const double* w1 = nullptr;  // hidden x in
    const double* b1 = nullptr;  // hidden
    const double* w2 = nullptr;  // out x hidden
    const double* b2 = nullptr;  // out
    std::size_t offset = 0;      // of w1 within the flat parameter vector
};

/// All trainable parameters of one model, stored flat. Tensors, in order:
/// F.{W1,b1,W2,b2}, G.{...}, H.{...}, eta_raw. The plain variant keeps
/// eta_raw but never reads it.
class ModelParams {
public:
    ModelParams() = default;
    explicit ModelParams(const ModelConfig& config);

    const ModelConfig& config() const noexcept { return config_; }
    std::vector<double>& values() noexcept { return values_; }
    const std::vector<double>& values() const noexcept { return values_; }
    const std::vector<TensorSpec>& tensors() const noexcept { return tensors_; }
    const TensorSpec& tensor(std::string_view name) const;

    FeedForwardView f() const { return view(0); }
    FeedForwardView g() const { return view(1); }
    FeedForwardView h() const { return view(2); }

    std::size_t eta_index() const noexcept { return values_.size() - 1; }
    double eta_raw() const { return values_.back(); }
    double& eta_raw() { return values_.back(); }

private:
    FeedForwardView view(std::size_t net) const;

    ModelConfig config_;
    std::vector<TensorSpec> tensors_;
    std::vector<double> values_;
};

/// Asymmetric vectors for one sentence pair: u for each premise word and v
/// for each hypothesis word (UNK rows for unknown words).
struct AweInputs {
    std::vector<Vector> u;
    std::vector<Vector> v;
};

struct Example {
    std::vector<Vector> premise;
    std::vector<Vector> hypothesis;
    std::optional<AweInputs> awe;
    std::size_t label = 0;
};

struct ForwardOptions {
    double dropout = 0.0;
    Rng* rng = nullptr;                   ///< dropout masks; required when dropout > 0
    std::optional<double> eta_override;   ///< pins the mixture weight
};

/// Intermediates of one forward pass, consumed by backpropagation.
struct FeedForwardTrace {
    Vector input;  ///< after dropout
    Vector mask;   ///< inverted-dropout scale per input, empty when off
    Vector pre;
    Vector act;
    Vector out;
};

struct ForwardCache {
    std::vector<FeedForwardTrace> f_premise, f_hypothesis;
    Matrix e;            ///< F(p_i).F(h_j)
    Matrix row_weights;  ///< softmax over j, gives beta
    Matrix col_weights;  ///< softmax over i (stored lp x lh), gives alpha
    std::vector<Vector> beta, alpha;
    std::vector<Vector> beta_prime, alpha_prime;  // AWE only
    std::vector<Vector> beta_hat, alpha_hat;
    double eta = 1.0;
    bool eta_pinned = false;
    std::vector<FeedForwardTrace> g_premise, g_hypothesis;
    FeedForwardTrace h;
    Vector log_probs;
};

/// Class log-probabilities for one sentence pair.
Vector forward(const ModelParams& params, const Example& example, const ForwardOptions& options = {},
               ForwardCache* cache = nullptr);

struct LossAndGradients {
    double loss = 0.0;  ///< mean negative log-likelihood
    std::vector<double> gradients;
};

LossAndGradients loss_and_gradients(const ModelParams& params, std::span<const Example> batch,
                                    const ForwardOptions& options = {});

class Adam {
public:
    explicit Adam(std::size_t size, double step_size = 0.05, double beta1 = 0.9,
                  double beta2 = 0.999, double epsilon = 1e-8);

    /// Gradient-descent update of `params` in place.
    void step(std::vector<double>& params, std::span<const double> gradients);
    std::uint64_t steps() const noexcept { return t_; }

private:
    std::vector<double> m_, v_;
    std::uint64_t t_ = 0;
    double lr_, beta1_, beta2_, eps_;
};

struct ModelTrainConfig {
    std::size_t epochs = 30;
    std::size_t batch_size = 4;
    double learning_rate = 0.05;
    double dropout = 0.2;
    std::uint64_t seed = 1;
};

struct EpochRecord {
    std::size_t epoch = 0;
    double loss = 0.0;
    double train_accuracy = 0.0;
    std::optional<double> dev_accuracy;
};

struct TrainedModel {
    ModelParams params;
    std::vector<EpochRecord> history;
};

/// Glorot-uniform weights, zero biases, eta_raw = 0.
ModelParams initialize_params(const ModelConfig& config, std::uint64_t seed);

TrainedModel train_model(std::span<const Example> train, const ModelConfig& config,
                         const ModelTrainConfig& train_config,
                         std::span<const Example> dev = {});

struct Evaluation {
    double accuracy = 0.0;
    std::size_t correct = 0;
    std::size_t total = 0;
    std::vector<std::vector<std::size_t>> confusion;  ///< [gold][predicted]
};

/// Argmax prediction, ties to the lower class index.
std::size_t predict(const ModelParams& params, const Example& example);
Evaluation evaluate(const ModelParams& params, std::span<const Example> dataset);

/// Converts labeled sentence pairs into model inputs. Words missing from
/// `vectors` get zero vectors. `awe` must be given iff the variant uses it.
std::vector<Example> make_examples(const std::vector<SentencePair>& pairs,
                                   const EmbeddingTable& vectors, std::size_t class_count,
                                   const AsymmetricEmbeddings* awe);

std::size_t label_index(Label label, std::size_t class_count);

/// JSON checkpoint with named row-major tensors at 9 significant digits.
void save_checkpoint(const ModelParams& params, std::uint64_t seed, const std::string& path);
ModelParams load_checkpoint(const std::string& path, std::uint64_t* seed = nullptr);

}  // namespace awe
