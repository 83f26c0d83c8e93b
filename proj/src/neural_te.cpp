#include "awe/neural_te.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>

namespace awe {

std::string_view variant_name(Variant v) { return v == Variant::Awe ? "awe" : "plain"; }

Variant parse_variant(std::string_view name) {
    if (name == "plain") return Variant::Plain;
    if (name == "awe") return Variant::Awe;
    throw Error("unknown model variant '" + std::string(name) + "' (expected plain or awe)");
}

void ModelConfig::validate() const {
    if (input_dim == 0) throw Error("model input dimension must be positive");
    if (hidden == 0) throw Error("model hidden width must be positive");
    if (class_count != 2 && class_count != 3) throw Error("class count must be 2 or 3");
}

ModelParams::ModelParams(const ModelConfig& config) : config_(config) {
    config_.validate();
    const std::size_t d = config.input_dim, hid = config.hidden;
    const std::size_t shapes[3][2] = {{d, hid}, {2 * d, hid}, {2 * hid, config.class_count}};
    const char* names[3] = {"F", "G", "H"};
    std::size_t offset = 0;
    auto add = [&](std::string name, std::size_t rows, std::size_t cols) {
        tensors_.push_back({std::move(name), rows, cols, offset});
        offset += rows * cols;
    };
    for (int n = 0; n < 3; ++n) {
        const std::size_t in = shapes[n][0], out = shapes[n][1];
        add(std::string(names[n]) + ".W1", hid, in);
        add(std::string(names[n]) + ".b1", hid, 1);
        add(std::string(names[n]) + ".W2", out, hid);
        add(std::string(names[n]) + ".b2", out, 1);
    }
    add("eta_raw", 1, 1);
    values_.assign(offset, 0.0);
}

const TensorSpec& ModelParams::tensor(std::string_view name) const {
    for (const auto& t : tensors_) {
        if (t.name == name) return t;
    }
    throw Error("no tensor named '" + std::string(name) + "'");
}

FeedForwardView ModelParams::view(std::size_t net) const {
    const TensorSpec& w1 = tensors_[net * 4];
    const TensorSpec& w2 = tensors_[net * 4 + 2];
    FeedForwardView v;
    v.in = w1.cols;
    v.hidden = w1.rows;
    v.out = w2.rows;
    v.w1 = values_.data() + w1.offset;
    v.b1 = values_.data() + tensors_[net * 4 + 1].offset;
    v.w2 = values_.data() + w2.offset;
    v.b2 = values_.data() + tensors_[net * 4 + 3].offset;
    v.offset = w1.offset;
    return v;
}

namespace {

// Offsets of b1, W2, b2 follow W1 contiguously.
struct GradSlots {
    double* w1;
    double* b1;
    double* w2;
    double* b2;
};

GradSlots slots(const FeedForwardView& net, std::vector<double>& grad) {
    double* base = grad.data() + net.offset;
    GradSlots s;
    s.w1 = base;
    s.b1 = s.w1 + net.hidden * net.in;
    s.w2 = s.b1 + net.hidden;
    s.b2 = s.w2 + net.out * net.hidden;
    return s;
}

FeedForwardTrace ff_forward(const FeedForwardView& net, Vector input, const ForwardOptions& opt) {
    if (input.size() != net.in) throw Error("feed-forward input has wrong width");
    FeedForwardTrace t;
    if (opt.dropout > 0.0) {
        if (!opt.rng) throw Error("dropout requires an RNG");
        const double keep_scale = 1.0 / (1.0 - opt.dropout);
        t.mask.resize(input.size());
        for (std::size_t k = 0; k < input.size(); ++k) {
            t.mask[k] = opt.rng->uniform() < opt.dropout ? 0.0 : keep_scale;
            input[k] *= t.mask[k];
        }
    }
    t.input = std::move(input);
    t.pre.resize(net.hidden);
    t.act.resize(net.hidden);
    for (std::size_t h = 0; h < net.hidden; ++h) {
        t.pre[h] = net.b1[h] + dot(net.w1 + h * net.in, t.input.data(), net.in);
        t.act[h] = t.pre[h] > 0.0 ? t.pre[h] : 0.0;
    }
    t.out.resize(net.out);
    for (std::size_t o = 0; o < net.out; ++o) {
        t.out[o] = net.b2[o] + dot(net.w2 + o * net.hidden, t.act.data(), net.hidden);
    }
    return t;
}

// Accumulates parameter gradients; returns d(loss)/d(raw input).
Vector ff_backward(const FeedForwardView& net, const FeedForwardTrace& t, const Vector& dout,
                   std::vector<double>& grad) {
    GradSlots g = slots(net, grad);
    Vector dact(net.hidden, 0.0);
    for (std::size_t o = 0; o < net.out; ++o) {
        g.b2[o] += dout[o];
        const double* w = net.w2 + o * net.hidden;
        double* gw = g.w2 + o * net.hidden;
        for (std::size_t h = 0; h < net.hidden; ++h) {
            gw[h] += dout[o] * t.act[h];
            dact[h] += dout[o] * w[h];
        }
    }
    Vector din(net.in, 0.0);
    for (std::size_t h = 0; h < net.hidden; ++h) {
        if (!(t.pre[h] > 0.0)) continue;
        const double dpre = dact[h];
        g.b1[h] += dpre;
        const double* w = net.w1 + h * net.in;
        double* gw = g.w1 + h * net.in;
        for (std::size_t k = 0; k < net.in; ++k) {
            gw[k] += dpre * t.input[k];
            din[k] += dpre * w[k];
        }
    }
    if (!t.mask.empty()) {
        for (std::size_t k = 0; k < net.in; ++k) din[k] *= t.mask[k];
    }
    return din;
}

Vector concat(const Vector& a, const Vector& b) {
    Vector out(a);
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

// out_i = sum_j weights(i, j) * vecs_j
std::vector<Vector> mix_rows(const Matrix& weights, std::span<const Vector> vecs) {
    const std::size_t dim = vecs.front().size();
    std::vector<Vector> out(weights.rows(), Vector(dim, 0.0));
    for (std::size_t i = 0; i < weights.rows(); ++i)
        for (std::size_t j = 0; j < weights.cols(); ++j) {
            const double w = weights(i, j);
            for (std::size_t k = 0; k < dim; ++k) out[i][k] += w * vecs[j][k];
        }
    return out;
}

Matrix softmax_rows(const Matrix& logits) {
    Matrix w(logits.rows(), logits.cols());
    for (std::size_t i = 0; i < logits.rows(); ++i) {
        const auto in = logits.row(i);
        const double mx = *std::max_element(in.begin(), in.end());
        double z = 0.0;
        for (std::size_t j = 0; j < in.size(); ++j) z += w(i, j) = std::exp(in[j] - mx);
        for (std::size_t j = 0; j < in.size(); ++j) w(i, j) /= z;
    }
    return w;
}

// Softmax over i for every column j; result keeps the lp x lh layout.
Matrix softmax_cols(const Matrix& logits) { return softmax_rows(logits.transposed()).transposed(); }

void mix(double eta, const std::vector<Vector>& a, const std::vector<Vector>& b,
         std::vector<Vector>& out) {
    out = a;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t k = 0; k < a[i].size(); ++k) out[i][k] = eta * a[i][k] + (1.0 - eta) * b[i][k];
}

void check_example(const ModelParams& params, const Example& ex) {
    const auto& cfg = params.config();
    if (ex.premise.empty() || ex.hypothesis.empty()) throw Error("empty sentence in example");
    for (const auto& v : ex.premise)
        if (v.size() != cfg.input_dim) throw Error("premise vector has wrong dimension");
    for (const auto& v : ex.hypothesis)
        if (v.size() != cfg.input_dim) throw Error("hypothesis vector has wrong dimension");
    if (cfg.variant == Variant::Awe) {
        if (!ex.awe) throw Error("AWE variant needs asymmetric embeddings for every example");
        if (ex.awe->u.size() != ex.premise.size() || ex.awe->v.size() != ex.hypothesis.size()) {
            throw Error("asymmetric inputs do not match sentence lengths");
        }
        const std::size_t d = ex.awe->u.front().size();
        for (const auto& u : ex.awe->u)
            if (u.size() != d) throw Error("asymmetric vectors have inconsistent dimension");
        for (const auto& v : ex.awe->v)
            if (v.size() != d) throw Error("asymmetric vectors have inconsistent dimension");
    }
}

}  // namespace

Vector forward(const ModelParams& params, const Example& ex, const ForwardOptions& opt,
               ForwardCache* cache_out) {
    check_example(params, ex);
    ForwardCache local;
    ForwardCache& c = cache_out ? *cache_out : local;
    const auto F = params.f(), G = params.g(), H = params.h();
    const std::size_t lp = ex.premise.size(), lh = ex.hypothesis.size();

    c.f_premise.clear();
    c.f_hypothesis.clear();
    for (const auto& p : ex.premise) c.f_premise.push_back(ff_forward(F, p, opt));
    for (const auto& h : ex.hypothesis) c.f_hypothesis.push_back(ff_forward(F, h, opt));

    c.e = Matrix(lp, lh);
    for (std::size_t i = 0; i < lp; ++i)
        for (std::size_t j = 0; j < lh; ++j)
            c.e(i, j) = dot(c.f_premise[i].out.data(), c.f_hypothesis[j].out.data(), F.out);
    c.row_weights = softmax_rows(c.e);
    c.col_weights = softmax_cols(c.e);
    c.beta = mix_rows(c.row_weights, ex.hypothesis);
    c.alpha = mix_rows(c.col_weights.transposed(), ex.premise);

    if (params.config().variant == Variant::Awe) {
        Matrix ep(lp, lh);
        for (std::size_t i = 0; i < lp; ++i)
            for (std::size_t j = 0; j < lh; ++j)
                ep(i, j) = dot(ex.awe->v[j].data(), ex.awe->u[i].data(), ex.awe->u[i].size());
        c.beta_prime = mix_rows(softmax_rows(ep), ex.hypothesis);
        c.alpha_prime = mix_rows(softmax_cols(ep).transposed(), ex.premise);
        c.eta_pinned = opt.eta_override.has_value();
        c.eta = c.eta_pinned ? *opt.eta_override : sigmoid(params.eta_raw());
        mix(c.eta, c.beta, c.beta_prime, c.beta_hat);
        mix(c.eta, c.alpha, c.alpha_prime, c.alpha_hat);
    } else {
        c.beta_prime.clear();
        c.alpha_prime.clear();
        c.beta_hat = c.beta;
        c.alpha_hat = c.alpha;
        c.eta = 1.0;
        c.eta_pinned = true;
    }

    Vector v1(G.out, 0.0), v2(G.out, 0.0);
    c.g_premise.clear();
    c.g_hypothesis.clear();
    for (std::size_t i = 0; i < lp; ++i) {
        c.g_premise.push_back(ff_forward(G, concat(ex.premise[i], c.beta_hat[i]), opt));
        for (std::size_t k = 0; k < G.out; ++k) v1[k] += c.g_premise.back().out[k];
    }
    for (std::size_t j = 0; j < lh; ++j) {
        c.g_hypothesis.push_back(ff_forward(G, concat(ex.hypothesis[j], c.alpha_hat[j]), opt));
        for (std::size_t k = 0; k < G.out; ++k) v2[k] += c.g_hypothesis.back().out[k];
    }
    c.h = ff_forward(H, concat(v1, v2), opt);

    const Vector& logits = c.h.out;
    const double mx = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (double l : logits) z += std::exp(l - mx);
    const double log_z = mx + std::log(z);
    c.log_probs.resize(logits.size());
    for (std::size_t k = 0; k < logits.size(); ++k) c.log_probs[k] = logits[k] - log_z;
    return c.log_probs;
}

namespace {

// Backpropagates d(loss)/d(logits) of one example into `grad`.
void backward(const ModelParams& params, const Example& ex, const ForwardCache& c,
              const Vector& dlogits, std::vector<double>& grad) {
    const auto F = params.f(), G = params.g(), H = params.h();
    const std::size_t lp = ex.premise.size(), lh = ex.hypothesis.size();
    const std::size_t d = params.config().input_dim;

    const Vector dh_in = ff_backward(H, c.h, dlogits, grad);
    const Vector dv1(dh_in.begin(), dh_in.begin() + static_cast<std::ptrdiff_t>(G.out));
    const Vector dv2(dh_in.begin() + static_cast<std::ptrdiff_t>(G.out), dh_in.end());

    std::vector<Vector> dbeta_hat(lp), dalpha_hat(lh);
    for (std::size_t i = 0; i < lp; ++i) {
        const Vector din = ff_backward(G, c.g_premise[i], dv1, grad);
        dbeta_hat[i].assign(din.begin() + static_cast<std::ptrdiff_t>(d), din.end());
    }
    for (std::size_t j = 0; j < lh; ++j) {
        const Vector din = ff_backward(G, c.g_hypothesis[j], dv2, grad);
        dalpha_hat[j].assign(din.begin() + static_cast<std::ptrdiff_t>(d), din.end());
    }

    const bool awe = params.config().variant == Variant::Awe;
    const double eta = c.eta;
    if (awe && !c.eta_pinned) {
        double deta = 0.0;
        for (std::size_t i = 0; i < lp; ++i)
            for (std::size_t k = 0; k < d; ++k) deta += dbeta_hat[i][k] * (c.beta[i][k] - c.beta_prime[i][k]);
        for (std::size_t j = 0; j < lh; ++j)
            for (std::size_t k = 0; k < d; ++k) deta += dalpha_hat[j][k] * (c.alpha[j][k] - c.alpha_prime[j][k]);
        grad[params.eta_index()] += deta * eta * (1.0 - eta);
    }
    const double scale = awe ? eta : 1.0;

    // d(loss)/d(e) through both softmaxes.
    Matrix de(lp, lh, 0.0);
    for (std::size_t i = 0; i < lp; ++i) {
        Vector dA(lh);
        double weighted = 0.0;
        for (std::size_t j = 0; j < lh; ++j) {
            dA[j] = scale * dot(dbeta_hat[i].data(), ex.hypothesis[j].data(), d);
            weighted += c.row_weights(i, j) * dA[j];
        }
        for (std::size_t j = 0; j < lh; ++j) de(i, j) += c.row_weights(i, j) * (dA[j] - weighted);
    }
    for (std::size_t j = 0; j < lh; ++j) {
        Vector dB(lp);
        double weighted = 0.0;
        for (std::size_t i = 0; i < lp; ++i) {
            dB[i] = scale * dot(dalpha_hat[j].data(), ex.premise[i].data(), d);
            weighted += c.col_weights(i, j) * dB[i];
        }
        for (std::size_t i = 0; i < lp; ++i) de(i, j) += c.col_weights(i, j) * (dB[i] - weighted);
    }

    for (std::size_t i = 0; i < lp; ++i) {
        Vector dfp(F.out, 0.0);
        for (std::size_t j = 0; j < lh; ++j)
            for (std::size_t k = 0; k < F.out; ++k) dfp[k] += de(i, j) * c.f_hypothesis[j].out[k];
        ff_backward(F, c.f_premise[i], dfp, grad);
    }
    for (std::size_t j = 0; j < lh; ++j) {
        Vector dfh(F.out, 0.0);
        for (std::size_t i = 0; i < lp; ++i)
            for (std::size_t k = 0; k < F.out; ++k) dfh[k] += de(i, j) * c.f_premise[i].out[k];
        ff_backward(F, c.f_hypothesis[j], dfh, grad);
    }
}

}  // namespace

LossAndGradients loss_and_gradients(const ModelParams& params, std::span<const Example> batch,
                                    const ForwardOptions& options) {
    if (batch.empty()) throw Error("loss over an empty batch");
    const std::size_t classes = params.config().class_count;
    LossAndGradients out;
    out.gradients.assign(params.values().size(), 0.0);
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    ForwardCache cache;
    for (const auto& ex : batch) {
        if (ex.label >= classes) throw Error("label index out of range");
        const Vector logp = forward(params, ex, options, &cache);
        out.loss -= logp[ex.label];
        Vector dlogits(classes);
        for (std::size_t k = 0; k < classes; ++k) {
            dlogits[k] = (std::exp(logp[k]) - (k == ex.label ? 1.0 : 0.0)) * inv_n;
        }
        backward(params, ex, cache, dlogits, out.gradients);
    }
    out.loss *= inv_n;
    return out;
}

Adam::Adam(std::size_t size, double step_size, double beta1, double beta2, double epsilon)
    : m_(size, 0.0), v_(size, 0.0), lr_(step_size), beta1_(beta1), beta2_(beta2), eps_(epsilon) {
    if (!(step_size >= 0.0)) throw Error("Adam step size must be non-negative");
}

void Adam::step(std::vector<double>& params, std::span<const double> g) {
    if (params.size() != m_.size() || g.size() != m_.size()) throw Error("Adam: size mismatch");
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t k = 0; k < params.size(); ++k) {
        m_[k] = beta1_ * m_[k] + (1.0 - beta1_) * g[k];
        v_[k] = beta2_ * v_[k] + (1.0 - beta2_) * g[k] * g[k];
        const double m_hat = m_[k] / c1;
        const double v_hat = v_[k] / c2;
        params[k] -= lr_ * m_hat / (std::sqrt(v_hat) + eps_);
    }
}

ModelParams initialize_params(const ModelConfig& config, std::uint64_t seed) {
    ModelParams params(config);
    Rng rng(seed);
    for (const auto& t : params.tensors()) {
        if (t.cols == 1 || t.name == "eta_raw") continue;  // biases and eta start at 0
        const double bound = std::sqrt(6.0 / static_cast<double>(t.rows + t.cols));
        for (std::size_t k = 0; k < t.size(); ++k) params.values()[t.offset + k] = rng.uniform(-bound, bound);
    }
    return params;
}

std::size_t predict(const ModelParams& params, const Example& example) {
    const Vector logp = forward(params, example);
    return static_cast<std::size_t>(std::max_element(logp.begin(), logp.end()) - logp.begin());
}

Evaluation evaluate(const ModelParams& params, std::span<const Example> dataset) {
    if (dataset.empty()) throw Error("cannot evaluate on an empty dataset");
    const std::size_t classes = params.config().class_count;
    Evaluation ev;
    ev.confusion.assign(classes, std::vector<std::size_t>(classes, 0));
    for (const auto& ex : dataset) {
        if (ex.label >= classes) throw Error("label index out of range");
        const std::size_t pred = predict(params, ex);
        ++ev.confusion[ex.label][pred];
        if (pred == ex.label) ++ev.correct;
    }
    ev.total = dataset.size();
    ev.accuracy = static_cast<double>(ev.correct) / static_cast<double>(ev.total);
    return ev;
}

TrainedModel train_model(std::span<const Example> train, const ModelConfig& config,
                         const ModelTrainConfig& tc, std::span<const Example> dev) {
    if (train.empty()) throw Error("cannot train on an empty dataset");
    if (tc.batch_size == 0) throw Error("batch size must be positive");
    if (tc.epochs == 0) throw Error("epochs must be positive");
    if (!(tc.dropout >= 0.0 && tc.dropout < 1.0)) throw Error("dropout must lie in [0, 1)");
    for (const auto& ex : train)
        if (ex.label >= config.class_count) throw Error("training label out of range");

    TrainedModel result{initialize_params(config, tc.seed), {}};
    ModelParams& params = result.params;
    Adam adam(params.values().size(), tc.learning_rate);
    // Separate streams so dropout draws never perturb the shuffle order.
    Rng order_rng(tc.seed ^ 0x9E3779B97F4A7C15ULL);
    Rng dropout_rng(tc.seed ^ 0xD1B54A32D192ED03ULL);

    std::vector<std::size_t> order(train.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::vector<Example> batch;
    ForwardOptions opts;
    opts.dropout = tc.dropout;
    opts.rng = &dropout_rng;

    for (std::size_t epoch = 0; epoch < tc.epochs; ++epoch) {
        order_rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += tc.batch_size) {
            const std::size_t end = std::min(order.size(), start + tc.batch_size);
            batch.clear();
            for (std::size_t k = start; k < end; ++k) batch.push_back(train[order[k]]);
            const auto lg = loss_and_gradients(params, batch, opts);
            adam.step(params.values(), lg.gradients);
        }

        EpochRecord rec;
        rec.epoch = epoch + 1;
        std::size_t correct = 0;
        double loss = 0.0;
        for (const auto& ex : train) {
            const Vector logp = forward(params, ex);
            loss -= logp[ex.label];
            const auto pred = static_cast<std::size_t>(std::max_element(logp.begin(), logp.end()) - logp.begin());
            if (pred == ex.label) ++correct;
        }
        rec.loss = loss / static_cast<double>(train.size());
        rec.train_accuracy = static_cast<double>(correct) / static_cast<double>(train.size());
        if (!dev.empty()) rec.dev_accuracy = evaluate(params, dev).accuracy;
        result.history.push_back(rec);
    }
    return result;
}

std::size_t label_index(Label label, std::size_t class_count) {
    const auto idx = static_cast<std::size_t>(label);
    if (idx >= class_count) {
        throw Error("label '" + std::string(label_name(label)) + "' does not fit a " +
                    std::to_string(class_count) + "-class model");
    }
    return idx;
}

std::vector<Example> make_examples(const std::vector<SentencePair>& pairs,
                                   const EmbeddingTable& vectors, std::size_t class_count,
                                   const AsymmetricEmbeddings* awe) {
    auto lookup = [&](const std::string& word) {
        if (auto row = vectors.find(word)) return Vector(row->begin(), row->end());
        return Vector(vectors.dim(), 0.0);
    };
    std::vector<Example> out;
    out.reserve(pairs.size());
    for (const auto& sp : pairs) {
        Example ex;
        for (const auto& w : sp.premise) ex.premise.push_back(lookup(w));
        for (const auto& w : sp.hypothesis) ex.hypothesis.push_back(lookup(w));
        if (awe) {
            AweInputs in;
            for (const auto& w : sp.premise) {
                const auto u = awe->u(w);
                in.u.emplace_back(u.begin(), u.end());
            }
            for (const auto& w : sp.hypothesis) {
                const auto v = awe->v(w);
                in.v.emplace_back(v.begin(), v.end());
            }
            ex.awe = std::move(in);
        }
        ex.label = label_index(sp.label, class_count);
        out.push_back(std::move(ex));
    }
    return out;
}

namespace {

double round_9(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return std::strtod(buf, nullptr);
}

}  // namespace

void save_checkpoint(const ModelParams& params, std::uint64_t seed, const std::string& path) {
    const auto& cfg = params.config();
    nlohmann::ordered_json j;
    j["format"] = "awe-decomp-att-checkpoint";
    j["version"] = 1;
    j["variant"] = variant_name(cfg.variant);
    j["config"] = {{"input_dim", cfg.input_dim},
                   {"hidden", cfg.hidden},
                   {"class_count", cfg.class_count}};
    j["seed"] = seed;
    nlohmann::ordered_json tensors = nlohmann::ordered_json::object();
    for (const auto& t : params.tensors()) {
        std::vector<double> vals(params.values().begin() + static_cast<std::ptrdiff_t>(t.offset),
                                 params.values().begin() + static_cast<std::ptrdiff_t>(t.offset + t.size()));
        for (double& v : vals) v = round_9(v);
        tensors[t.name] = {{"shape", {t.rows, t.cols}}, {"values", vals}};
    }
    j["tensors"] = std::move(tensors);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path);
    out << j.dump(1) << '\n';
    if (!out) throw Error("write failure: " + path);
}

ModelParams load_checkpoint(const std::string& path, std::uint64_t* seed) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open checkpoint: " + path);
    nlohmann::json j;
    try {
        in >> j;
        ModelConfig cfg;
        cfg.variant = parse_variant(j.at("variant").get<std::string>());
        cfg.input_dim = j.at("config").at("input_dim").get<std::size_t>();
        cfg.hidden = j.at("config").at("hidden").get<std::size_t>();
        cfg.class_count = j.at("config").at("class_count").get<std::size_t>();
        ModelParams params(cfg);
        for (const auto& t : params.tensors()) {
            const auto& entry = j.at("tensors").at(t.name);
            const auto shape = entry.at("shape").get<std::vector<std::size_t>>();
            const auto vals = entry.at("values").get<std::vector<double>>();
            if (shape.size() != 2 || shape[0] != t.rows || shape[1] != t.cols || vals.size() != t.size()) {
                throw Error("tensor '" + t.name + "' has the wrong shape");
            }
            std::copy(vals.begin(), vals.end(), params.values().begin() + static_cast<std::ptrdiff_t>(t.offset));
        }
        if (seed) *seed = j.value("seed", std::uint64_t{0});
        return params;
    } catch (const nlohmann::json::exception& e) {
        throw Error("malformed checkpoint " + path + ": " + e.what());
    }
}

}  // namespace awe
