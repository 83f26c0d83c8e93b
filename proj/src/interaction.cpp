#include "awe/interaction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "awe/embedding_io.hpp"

namespace awe {

Matrix stack_rows(std::span<const Vector> vectors) {
    if (vectors.empty()) return {};
    Matrix m(vectors.size(), vectors.front().size());
    for (std::size_t r = 0; r < vectors.size(); ++r) {
        if (vectors[r].size() != m.cols()) throw Error("stack_rows: ragged input");
        std::copy(vectors[r].begin(), vectors[r].end(), m.row(r).begin());
    }
    return m;
}

namespace {

// Keeps 1 + max away from zero when a row is entirely anti-aligned.
constexpr double kMinRowMax = -1.0 + 1e-6;

double row_max(std::span<const double> row) { return *std::max_element(row.begin(), row.end()); }
double row_min(std::span<const double> row) { return *std::min_element(row.begin(), row.end()); }

double guarded_denominator(std::span<const double> i0_row) {
    return 1.0 + std::clamp(row_max(i0_row), kMinRowMax, 1.0);
}

void require_nonempty(std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) throw Error("interaction: empty sentence");
}

// Row reductions need at least one column.
void require_columns(const Matrix& m, const char* what) {
    if (m.rows() != 0 && m.cols() == 0) throw Error(std::string(what) + ": empty hypothesis");
}

}  // namespace

double cosine_or_zero(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw Error("interaction: vector dimensions differ");
    double ab = 0.0, aa = 0.0, bb = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        ab += a[k] * b[k];
        aa += a[k] * a[k];
        bb += b[k] * b[k];
    }
    if (aa <= 0.0 || bb <= 0.0) return 0.0;
    return std::clamp(ab / (std::sqrt(aa) * std::sqrt(bb)), -1.0, 1.0);
}

Matrix interaction_sym(std::span<const Vector> premise, std::span<const Vector> hypothesis) {
    require_nonempty(premise.size(), hypothesis.size());
    Matrix m(premise.size(), hypothesis.size());
    for (std::size_t i = 0; i < premise.size(); ++i)
        for (std::size_t j = 0; j < hypothesis.size(); ++j)
            m(i, j) = cosine_or_zero(premise[i], hypothesis[j]);
    return m;
}

Matrix interaction_ent(const AsymmetricEmbeddings& emb, const Tokens& premise,
                       const Tokens& hypothesis) {
    require_nonempty(premise.size(), hypothesis.size());
    Matrix m(premise.size(), hypothesis.size());
    for (std::size_t i = 0; i < premise.size(); ++i) {
        const auto u = emb.u(premise[i]);
        for (std::size_t j = 0; j < hypothesis.size(); ++j) m(i, j) = cosine_or_zero(u, emb.v(hypothesis[j]));
    }
    return m;
}

Matrix interaction_combined(const Matrix& i0, const Matrix& i1) {
    if (!i0.same_shape(i1)) throw Error("interaction_combined: shape mismatch");
    Matrix m(i0.rows(), i0.cols());
    for (std::size_t k = 0; k < m.data().size(); ++k) m.data()[k] = std::max(i0.data()[k], i1.data()[k]);
    return m;
}

std::vector<double> importance_deiste(const Matrix& i0) {
    require_columns(i0, "importance_deiste");
    std::vector<double> a(i0.rows());
    for (std::size_t i = 0; i < i0.rows(); ++i) a[i] = 1.0 / guarded_denominator(i0.row(i));
    return a;
}

std::vector<double> importance_awe(const Matrix& i0, const Matrix& i1) {
    if (!i0.same_shape(i1)) throw Error("importance_awe: shape mismatch");
    require_columns(i0, "importance_awe");
    std::vector<double> a(i0.rows());
    for (std::size_t i = 0; i < i0.rows(); ++i) {
        a[i] = (1.0 - row_min(i1.row(i))) / guarded_denominator(i0.row(i));
    }
    return a;
}

Matrix row_softmax(const Matrix& interaction) {
    require_columns(interaction, "row_softmax");
    Matrix w(interaction.rows(), interaction.cols());
    for (std::size_t i = 0; i < interaction.rows(); ++i) {
        const auto in = interaction.row(i);
        auto out = w.row(i);
        const double mx = row_max(in);
        double z = 0.0;
        for (std::size_t j = 0; j < in.size(); ++j) z += out[j] = std::exp(in[j] - mx);
        for (double& x : out) x /= z;
    }
    return w;
}

std::vector<Vector> soft_align(const Matrix& interaction, std::span<const Vector> hypothesis) {
    if (hypothesis.empty()) throw Error("soft_align: empty hypothesis");
    if (interaction.cols() != hypothesis.size()) throw Error("soft_align: shape mismatch");
    const Matrix weights = row_softmax(interaction);
    const std::size_t dim = hypothesis.front().size();
    std::vector<Vector> out(interaction.rows(), Vector(dim, 0.0));
    for (std::size_t i = 0; i < interaction.rows(); ++i)
        for (std::size_t j = 0; j < hypothesis.size(); ++j)
            for (std::size_t k = 0; k < dim; ++k) out[i][k] += weights(i, j) * hypothesis[j][k];
    return out;
}

std::vector<std::size_t> hard_best_match(const Matrix& interaction) {
    require_columns(interaction, "hard_best_match");
    std::vector<std::size_t> x(interaction.rows(), 0);
    for (std::size_t i = 0; i < interaction.rows(); ++i) {
        const auto row = interaction.row(i);
        x[i] = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
    }
    return x;
}

}  // namespace awe
