#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "awe/awe_trainer.hpp"
#include "awe/corpus.hpp"
#include "awe/matrix.hpp"

namespace awe {

// Word-word interaction matrices between a premise (rows) and a hypothesis
// (columns), and the per-premise-word quantities derived from them.

/// Cosine of two vectors, 0 when either has zero norm.
double cosine_or_zero(std::span<const double> a, std::span<const double> b);

/// I0[i][j] = cos(p_i, h_j).
Matrix interaction_sym(std::span<const Vector> premise, std::span<const Vector> hypothesis);

/// I1[i][j] = cos(u(P_i), v(H_j)), with UNK1/UNK2 for unknown words.
Matrix interaction_ent(const AsymmetricEmbeddings& emb, const Tokens& premise,
                       const Tokens& hypothesis);

/// Elementwise max of I0 and I1.
Matrix interaction_combined(const Matrix& i0, const Matrix& i1);

/// a_i = 1 / (1 + max_j I0[i][j]).
std::vector<double> importance_deiste(const Matrix& i0);

/// a_i = (1 - min_j I1[i][j]) / (1 + max_j I0[i][j]).
std::vector<double> importance_awe(const Matrix& i0, const Matrix& i1);

/// Row i is sum_j softmax(I[i,:])_j h_j.
std::vector<Vector> soft_align(const Matrix& interaction, std::span<const Vector> hypothesis);

/// Row-wise softmax of I, max-subtracted.
Matrix row_softmax(const Matrix& interaction);

/// x_i = lowest j attaining max_j I[i][j].
std::vector<std::size_t> hard_best_match(const Matrix& interaction);

}  // namespace awe
