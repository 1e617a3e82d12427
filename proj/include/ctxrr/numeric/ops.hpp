#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ctxrr/numeric/tensor.hpp"

namespace ctxrr {

/// Max-shifted softmax. Throws NumericError on NaN input or empty vector.
Vector softmax(std::span<const double> v);

/// Backward of softmax given its output `p` and upstream gradient `dp`.
Vector softmax_backward(std::span<const double> p, std::span<const double> dp);

/// Cosine similarity. A zero vector on either side yields 0 and bumps
/// degenerate_cosine_count().
double cosine(std::span<const double> u, std::span<const double> v);
std::size_t degenerate_cosine_count();

/// Accumulates d cos(u,v)/du * g into du and d/dv * g into dv.
void cosine_backward(std::span<const double> u, std::span<const double> v, double g,
                     std::span<double> du, std::span<double> dv);

/// L2-normalized copy; the zero vector maps to itself.
Vector l2_normalize(std::span<const double> x);
/// Accumulates into dx the gradient through x -> x/|x| given d(x/|x|).
void l2_normalize_backward(std::span<const double> x, std::span<const double> dxhat,
                           std::span<double> dx);

double sigmoid(double x);

/// max(0, margin - pos + neg)
double margin_ranking_loss(double margin, double pos, double neg);

inline constexpr double kProbFloor = 1e-12;
/// -log(probs[target] + 1e-12)
double cross_entropy(std::span<const double> probs, std::size_t target);

/// J x d weights l_{kj} = (1 - j/J) - (k/d)(1 - 2j/J), 1-indexed j, k.
Matrix position_encoding(std::size_t sentence_len, std::size_t dim);

/// Elementwise maximum over rows. `argmax_rows`, when given, receives for each
/// column the row that supplied the maximum (first on ties).
Vector max_pool(const Matrix& states, std::vector<std::size_t>* argmax_rows = nullptr);

std::size_t argmax(std::span<const double> v);

/// Indices of the `k` largest entries, ordered by (-value, index).
std::vector<std::size_t> top_k_indices(std::span<const double> v, std::size_t k);

/// Rescales all gradients so their global L2 norm is at most `max_norm`.
/// Returns the norm before clipping.
double clip_global_norm(std::vector<Matrix>& grads, double max_norm);

}  // namespace ctxrr
