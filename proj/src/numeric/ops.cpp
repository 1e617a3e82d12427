#include "ctxrr/numeric/ops.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>

#include "ctxrr/numeric/error.hpp"

namespace ctxrr {

namespace {
std::atomic<std::size_t> g_degenerate_cosines{0};
}

Vector softmax(std::span<const double> v) {
  if (v.empty()) throw NumericError("softmax of empty vector");
  double mx = v[0];
  for (double x : v) {
    if (std::isnan(x)) throw NumericError("softmax input contains NaN");
    mx = std::max(mx, x);
  }
  Vector out(v.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::exp(v[i] - mx);
    sum += out[i];
  }
  for (double& x : out) x /= sum;
  return out;
}

Vector softmax_backward(std::span<const double> p, std::span<const double> dp) {
  const double s = dot(p, dp);
  Vector out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i] * (dp[i] - s);
  return out;
}

double cosine(std::span<const double> u, std::span<const double> v) {
  const double nu = norm2(u);
  const double nv = norm2(v);
  if (nu == 0.0 || nv == 0.0) {
    g_degenerate_cosines.fetch_add(1, std::memory_order_relaxed);
    return 0.0;
  }
  return std::clamp(dot(u, v) / (nu * nv), -1.0, 1.0);
}

std::size_t degenerate_cosine_count() { return g_degenerate_cosines.load(); }

void cosine_backward(std::span<const double> u, std::span<const double> v, double g,
                     std::span<double> du, std::span<double> dv) {
  const double nu = norm2(u);
  const double nv = norm2(v);
  if (nu == 0.0 || nv == 0.0 || g == 0.0) return;
  const double c = dot(u, v) / (nu * nv);
  const double inv = 1.0 / (nu * nv);
  for (std::size_t i = 0; i < u.size(); ++i) {
    du[i] += g * (v[i] * inv - c * u[i] / (nu * nu));
    dv[i] += g * (u[i] * inv - c * v[i] / (nv * nv));
  }
}

Vector l2_normalize(std::span<const double> x) {
  Vector out(x.begin(), x.end());
  const double n = norm2(x);
  if (n > 0.0)
    for (double& e : out) e /= n;
  return out;
}

void l2_normalize_backward(std::span<const double> x, std::span<const double> dxhat,
                           std::span<double> dx) {
  const double n = norm2(x);
  if (n == 0.0) return;
  double proj = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) proj += x[i] * dxhat[i];
  proj /= n;
  for (std::size_t i = 0; i < x.size(); ++i) dx[i] += (dxhat[i] - (x[i] / n) * proj) / n;
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double margin_ranking_loss(double margin, double pos, double neg) {
  return std::max(0.0, margin - pos + neg);
}

double cross_entropy(std::span<const double> probs, std::size_t target) {
  return -std::log(probs[target] + kProbFloor);
}

Matrix position_encoding(std::size_t sentence_len, std::size_t dim) {
  Matrix l(sentence_len, dim);
  const double J = static_cast<double>(sentence_len);
  const double d = static_cast<double>(dim);
  for (std::size_t j = 1; j <= sentence_len; ++j)
    for (std::size_t k = 1; k <= dim; ++k)
      l(j - 1, k - 1) = (1.0 - j / J) - (k / d) * (1.0 - 2.0 * j / J);
  return l;
}

Vector max_pool(const Matrix& states, std::vector<std::size_t>* argmax_rows) {
  Vector out(states.row(0).begin(), states.row(0).end());
  if (argmax_rows) argmax_rows->assign(states.cols(), 0);
  for (std::size_t r = 1; r < states.rows(); ++r) {
    auto row = states.row(r);
    for (std::size_t c = 0; c < states.cols(); ++c) {
      if (row[c] > out[c]) {
        out[c] = row[c];
        if (argmax_rows) (*argmax_rows)[c] = r;
      }
    }
  }
  return out;
}

std::size_t argmax(std::span<const double> v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

std::vector<std::size_t> top_k_indices(std::span<const double> v, std::size_t k) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  k = std::min(k, v.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (v[a] != v[b]) return v[a] > v[b];
                      return a < b;
                    });
  idx.resize(k);
  return idx;
}

double clip_global_norm(std::vector<Matrix>& grads, double max_norm) {
  double sq = 0.0;
  for (const auto& g : grads)
    for (double x : g.data()) sq += x * x;
  const double n = std::sqrt(sq);
  if (n > max_norm && n > 0.0) {
    const double s = max_norm / n;
    for (auto& g : grads)
      for (double& x : g.data()) x *= s;
  }
  return n;
}

}  // namespace ctxrr
