#include "ctxrr/numeric/adam.hpp"

#include <cmath>

#include "ctxrr/numeric/error.hpp"

namespace ctxrr {

Adam::Adam(const std::vector<Matrix>& params, AdamConfig cfg)
    : cfg_(cfg), m_(zeros_like(params)), v_(zeros_like(params)) {}

void Adam::step(std::vector<Matrix>& params, const std::vector<Matrix>& grads) {
  if (params.size() != grads.size() || params.size() != m_.size())
    throw NumericError("adam: parameter/gradient count mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i].same_shape(grads[i]) || !params[i].same_shape(m_[i]))
      throw NumericError("adam: shape mismatch in tensor " + std::to_string(i));
    if (!all_finite(grads[i].data()))
      throw NumericError("adam: non-finite gradient in tensor " + std::to_string(i));
  }
  ++t_;
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& p = params[i].data();
    const auto& g = grads[i].data();
    auto& m = m_[i].data();
    auto& v = v_[i].data();
    for (std::size_t j = 0; j < p.size(); ++j) {
      m[j] = cfg_.beta1 * m[j] + (1.0 - cfg_.beta1) * g[j];
      v[j] = cfg_.beta2 * v[j] + (1.0 - cfg_.beta2) * g[j] * g[j];
      if (g[j] == 0.0 && m[j] == 0.0) continue;
      p[j] -= cfg_.lr * (m[j] / c1) / (std::sqrt(v[j] / c2) + cfg_.eps);
    }
  }
}

}  // namespace ctxrr
