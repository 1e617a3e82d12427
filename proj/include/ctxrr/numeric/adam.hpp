#pragma once

#include <cstdint>
#include <vector>

#include "ctxrr/numeric/tensor.hpp"

namespace ctxrr {

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Bias-corrected Adam over a flat list of parameter tensors.
class Adam {
 public:
  Adam(const std::vector<Matrix>& params, AdamConfig cfg);

  /// Applies one update. Throws NumericError on a non-finite gradient or a
  /// shape mismatch; parameters are untouched in that case.
  void step(std::vector<Matrix>& params, const std::vector<Matrix>& grads);

  std::uint64_t steps() const { return t_; }
  const AdamConfig& config() const { return cfg_; }
  const std::vector<Matrix>& first_moment() const { return m_; }
  const std::vector<Matrix>& second_moment() const { return v_; }

 private:
  AdamConfig cfg_;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
  std::uint64_t t_ = 0;
};

}  // namespace ctxrr
