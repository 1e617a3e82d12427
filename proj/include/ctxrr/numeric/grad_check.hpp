#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ctxrr/numeric/tensor.hpp"

namespace ctxrr {

struct GradCheckOptions {
  double eps = 1e-5;
  /// Coordinates to probe; all active coordinates are used when fewer exist.
  std::size_t max_coords = 256;
  std::uint64_t seed = 1;
  /// Coordinates with |analytic| below this are treated as inactive and are
  /// checked only in absolute terms.
  double active_threshold = 1e-7;
};

struct GradCheckResult {
  double max_rel_error = 0.0;
  double max_abs_error_inactive = 0.0;
  std::size_t coords_checked = 0;
  std::size_t inactive_checked = 0;
};

/// Central finite differences against an analytic gradient.
///
/// `loss` must evaluate the scalar loss at the current contents of `params`.
/// Relative error per coordinate is |a - n| / max(1e-8, |a| + |n|). The
/// closure is evaluated twice up front; differing values throw NumericError,
/// as does eps <= 0.
GradCheckResult grad_check(std::vector<Matrix>& params, const std::function<double()>& loss,
                           const std::vector<Matrix>& analytic, GradCheckOptions opts = {});

}  // namespace ctxrr
