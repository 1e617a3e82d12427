#include "ctxrr/numeric/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "ctxrr/numeric/error.hpp"
#include "ctxrr/numeric/random.hpp"

namespace ctxrr {

namespace {

struct Coord {
  std::size_t tensor;
  std::size_t index;
};

double central_difference(std::vector<Matrix>& params, const Coord& c,
                          const std::function<double()>& loss, double eps) {
  double& x = params[c.tensor].data()[c.index];
  const double saved = x;
  x = saved + eps;
  const double plus = loss();
  x = saved - eps;
  const double minus = loss();
  x = saved;
  return (plus - minus) / (2.0 * eps);
}

}  // namespace

GradCheckResult grad_check(std::vector<Matrix>& params, const std::function<double()>& loss,
                           const std::vector<Matrix>& analytic, GradCheckOptions opts) {
  if (!(opts.eps > 0.0)) throw NumericError("grad_check: eps must be positive");
  if (analytic.size() != params.size()) throw NumericError("grad_check: tensor count mismatch");
  const double first = loss();
  const double second = loss();
  if (first != second) throw NumericError("grad_check: loss closure is not deterministic");

  std::vector<Coord> active, inactive;
  for (std::size_t t = 0; t < params.size(); ++t) {
    if (!params[t].same_shape(analytic[t])) throw NumericError("grad_check: shape mismatch");
    for (std::size_t i = 0; i < params[t].size(); ++i) {
      (std::abs(analytic[t].data()[i]) >= opts.active_threshold ? active : inactive)
          .push_back({t, i});
    }
  }

  Rng rng(opts.seed);
  rng.shuffle(active);
  rng.shuffle(inactive);
  if (active.size() > opts.max_coords) active.resize(opts.max_coords);
  if (inactive.size() > opts.max_coords / 4) inactive.resize(opts.max_coords / 4);

  GradCheckResult res;
  for (const auto& c : active) {
    const double a = analytic[c.tensor].data()[c.index];
    const double n = central_difference(params, c, loss, opts.eps);
    const double rel = std::abs(a - n) / std::max(1e-8, std::abs(a) + std::abs(n));
    res.max_rel_error = std::max(res.max_rel_error, rel);
    ++res.coords_checked;
  }
  for (const auto& c : inactive) {
    const double a = analytic[c.tensor].data()[c.index];
    const double n = central_difference(params, c, loss, opts.eps);
    res.max_abs_error_inactive = std::max(res.max_abs_error_inactive, std::abs(a - n));
    ++res.inactive_checked;
  }
  return res;
}

}  // namespace ctxrr
