#pragma once

#include <cstddef>
#include <functional>

#include "ctxrr/numeric/random.hpp"

namespace ctxrr {

struct NegativeDraw {
  std::size_t id = 0;
  std::size_t draws = 0;
  bool positive = false;  // loss_of(id) > 0
};

/// Draws uniform non-gold candidates until `loss_of(id) > 0` or `max_tries`
/// draws have been made, in which case the last draw is returned. Throws
/// DataError when there are fewer than two candidates.
NegativeDraw negative_sample(std::size_t gold, std::size_t n_candidates, Rng& rng,
                             const std::function<double(std::size_t)>& loss_of,
                             std::size_t max_tries = 100);

}  // namespace ctxrr
