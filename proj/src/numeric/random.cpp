#include "ctxrr/numeric/random.hpp"

namespace ctxrr {

void init_uniform(Matrix& m, Rng& rng, double scale) {
  for (double& x : m.data()) x = rng.uniform(-scale, scale);
}

}  // namespace ctxrr
