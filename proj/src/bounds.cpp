#include "flipbound/bounds.hpp"

#include <algorithm>

#include "flipbound/random.hpp"

namespace flipbound {

BoundsReport compute_bounds(const Dataset& data, const TestTarget& target,
                            const BoundParams& params) {
  target.validate(data.dim());
  const std::size_t k = params.k.value_or(default_k(data.size(), data.dim()));
  BoundsReport out;
  const auto plan = partition(data.size(), k, derive_seed(params.seed, "lower"));
  out.lower = lower_bound(data, target, plan, params.milp, params.threads);

  UpperParams up = params.upper;
  up.train.seed = derive_seed(params.seed, "upper");
  up.threads = params.threads;
  out.upper = upper_bound(data, target, up);
  return out;
}

}  // namespace flipbound
