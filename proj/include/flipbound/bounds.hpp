#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "flipbound/dataset.hpp"
#include "flipbound/exact.hpp"
#include "flipbound/lower.hpp"
#include "flipbound/upper.hpp"

namespace flipbound {

struct BoundParams {
  MilpParams milp{};
  std::optional<std::size_t> k;  // unset: default_k(m, d)
  UpperParams upper{};
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

struct BoundsReport {
  LowerBoundReport lower;
  UpperBoundReport upper;
};

/// Lower and upper bound for one target. Partition and training seeds are both
/// derived from params.seed; params.upper.train.seed is ignored.
BoundsReport compute_bounds(const Dataset& data, const TestTarget& target,
                            const BoundParams& params = {});

}  // namespace flipbound
