#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "flipbound/dataset.hpp"
#include "flipbound/exact.hpp"

namespace flipbound {

struct PartitionPlan {
  std::size_t k = 1;
  std::uint64_t seed = 0;
  std::vector<std::vector<std::size_t>> blocks;
};

/// Shuffles the indices with a stream derived from `seed` and cuts them into k
/// blocks of floor(m/k) points; the last block also takes the remainder.
PartitionPlan partition(std::size_t m, std::size_t k, std::uint64_t seed);

/// max(1, floor(m / (2 (d + 1)))): as many blocks as possible while each one
/// keeps at least 2 (d + 1) points.
std::size_t default_k(std::size_t m, std::size_t d);

enum class BlockStatus { Proven, BudgetExhausted, Failed };

const char* to_string(BlockStatus s);

struct BlockResult {
  std::size_t id = 0;
  std::size_t size = 0;
  std::size_t robustness = 0;  // block optimum, or incumbent when not proven
  std::size_t best_bound = 0;
  BlockStatus status = BlockStatus::Proven;
  std::size_t node_count = 0;
  double millis = 0.0;
  std::string error;
};

struct LowerBoundReport {
  std::size_t lower = 0;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<BlockResult> blocks;
};

/// Sums the exact robustness of every block against the same target. Blocks
/// that do not finish contribute nothing, so the sum never exceeds the
/// robustness of the whole dataset. Solver errors are recorded per block.
LowerBoundReport lower_bound(const Dataset& data, const TestTarget& target,
                             const PartitionPlan& plan, const MilpParams& params = {},
                             std::size_t threads = 1);

}  // namespace flipbound
