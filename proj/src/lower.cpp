#include "flipbound/lower.hpp"

#include <chrono>
#include <exception>

#include "flipbound/errors.hpp"
#include "flipbound/parallel.hpp"
#include "flipbound/random.hpp"

namespace flipbound {

PartitionPlan partition(std::size_t m, std::size_t k, std::uint64_t seed) {
  if (k < 1 || k > m) {
    throw InputError("k must lie in [1, " + std::to_string(m) + "], got " + std::to_string(k));
  }
  Rng rng(derive_seed(seed, "partition"));
  const auto perm = rng.permutation(m);
  PartitionPlan plan{k, seed, {}};
  const std::size_t base = m / k;
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t begin = j * base, end = j + 1 == k ? m : begin + base;
    plan.blocks.emplace_back(perm.begin() + static_cast<std::ptrdiff_t>(begin),
                             perm.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return plan;
}

std::size_t default_k(std::size_t m, std::size_t d) {
  return std::max<std::size_t>(1, m / (2 * (d + 1)));
}

const char* to_string(BlockStatus s) {
  switch (s) {
    case BlockStatus::Proven: return "Proven";
    case BlockStatus::BudgetExhausted: return "BudgetExhausted";
    case BlockStatus::Failed: return "Failed";
  }
  return "?";
}

LowerBoundReport lower_bound(const Dataset& data, const TestTarget& target,
                             const PartitionPlan& plan, const MilpParams& params,
                             std::size_t threads) {
  target.validate(data.dim());
  std::vector<bool> seen(data.size(), false);
  std::size_t covered = 0;
  for (const auto& block : plan.blocks) {
    for (std::size_t i : block) {
      if (i >= data.size() || seen[i]) throw InputError("partition blocks must be disjoint indices");
      seen[i] = true;
      ++covered;
    }
  }
  if (covered != data.size() || plan.blocks.size() != plan.k) {
    throw InputError("partition does not cover the dataset");
  }

  LowerBoundReport report{0, plan.k, plan.seed, std::vector<BlockResult>(plan.k)};
  parallel_for(plan.k, threads, [&](std::size_t j) {
    BlockResult& out = report.blocks[j];
    out.id = j;
    out.size = plan.blocks[j].size();
    const auto start = std::chrono::steady_clock::now();
    try {
      const auto r = solve_bnb(
          encode(data.subset(plan.blocks[j]), target, params.big_m, params.eps), params);
      out.robustness = r.robustness;
      out.best_bound = r.best_bound;
      out.node_count = r.node_count;
      out.status = r.status == SolveStatus::Proven ? BlockStatus::Proven
                                                   : BlockStatus::BudgetExhausted;
    } catch (const std::exception& e) {
      out.status = BlockStatus::Failed;
      out.error = e.what();
    }
    out.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                     .count();
  });
  for (const auto& b : report.blocks) {
    if (b.status == BlockStatus::Proven) report.lower += b.robustness;
  }
  return report;
}

}  // namespace flipbound
