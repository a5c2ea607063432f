#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "flipbound/dataset.hpp"
#include "flipbound/linsep.hpp"

namespace flipbound {

struct MilpParams {
  double big_m = 1000.0;
  double eps = 1e-10;
  std::size_t node_budget = 1'000'000;
  double integrality = 1e-6;
  LpTolerances lp{};
};

/// Big-M program for the minimum number of label flips:
///
///   minimize   sum_i delta_i
///   subject to y_t (w . x_t + b) >= eps
///              y_i (w . x_i + b) + M delta_i >= eps           for every i
///              y_i (w . x_i + b) - M (1 - delta_i) <= -eps    for every i
///              |w_j| <= M, |b| <= M, delta_i in {0, 1}
///
/// Variables are laid out as w_1..w_d, b, delta_1..delta_m.
struct MilpInstance {
  Dataset data;
  TestTarget target;
  LpProblem base;
  std::vector<std::size_t> binary_indices;
  double big_m = 0.0;
  double eps = 0.0;
  bool bias = true;

  std::size_t dim() const { return data.dim(); }
  std::size_t num_points() const { return data.size(); }
  std::size_t bias_index() const { return data.dim(); }
  std::size_t delta_index(std::size_t i) const { return data.dim() + 1 + i; }
};

/// With bias = false the bias variable is fixed at zero.
MilpInstance encode(const Dataset& data, const TestTarget& target, double big_m = 1000.0,
                    double eps = 1e-10, bool bias = true);

/// Plain-text dump in the usual LP-file layout, for debugging.
void write_lp_text(const MilpInstance& inst, std::ostream& out);

enum class SolveStatus { Proven, BudgetExhausted };

const char* to_string(SolveStatus s);

struct ExactResult {
  /// Optimum when Proven; best incumbent (a valid upper bound) otherwise.
  std::size_t robustness = 0;
  std::vector<std::size_t> flip_set;
  LinearClassifier witness;
  std::size_t node_count = 0;
  /// Node relaxations the simplex could not solve reliably; those nodes were
  /// branched on without a bound.
  std::size_t lp_failures = 0;
  SolveStatus status = SolveStatus::Proven;
  /// Certified lower bound on the optimum; equals robustness when Proven.
  std::size_t best_bound = 0;
};

/// Best-first branch-and-bound over LP relaxations of `inst`.
/// Integer-looking relaxations are only accepted after the rounded flip set is
/// re-certified by feasible_labeling, so tolerance slack in the relaxation can
/// never produce an unrealizable answer. Throws TargetUnreachable when even the
/// root relaxation is infeasible.
ExactResult solve_bnb(const MilpInstance& inst, const MilpParams& params = {},
                      std::optional<std::size_t> incumbent_hint = std::nullopt);

inline constexpr std::size_t kBruteForceLimit = 20;

/// Enumerates flip sets by increasing size (lexicographic within a size) and
/// returns the first one that admits a consistent classifier. m <= 20.
ExactResult brute_force_robustness(const Dataset& data, const TestTarget& target,
                                   const SeparabilityParams& params = {});

/// Polynomial certificate check: the witness classifies the target strictly
/// as desired and is strictly consistent with the data after flipping.
bool verify_certificate(const Dataset& data, const TestTarget& target,
                        const std::vector<std::size_t>& flip_set, const LinearClassifier& witness);

}  // namespace flipbound
