#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "flipbound/dataset.hpp"

namespace flipbound {

// ---------------------------------------------------------------------------
// Dense linear programming
// ---------------------------------------------------------------------------

enum class Relation { LessEq, GreaterEq, Equal };

struct LpConstraint {
  std::vector<double> coeffs;
  Relation relation = Relation::LessEq;
  double rhs = 0.0;
};

/// minimize objective . x  subject to constraints and lower <= x <= upper.
/// Bounds may be infinite; lower == upper fixes a variable.
struct LpProblem {
  std::vector<double> objective;
  std::vector<LpConstraint> constraints;
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t num_vars() const { return objective.size(); }

  /// Adds a variable with bounds [lo, hi] and cost c; returns its index.
  std::size_t add_var(double lo, double hi, double c = 0.0);
  void add_constraint(std::vector<double> coeffs, Relation rel, double rhs);

  /// Throws InputError on shape mismatches, non-finite coefficients or lo > hi.
  void validate() const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

const char* to_string(LpStatus s);

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  double objective_value = 0.0;
  std::vector<double> assignment;
  std::size_t pivots = 0;
};

struct LpTolerances {
  double feasibility = 1e-7;  ///< tau_f
  double objective = 1e-6;    ///< tau_o
  double pivot = 1e-9;
  double reduced_cost = 1e-9;
  std::size_t bland_after = 1000;  ///< degenerate pivots before Bland's rule
  /// 0 selects 50 * (variables + constraints).
  std::size_t iteration_cap = 0;
};

/// Two-phase bounded-variable primal simplex on a dense tableau.
/// Deterministic for identical input. Throws NumericalError when the
/// iteration cap is hit or the returned point fails its residual check.
LpSolution solve_lp(const LpProblem& problem, const LpTolerances& tol = {});

// ---------------------------------------------------------------------------
// Linear classifiers and separability
// ---------------------------------------------------------------------------

/// f(x) = sign(w . x + b)
struct LinearClassifier {
  std::vector<double> w;
  double b = 0.0;

  double score(std::span<const double> x) const;
  /// +1, -1, or 0 on the decision boundary.
  int predict(std::span<const double> x) const;
};

struct FeasibilityWitness {
  bool feasible = false;
  std::optional<LinearClassifier> classifier;
  /// Smallest y * (w . x + b) of the witness over all constrained points.
  double min_margin = 0.0;
};

struct SeparabilityParams {
  double eps = 1e-10;   ///< strict-inequality margin
  double cap = 1000.0;  ///< box bound on every weight and the bias
  bool bias = true;     ///< false pins b = 0 (classifiers through the origin)
  LpTolerances lp{};
};

/// Is there (w, b) with |w_j|, |b| <= cap, y_i (w . x_i + b) >= eps for every
/// row, and the same for the target when given? Solved as a max-margin LP;
/// the returned witness is re-checked in floating point before it is trusted.
FeasibilityWitness feasible_labeling(const Dataset& points, const TestTarget& target,
                                     const SeparabilityParams& params = {});
FeasibilityWitness feasible_labeling(const Dataset& points, const SeparabilityParams& params = {});

struct Consistency {
  std::vector<std::size_t> misclassified;
  bool target_ok = true;
};

/// Indices i with sign(w . x_i + b) != y_i, where a zero score counts as wrong
/// for both labels. target_ok requires a strictly correct sign on the target.
Consistency check_consistency(const LinearClassifier& c, const Dataset& points,
                              const std::optional<TestTarget>& target = std::nullopt);

}  // namespace flipbound
