#include <algorithm>
#include <cmath>

#include "flipbound/errors.hpp"
#include "flipbound/linsep.hpp"

namespace flipbound {

double LinearClassifier::score(std::span<const double> x) const {
  double s = b;
  for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * x[j];
  return s;
}

int LinearClassifier::predict(std::span<const double> x) const {
  const double s = score(x);
  return s > 0.0 ? 1 : (s < 0.0 ? -1 : 0);
}

namespace {

FeasibilityWitness solve_max_margin(const Dataset& points, const TestTarget* target,
                                    const SeparabilityParams& params) {
  if (!(params.eps > 0.0)) throw InputError("margin eps must be positive");
  if (!(params.cap > 0.0)) throw InputError("weight cap must be positive");
  const std::size_t d = points.dim();
  if (target) target->validate(d);

  // Variables: w_1..w_d, b, t. Maximize t subject to y (w . x + b) >= t.
  LpProblem lp;
  for (std::size_t j = 0; j < d; ++j) lp.add_var(-params.cap, params.cap);
  const double bias_cap = params.bias ? params.cap : 0.0;
  lp.add_var(-bias_cap, bias_cap);
  const std::size_t t_var = lp.add_var(0.0, 1.0, -1.0);
  const auto add_row = [&](std::span<const double> x, Label y) {
    std::vector<double> a(d + 2, 0.0);
    for (std::size_t j = 0; j < d; ++j) a[j] = y * x[j];
    a[d] = y;
    a[t_var] = -1.0;
    lp.add_constraint(std::move(a), Relation::GreaterEq, 0.0);
  };
  for (std::size_t i = 0; i < points.size(); ++i) add_row(points.row(i), points.label(i));
  if (target) add_row(target->x, target->y);

  const LpSolution sol = solve_lp(lp, params.lp);
  if (sol.status != LpStatus::Optimal) {
    throw NumericalError(std::string("max-margin LP ended ") + to_string(sol.status));
  }
  LinearClassifier c;
  c.w.assign(sol.assignment.begin(), sol.assignment.begin() + static_cast<std::ptrdiff_t>(d));
  c.b = sol.assignment[d];

  double min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    min_margin = std::min(min_margin, points.label(i) * c.score(points.row(i)));
  }
  if (target) min_margin = std::min(min_margin, target->y * c.score(target->x));

  FeasibilityWitness out;
  out.min_margin = min_margin;
  out.feasible = min_margin >= params.eps;
  if (out.feasible) out.classifier = std::move(c);
  return out;
}

}  // namespace

FeasibilityWitness feasible_labeling(const Dataset& points, const TestTarget& target,
                                     const SeparabilityParams& params) {
  return solve_max_margin(points, &target, params);
}

FeasibilityWitness feasible_labeling(const Dataset& points, const SeparabilityParams& params) {
  return solve_max_margin(points, nullptr, params);
}

Consistency check_consistency(const LinearClassifier& c, const Dataset& points,
                              const std::optional<TestTarget>& target) {
  if (c.w.size() != points.dim()) throw InputError("classifier dimension mismatch");
  Consistency out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (c.predict(points.row(i)) != points.label(i)) out.misclassified.push_back(i);
  }
  if (target) {
    target->validate(points.dim());
    out.target_ok = c.predict(target->x) == target->y;
  }
  return out;
}

}  // namespace flipbound
