#include <cmath>
#include <limits>

#include "doctest.h"
#include "flipbound/errors.hpp"
#include "flipbound/linsep.hpp"
#include "flipbound/random.hpp"

using namespace flipbound;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double activity(const LpConstraint& c, const std::vector<double>& x) {
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) s += c.coeffs[j] * x[j];
  return s;
}

bool satisfies(const LpProblem& p, const std::vector<double>& x, double tol) {
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] < p.lower[j] - tol || x[j] > p.upper[j] + tol) return false;
  }
  for (const auto& c : p.constraints) {
    const double a = activity(c, x);
    if (c.relation == Relation::LessEq && a > c.rhs + tol) return false;
    if (c.relation == Relation::GreaterEq && a < c.rhs - tol) return false;
    if (c.relation == Relation::Equal && std::abs(a - c.rhs) > tol) return false;
  }
  return true;
}

// Vertex enumeration for 2-variable LPs with a finite box: the optimum of a
// bounded feasible LP is attained where two of its boundary lines cross.
std::optional<double> vertex_oracle_2d(const LpProblem& p) {
  struct Line {
    double a0, a1, r;
  };
  std::vector<Line> lines;
  for (const auto& c : p.constraints) lines.push_back({c.coeffs[0], c.coeffs[1], c.rhs});
  lines.push_back({1, 0, p.lower[0]});
  lines.push_back({1, 0, p.upper[0]});
  lines.push_back({0, 1, p.lower[1]});
  lines.push_back({0, 1, p.upper[1]});
  std::optional<double> best;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    for (std::size_t k = i + 1; k < lines.size(); ++k) {
      const double det = lines[i].a0 * lines[k].a1 - lines[i].a1 * lines[k].a0;
      if (std::abs(det) < 1e-12) continue;
      const double x0 = (lines[i].r * lines[k].a1 - lines[i].a1 * lines[k].r) / det;
      const double x1 = (lines[i].a0 * lines[k].r - lines[i].r * lines[k].a0) / det;
      const std::vector<double> x{x0, x1};
      if (!satisfies(p, x, 1e-9)) continue;
      const double v = p.objective[0] * x0 + p.objective[1] * x1;
      if (!best || v < *best) best = v;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("solve_lp: single bound forces the optimum") {
  LpProblem p;
  p.add_var(0.0, 10.0, 1.0);
  p.add_constraint({1.0}, Relation::GreaterEq, 3.0);
  const auto s = solve_lp(p);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.objective_value == doctest::Approx(3.0));
  CHECK(s.assignment[0] == doctest::Approx(3.0));
}

TEST_CASE("solve_lp: contradictory rows are infeasible") {
  LpProblem p;
  p.add_var(-kInf, kInf);
  p.add_constraint({1.0}, Relation::GreaterEq, 1.0);
  p.add_constraint({1.0}, Relation::LessEq, 0.0);
  CHECK(solve_lp(p).status == LpStatus::Infeasible);
}

TEST_CASE("solve_lp: unbounded direction is reported") {
  LpProblem p;
  p.add_var(0.0, kInf, -1.0);
  p.add_var(0.0, kInf, 0.0);
  p.add_constraint({1.0, -1.0}, Relation::LessEq, 1.0);
  CHECK(solve_lp(p).status == LpStatus::Unbounded);
}

TEST_CASE("solve_lp: equalities, free and reflected variables") {
  // min x + 2y - z  s.t. x + y + z = 4, x - y >= -1, y >= -2 (row),
  // x free, y <= 3 with no lower bound, z in [0, 2].
  // Substituting x = 4 - y - z gives 4 + y - 2z, minimized at y = -2, z = 2.
  LpProblem p;
  p.add_var(-kInf, kInf, 1.0);
  p.add_var(-kInf, 3.0, 2.0);
  p.add_var(0.0, 2.0, -1.0);
  p.add_constraint({1, 1, 1}, Relation::Equal, 4.0);
  p.add_constraint({1, -1, 0}, Relation::GreaterEq, -1.0);
  p.add_constraint({0, 1, 0}, Relation::GreaterEq, -2.0);
  const auto s = solve_lp(p);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(satisfies(p, s.assignment, 1e-9));
  CHECK(s.objective_value == doctest::Approx(-2.0));
  CHECK(s.assignment[0] == doctest::Approx(4.0));
  CHECK(s.assignment[1] == doctest::Approx(-2.0));
  CHECK(s.assignment[2] == doctest::Approx(2.0));
}

TEST_CASE("solve_lp: fixed variables are substituted") {
  LpProblem p;
  p.add_var(2.0, 2.0, 1.0);
  p.add_var(0.0, 5.0, 1.0);
  p.add_constraint({1.0, 1.0}, Relation::GreaterEq, 4.5);
  const auto s = solve_lp(p);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.assignment[0] == 2.0);
  CHECK(s.assignment[1] == doctest::Approx(2.5));
  CHECK(s.objective_value == doctest::Approx(4.5));
}

TEST_CASE("solve_lp: degenerate box LP with many bound flips") {
  // min -sum x_j s.t. x_j in [0, 1], sum x_j <= 3.5: optimum -3.5
  LpProblem p;
  const std::size_t n = 8;
  for (std::size_t j = 0; j < n; ++j) p.add_var(0.0, 1.0, -1.0);
  p.add_constraint(std::vector<double>(n, 1.0), Relation::LessEq, 3.5);
  const auto s = solve_lp(p);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.objective_value == doctest::Approx(-3.5));
}

TEST_CASE("solve_lp: random 2-D LPs agree with vertex enumeration") {
  Rng rng(derive_seed(11, "lp-2d"));
  int optimal = 0, infeasible = 0;
  for (int trial = 0; trial < 400; ++trial) {
    LpProblem p;
    p.add_var(-rng.uniform(0, 5), rng.uniform(0, 5), rng.uniform(-3, 3));
    p.add_var(-rng.uniform(0, 5), rng.uniform(0, 5), rng.uniform(-3, 3));
    const auto rows = 1 + rng.uniform_index(5);
    for (std::size_t r = 0; r < rows; ++r) {
      const auto rel = static_cast<Relation>(rng.uniform_index(2));
      p.add_constraint({std::round(rng.uniform(-4, 4)), std::round(rng.uniform(-4, 4))}, rel,
                       std::round(rng.uniform(-6, 6)));
    }
    const auto s = solve_lp(p);
    const auto oracle = vertex_oracle_2d(p);
    if (!oracle) {
      CHECK(s.status == LpStatus::Infeasible);
      ++infeasible;
      continue;
    }
    REQUIRE(s.status == LpStatus::Optimal);
    ++optimal;
    CHECK(satisfies(p, s.assignment, 1e-7));
    CHECK(s.objective_value == doctest::Approx(*oracle).epsilon(1e-6));
    // Re-substituted objective equals the reported one.
    const double resub = p.objective[0] * s.assignment[0] + p.objective[1] * s.assignment[1];
    CHECK(std::abs(resub - s.objective_value) <= 1e-6);
  }
  CHECK(optimal > 50);
  CHECK(infeasible > 5);
}

TEST_CASE("solve_lp: deterministic for identical input") {
  LpProblem p;
  for (int j = 0; j < 4; ++j) p.add_var(-1.0, 1.0, j % 2 ? 1.0 : -1.0);
  p.add_constraint({1, 1, 1, 1}, Relation::LessEq, 0.5);
  p.add_constraint({1, -1, 1, -1}, Relation::GreaterEq, -0.25);
  const auto a = solve_lp(p);
  const auto b = solve_lp(p);
  CHECK(a.assignment == b.assignment);
  CHECK(a.objective_value == b.objective_value);
}

TEST_CASE("solve_lp: invalid problems are rejected") {
  LpProblem p;
  CHECK_THROWS_AS(solve_lp(p), InputError);
  p.add_var(1.0, 0.0);
  CHECK_THROWS_AS(solve_lp(p), InputError);
  LpProblem q;
  q.add_var(-kInf, kInf);
  CHECK_THROWS_AS(solve_lp(q), InputError);  // no rows, no bounds
}

TEST_CASE("solve_lp: iteration cap raises a numerical error") {
  LpProblem p;
  for (int j = 0; j < 6; ++j) p.add_var(0.0, 1.0, -1.0 - j);
  p.add_constraint({1, 1, 1, 1, 1, 1}, Relation::LessEq, 2.5);
  p.add_constraint({1, -1, 1, -1, 1, -1}, Relation::GreaterEq, -1.0);
  LpTolerances tol;
  tol.iteration_cap = 1;
  CHECK_THROWS_AS(solve_lp(p, tol), NumericalError);
}
