#include <sstream>

#include "doctest.h"
#include "flipbound/errors.hpp"
#include "flipbound/exact.hpp"
#include "oracles.hpp"

using namespace flipbound;

namespace {

Dataset k3_dataset() {
  return Dataset(4, {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 1, 1, 0, 1, 0, 1, 1, 1, 1, 0, 1, 1},
                 {-1, -1, -1, 1, 1, 1});
}

void check_result(const Dataset& data, const TestTarget& target, const ExactResult& r) {
  CHECK(r.flip_set.size() == r.robustness);
  CHECK(verify_certificate(data, target, r.flip_set, r.witness));
  const auto again = feasible_labeling(data.flipped(r.flip_set), target);
  CHECK(again.feasible);
}

}  // namespace

TEST_CASE("encode: variable and constraint counts") {
  const Dataset d(2, {1, 2, 3, 4, 5, 6}, {1, -1, 1});
  const auto inst = encode(d, TestTarget{{0, 1}, 1});
  CHECK(inst.base.num_vars() == 6);
  CHECK(inst.base.constraints.size() == 7);
  CHECK(inst.binary_indices == std::vector<std::size_t>{3, 4, 5});
  for (std::size_t v = 0; v < 3; ++v) {
    CHECK(inst.base.lower[v] == -1000.0);
    CHECK(inst.base.upper[v] == 1000.0);
    CHECK(inst.base.objective[v] == 0.0);
  }
  for (std::size_t v : inst.binary_indices) {
    CHECK(inst.base.objective[v] == 1.0);
    CHECK(inst.base.lower[v] == 0.0);
    CHECK(inst.base.upper[v] == 1.0);
  }
  CHECK_THROWS_AS(encode(d, TestTarget{{0}, 1}), InputError);
  CHECK_THROWS_AS(encode(d, TestTarget{{0, 1}, 1}, 1e-12, 1e-10), InputError);
  CHECK_THROWS_AS(encode(d, TestTarget{{0, 1}, 1}, 1000, 0.0), InputError);
}

TEST_CASE("encode: delta switches between the keep and flip constraints") {
  const Dataset d(1, {2.0}, {1});
  const auto inst = encode(d, TestTarget{{-1.0}, -1}, 1000, 1e-10);
  const auto holds = [&](double w, double b, double delta) {
    const std::vector<double> x{w, b, delta};
    for (const auto& c : inst.base.constraints) {
      double a = 0;
      for (std::size_t j = 0; j < 3; ++j) a += c.coeffs[j] * x[j];
      if (c.relation == Relation::GreaterEq && a < c.rhs) return false;
      if (c.relation == Relation::LessEq && a > c.rhs) return false;
    }
    return true;
  };
  CHECK(holds(1.0, 0.0, 0.0));    // margin 2 kept
  CHECK_FALSE(holds(1.0, 0.0, 1.0));
  CHECK(holds(-1.0, 0.0, 1.0) == false);  // target margin is -1 here
  CHECK(holds(-0.1, -0.5, 1.0));  // margin -0.7 flipped, target margin 0.4
  CHECK_FALSE(holds(-0.1, -0.5, 0.0));
}

TEST_CASE("write_lp_text lists objective, rows, bounds and binaries") {
  const Dataset d(1, {2.0}, {1});
  std::ostringstream out;
  write_lp_text(encode(d, TestTarget{{1.0}, -1}), out);
  const std::string s = out.str();
  CHECK(s.find("Minimize\n obj: delta0") != std::string::npos);
  CHECK(s.find(" target: - w0 - b >= 1e-10") != std::string::npos);
  CHECK(s.find(" keep0: 2 w0 + b + 1000 delta0 >= 1e-10") != std::string::npos);
  CHECK(s.find("Binaries\n delta0") != std::string::npos);
}

TEST_CASE("solve_bnb: identical features force a flip") {
  const Dataset d(1, {1.0}, {1});
  const TestTarget t{{1.0}, -1};
  const auto r = solve_bnb(encode(d, t));
  CHECK(r.status == SolveStatus::Proven);
  CHECK(r.robustness == 1);
  CHECK(r.flip_set == std::vector<std::size_t>{0});
  check_result(d, t, r);
}

TEST_CASE("solve_bnb: separable 1-D instance needs no flips") {
  const Dataset d(1, {1.0}, {1});
  const TestTarget t{{2.0}, -1};
  const auto r = solve_bnb(encode(d, t));
  CHECK(r.robustness == 0);
  check_result(d, t, r);
}

TEST_CASE("triangle reduction: free bias needs no flips, origin classifiers need two") {
  const Dataset d = k3_dataset();
  const TestTarget t{{0, 0, 0, 1}, -1};

  // A negative bias lets every vertex weight stay positive, so the clean data
  // already admits a classifier that sends the target to -1.
  const LinearClassifier free_bias{{0.9, 0.9, 0.9, 0.0}, -1.0};
  CHECK(verify_certificate(d, t, {}, free_bias));
  const auto r = solve_bnb(encode(d, t));
  CHECK(r.status == SolveStatus::Proven);
  CHECK(r.robustness == 0);
  CHECK(brute_force_robustness(d, t).robustness == 0);

  const auto h = solve_bnb(encode(d, t, 1000.0, 1e-10, false));
  CHECK(h.status == SolveStatus::Proven);
  CHECK(h.robustness == 2);
  CHECK(h.witness.b == 0.0);
  CHECK(verify_certificate(d, t, h.flip_set, h.witness));
  SeparabilityParams origin;
  origin.bias = false;
  const auto brute = brute_force_robustness(d, t, origin);
  CHECK(brute.robustness == 2);
  CHECK(brute.flip_set == std::vector<std::size_t>{0, 1});
  CHECK(verify_certificate(d, t, {0, 1}, LinearClassifier{{3, 3, -1, -1}, 0.0}));
}

TEST_CASE("solve_bnb without bias agrees with brute force") {
  SeparabilityParams origin;
  origin.bias = false;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto inst = oracle::random_instance(seed + 3000, 3, 10, 3);
    const auto milp = encode(inst.data, inst.target, 1000.0, 1e-10, false);
    bool brute_ok = true;
    ExactResult brute;
    try {
      brute = brute_force_robustness(inst.data, inst.target, origin);
    } catch (const TargetUnreachable&) {
      brute_ok = false;  // a zero feature row or zero target: no labeling works
    }
    if (!brute_ok) {
      CHECK_THROWS_AS(solve_bnb(milp), TargetUnreachable);
      continue;
    }
    const auto r = solve_bnb(milp);
    CHECK_MESSAGE(r.robustness == brute.robustness, "seed " << seed);
    CHECK(r.witness.b == 0.0);
    CHECK(verify_certificate(inst.data, inst.target, r.flip_set, r.witness));
  }
}

TEST_CASE("solve_bnb matches brute force and the integer oracle on random instances") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto inst = oracle::random_instance(seed);
    const auto bnb = solve_bnb(encode(inst.data, inst.target));
    const auto brute = brute_force_robustness(inst.data, inst.target);
    CHECK_MESSAGE(bnb.status == SolveStatus::Proven, "seed " << seed);
    CHECK_MESSAGE(bnb.robustness == brute.robustness, "seed " << seed);
    CHECK_MESSAGE(brute.robustness == oracle::robustness(inst.data, inst.target), "seed " << seed);
    check_result(inst.data, inst.target, bnb);
    check_result(inst.data, inst.target, brute);
  }
}

TEST_CASE("robustness never decreases when a training point is added") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto inst = oracle::random_instance(seed + 500, 2, 10, 3);
    std::vector<std::size_t> head;
    for (std::size_t i = 0; i + 1 < inst.data.size(); ++i) head.push_back(i);
    const auto smaller = solve_bnb(encode(inst.data.subset(head), inst.target));
    const auto full = solve_bnb(encode(inst.data, inst.target));
    CHECK(smaller.robustness <= full.robustness);
  }
}

TEST_CASE("solve_bnb: incumbent hints, valid or not, keep the optimum") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto inst = oracle::random_instance(seed + 700);
    const auto milp = encode(inst.data, inst.target);
    const auto plain = solve_bnb(milp);
    const auto exact_hint = solve_bnb(milp, {}, plain.robustness);
    CHECK(exact_hint.robustness == plain.robustness);
    if (plain.robustness > 0) {
      const auto bad_hint = solve_bnb(milp, {}, plain.robustness - 1);
      CHECK(bad_hint.robustness == plain.robustness);
      CHECK(bad_hint.status == SolveStatus::Proven);
    }
  }
}

TEST_CASE("solve_bnb: a tiny node budget still returns a certified upper bound") {
  int exhausted = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto inst = oracle::random_instance(seed + 900, 8, 12, 3);
    MilpParams p;
    p.node_budget = 2;
    const auto r = solve_bnb(encode(inst.data, inst.target), p);
    const auto truth = brute_force_robustness(inst.data, inst.target).robustness;
    CHECK(r.robustness >= truth);
    CHECK(r.best_bound <= truth);
    check_result(inst.data, inst.target, r);
    if (r.status == SolveStatus::BudgetExhausted) ++exhausted;
  }
  CHECK(exhausted > 0);
  MilpParams zero;
  zero.node_budget = 0;
  CHECK_THROWS_AS(solve_bnb(encode(Dataset(1, {1.0}, {1}), TestTarget{{1.0}, 1}), zero), InputError);
}

TEST_CASE("brute_force_robustness: limits and trivial cases") {
  const Dataset sep(1, {1.0, -1.0}, {1, -1});
  const auto r = brute_force_robustness(sep, TestTarget{{3.0}, 1});
  CHECK(r.robustness == 0);
  CHECK(r.flip_set.empty());

  const Dataset big(1, std::vector<double>(21, 0.0), std::vector<Label>(21, 1));
  CHECK_THROWS_AS(brute_force_robustness(big, TestTarget{{0.0}, 1}), InputError);
}

TEST_CASE("brute_force_robustness breaks ties lexicographically") {
  // Two copies of the target's features with the wrong label: both must flip.
  // Three candidate points where flipping any single one works: index 0 wins.
  const Dataset d(1, {0.0, 0.0, 5.0}, {1, 1, -1});
  const auto r = brute_force_robustness(d, TestTarget{{0.0}, -1});
  CHECK(r.robustness == 2);
  CHECK(r.flip_set == std::vector<std::size_t>{0, 1});
}
