#include "doctest.h"
#include "flipbound/errors.hpp"
#include "flipbound/linsep.hpp"
#include "oracles.hpp"

using namespace flipbound;

namespace {

Dataset k3_dataset() {
  // Vertices of a triangle, then its edges with the extra coordinate set.
  return Dataset(4,
                 {1, 0, 0, 0,  //
                  0, 1, 0, 0,  //
                  0, 0, 1, 0,  //
                  1, 1, 0, 1,  //
                  0, 1, 1, 1,  //
                  1, 0, 1, 1},
                 {-1, -1, -1, 1, 1, 1});
}

}  // namespace

TEST_CASE("feasible_labeling: identical features with opposite signs") {
  const Dataset pts(1, {1.0}, {1});
  const auto r = feasible_labeling(pts, TestTarget{{1.0}, -1});
  CHECK_FALSE(r.feasible);
  CHECK_FALSE(r.classifier.has_value());
}

TEST_CASE("feasible_labeling: 1-D separable pair") {
  const Dataset pts(1, {1.0}, {1});
  const TestTarget t{{2.0}, -1};
  const auto r = feasible_labeling(pts, t);
  REQUIRE(r.feasible);
  const auto c = check_consistency(*r.classifier, pts, t);
  CHECK(c.misclassified.empty());
  CHECK(c.target_ok);
  CHECK(r.min_margin >= 1e-10);

  // The hand-built witness w = -1, b = 1.5 passes the same check.
  const auto hand = check_consistency(LinearClassifier{{-1.0}, 1.5}, pts, t);
  CHECK(hand.misclassified.empty());
  CHECK(hand.target_ok);
}

TEST_CASE("feasible_labeling: clean triangle reduction data is separable") {
  const Dataset d = k3_dataset();
  const auto r = feasible_labeling(d);
  REQUIRE(r.feasible);
  CHECK(check_consistency(*r.classifier, d).misclassified.empty());
  const LinearClassifier cover_witness{{-1, -1, -1, 3}, 0.0};
  CHECK(check_consistency(cover_witness, d).misclassified.empty());
}

TEST_CASE("check_consistency: zero score is wrong for both labels") {
  const LinearClassifier c{{1.0}, 0.0};
  const Dataset pts(1, {1.0, -1.0}, {1, -1});
  auto r = check_consistency(c, pts, TestTarget{{2.0}, 1});
  CHECK(r.misclassified.empty());
  CHECK(r.target_ok);

  const Dataset zero(1, {0.0, 0.0}, {1, -1});
  r = check_consistency(c, zero, TestTarget{{0.0}, 1});
  CHECK(r.misclassified == std::vector<std::size_t>{0, 1});
  CHECK_FALSE(r.target_ok);
}

TEST_CASE("check_consistency: poisoned triangle with the cover witness") {
  // Cover {v1, v2}: their vertex points are flipped to +1.
  const Dataset poisoned = k3_dataset().flipped(std::vector<std::size_t>{0, 1});
  const LinearClassifier w{{3, 3, -1, -1}, 0.0};
  const auto r = check_consistency(w, poisoned, TestTarget{{0, 0, 0, 1}, -1});
  CHECK(r.misclassified.empty());
  CHECK(r.target_ok);
}

TEST_CASE("feasible_labeling agrees with exact integer elimination") {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    const auto inst = oracle::random_instance(seed, 1, 8, 3);
    const bool expected = oracle::separable(inst.data, &inst.target);
    const auto r = feasible_labeling(inst.data, inst.target);
    CHECK_MESSAGE(r.feasible == expected, "seed " << seed);
    if (r.feasible) {
      const auto c = check_consistency(*r.classifier, inst.data, inst.target);
      CHECK(c.misclassified.empty());
      CHECK(c.target_ok);
      CHECK(r.min_margin >= 1e-10 - 1e-7);
    }
  }
}

TEST_CASE("feasible_labeling is monotone under point removal") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto inst = oracle::random_instance(seed + 1000, 2, 8, 2);
    if (!feasible_labeling(inst.data, inst.target).feasible) continue;
    std::vector<std::size_t> keep;
    for (std::size_t i = 1; i < inst.data.size(); ++i) keep.push_back(i);
    CHECK(feasible_labeling(inst.data.subset(keep), inst.target).feasible);
  }
}

TEST_CASE("witness consistency is invariant to positive scaling") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto inst = oracle::random_instance(seed + 2000, 2, 8, 3);
    const auto r = feasible_labeling(inst.data, inst.target);
    if (!r.feasible) continue;
    LinearClassifier scaled = *r.classifier;
    for (double& v : scaled.w) v *= 0.37;
    scaled.b *= 0.37;
    const auto a = check_consistency(*r.classifier, inst.data, inst.target);
    const auto b = check_consistency(scaled, inst.data, inst.target);
    CHECK(a.misclassified == b.misclassified);
    CHECK(a.target_ok == b.target_ok);
  }
}

TEST_CASE("feasible_labeling validates parameters") {
  const Dataset pts(1, {1.0}, {1});
  SeparabilityParams p;
  p.eps = 0.0;
  CHECK_THROWS_AS(feasible_labeling(pts, p), InputError);
  p = {};
  p.cap = -1.0;
  CHECK_THROWS_AS(feasible_labeling(pts, p), InputError);
  CHECK_THROWS_AS(feasible_labeling(pts, TestTarget{{1.0, 2.0}, 1}), InputError);
}
