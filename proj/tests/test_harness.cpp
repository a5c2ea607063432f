#include <algorithm>

#include "doctest.h"
#include "flipbound/errors.hpp"
#include "flipbound/harness.hpp"
#include "flipbound/random.hpp"

using namespace flipbound;

TEST_CASE("poison flips exactly the requested number of labels") {
  const Dataset d(1, {0, 1, 2, 3, 4, 5, 6, 7}, {1, 1, 1, 1, -1, -1, -1, -1});
  CHECK(poison(d, {}, 0, 1).labels() == d.labels());
  const auto p = poison(d, {2, 5}, 0, 1);
  CHECK(p.label(2) == -1);
  CHECK(p.label(5) == 1);
  for (std::size_t extra = 0; extra <= 6; ++extra) {
    const auto q = poison(d, {2, 5}, extra, extra);
    std::size_t changed = 0;
    for (std::size_t i = 0; i < d.size(); ++i) changed += q.label(i) != d.label(i);
    CHECK(changed == 2 + extra);
    CHECK(q.label(2) == -1);
  }
  CHECK(poison(d, {1}, 3, 9).labels() == poison(d, {1}, 3, 9).labels());
  CHECK_THROWS_AS(poison(d, {2, 5}, 7, 1), InputError);
  CHECK_THROWS_AS(poison(d, {2, 2}, 0, 1), InputError);
}

TEST_CASE("round_half_up") {
  CHECK(round_half_up(0.0) == 0);
  CHECK(round_half_up(0.5) == 1);
  CHECK(round_half_up(1.25) == 1);
  CHECK(round_half_up(2.5) == 3);
  CHECK(round_half_up(0.25 * 6) == 2);
}

TEST_CASE("histogram with fixed width") {
  const auto bins = histogram(std::vector<double>{1, 1, 2}, 1.0);
  REQUIRE(bins.size() == 2);
  CHECK(bins[0].lo == 1.0);
  CHECK(bins[0].count == 2);
  CHECK(bins[1].lo == 2.0);
  CHECK(bins[1].count == 1);
  CHECK_THROWS_AS(histogram(std::vector<double>{}, 1.0), InputError);
  CHECK_THROWS_AS(histogram(std::vector<double>{1}, 0.0), InputError);
}

TEST_CASE("histogram counts always sum to the sample size") {
  Rng rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> v(1 + rng.uniform_index(50));
    for (double& x : v) x = static_cast<double>(rng.uniform_index(40));
    std::size_t total = 0;
    for (const auto& b : histogram(v, 1.0 + rep % 4)) total += b.count;
    CHECK(total == v.size());
    total = 0;
    for (const auto& b : histogram(v, std::vector<double>{0, 10, 20, 40})) total += b.count;
    CHECK(total == v.size());
  }
  CHECK_THROWS_AS(histogram(std::vector<double>{50}, std::vector<double>{0, 10}), InputError);
  CHECK_THROWS_AS(histogram(std::vector<double>{5}, std::vector<double>{10, 0}), InputError);
}

TEST_CASE("summary agrees with a sort-based computation") {
  Rng rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> v(1 + rng.uniform_index(30));
    for (double& x : v) x = rng.uniform(-10, 10);
    auto sorted = v;
    std::sort(sorted.begin(), sorted.end());
    const auto s = summarize(v);
    CHECK(s.min == sorted.front());
    CHECK(s.max == sorted.back());
    const std::size_t n = sorted.size();
    const double med = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    CHECK(s.median == doctest::Approx(med));
    CHECK(s.p25 <= s.median);
    CHECK(s.median <= s.p75);
  }
  CHECK(percentile({1, 2, 3, 4}, 0.25) == doctest::Approx(1.75));
}

TEST_CASE("synthetic_separable is separable with the requested gap") {
  const auto d = synthetic_separable(200, 5, 1);
  CHECK(d.size() == 200);
  CHECK(d.dim() == 5);
  CHECK(d.count(1) > 0);
  CHECK(d.count(-1) > 0);
  CHECK(feasible_labeling(d).feasible);
  CHECK(synthetic_separable(50, 3, 4).features() == synthetic_separable(50, 3, 4).features());
}

TEST_CASE("evaluate_grid shape, determinism and an independent recount") {
  const auto all = synthetic_separable(24, 2, 11, 0.3);
  std::vector<std::size_t> tr, te;
  for (std::size_t i = 0; i < all.size(); ++i) (i < 20 ? tr : te).push_back(i);
  const Dataset train = all.subset(tr), test = all.subset(te);
  PoisonSpec spec;
  spec.seed = 4;
  HarnessParams hp;
  hp.attack.n_trials = 3;
  const std::vector<std::size_t> targets = {0};
  const auto g = evaluate_grid(train, test, targets, spec, hp);
  REQUIRE(g.grids.size() == 9);
  for (const auto& grid : g.grids) CHECK(grid.rows.size() == spec.fractions.size());

  const auto again = evaluate_grid(train, test, targets, spec, hp);
  for (std::size_t i = 0; i < 9; ++i) {
    for (std::size_t f = 0; f < spec.fractions.size(); ++f) {
      CHECK(g.grids[i].rows[f].rho == again.grids[i].rows[f].rho);
      CHECK(g.grids[i].rows[f].accuracy == again.grids[i].rows[f].accuracy);
    }
  }

  // Recount the (hinge, hinge) cell at fraction 1 by hand.
  const TestTarget target{{test.row(0)[0], test.row(0)[1]}, -test.label(0)};
  UpperParams up = hp.attack;
  up.train.loss = LossKind::Hinge;
  up.train.seed = derive_seed(spec.seed, "attack", 0);
  const auto report = upper_bound(train, target, up);
  REQUIRE(report.certified);
  REQUIRE(g.targets[0].upper[0] == report.upper);
  const std::size_t f1 = 3;  // fractions[3] == 1
  const std::uint64_t cell_seed = derive_seed(spec.seed, "poison", f1);
  auto pick = report.flip_set;
  Rng rng(derive_seed(cell_seed, "subsample"));
  rng.shuffle(pick);
  std::sort(pick.begin(), pick.end());
  TrainConfig victim = hp.victim;
  victim.seed = derive_seed(cell_seed, "victim", 0);
  const auto model = flipbound::train(train.flipped(pick), victim).classifier;
  std::size_t correct = 0;
  for (std::size_t i = 1; i < test.size(); ++i) correct += model.predict(test.row(i)) == test.label(i);
  const auto& row = g.grids[0].rows[f1];
  CHECK(row.n_points == 1);
  CHECK(row.rho == (model.predict(target.x) == target.y ? 1.0 : 0.0));
  CHECK(row.accuracy == doctest::Approx(correct / 3.0));
}

TEST_CASE("evaluate_grid validates its inputs") {
  const auto d = synthetic_separable(10, 2, 1);
  PoisonSpec spec;
  spec.fractions = {1.0, 0.5};
  CHECK_THROWS_AS(evaluate_grid(d, d, {0}, spec), InputError);
  spec = {};
  CHECK_THROWS_AS(evaluate_grid(d, d, {10}, spec), InputError);
  CHECK_THROWS_AS(evaluate_grid(d, d.subset(std::vector<std::size_t>{0}), {0}, spec), InputError);
}
