#include <cmath>

#include "doctest.h"
#include "flipbound/errors.hpp"
#include "flipbound/random.hpp"
#include "flipbound/trainer.hpp"

using namespace flipbound;

namespace {

// Written out independently of the library.
double ref_loss(LossKind k, double z) {
  switch (k) {
    case LossKind::Hinge: return z < 1 ? 1 - z : 0;
    case LossKind::Log: return std::log(1 + std::exp(-z));
    case LossKind::ModifiedHuber: return z >= 1 ? 0 : (z >= -1 ? (1 - z) * (1 - z) : -4 * z);
  }
  return 0;
}

double ref_objective(const LinearClassifier& c, const Dataset& d, LossKind k, double l2) {
  double s = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    double score = c.b;
    for (std::size_t j = 0; j < d.dim(); ++j) score += c.w[j] * d.row(i)[j];
    s += ref_loss(k, d.label(i) * score);
  }
  double n2 = 0;
  for (double v : c.w) n2 += v * v;
  return s / d.size() + 0.5 * l2 * n2;
}

Dataset random_dataset(std::uint64_t seed, std::size_t m, std::size_t d) {
  Rng rng(seed);
  std::vector<double> f(m * d);
  for (double& v : f) v = rng.normal();
  std::vector<Label> y(m);
  for (auto& v : y) v = rng.uniform_index(2) ? 1 : -1;
  return Dataset(d, std::move(f), std::move(y));
}

constexpr LossKind kAll[] = {LossKind::Hinge, LossKind::Log, LossKind::ModifiedHuber};

}  // namespace

TEST_CASE("loss values at reference points") {
  CHECK(loss_value(LossKind::Hinge, 1.0) == 0.0);
  CHECK(loss_value(LossKind::Hinge, -1.0) == 2.0);
  CHECK(loss_value(LossKind::Log, 0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(loss_value(LossKind::ModifiedHuber, -1.0) == 4.0);
  CHECK(loss_value(LossKind::ModifiedHuber, std::nextafter(-1.0, -2.0)) ==
        doctest::Approx(4.0).epsilon(1e-12));
  CHECK(loss_value(LossKind::ModifiedHuber, 2.0) == 0.0);
  CHECK(loss_subgradient(LossKind::Hinge, 1.0) == 0.0);
  CHECK(loss_subgradient(LossKind::Hinge, 0.999) == -1.0);
  // Log stays finite far out in both directions.
  CHECK(std::isfinite(loss_value(LossKind::Log, -800.0)));
  CHECK(loss_value(LossKind::Log, -800.0) == doctest::Approx(800.0));
  CHECK(loss_subgradient(LossKind::Log, -800.0) == doctest::Approx(-1.0));
  CHECK(loss_subgradient(LossKind::Log, 800.0) == doctest::Approx(0.0));
}

TEST_CASE("subgradients match central differences away from kinks") {
  Rng rng(7);
  const double h = 1e-6;
  for (LossKind k : kAll) {
    int checked = 0;
    while (checked < 100) {
      const double z = rng.uniform(-5.0, 5.0);
      if (std::abs(z - 1.0) < 1e-3 || std::abs(z + 1.0) < 1e-3) continue;
      const double fd = (ref_loss(k, z + h) - ref_loss(k, z - h)) / (2 * h);
      CHECK(std::abs(loss_subgradient(k, z) - fd) <= 1e-5);
      CHECK(loss_value(k, z) == doctest::Approx(ref_loss(k, z)).epsilon(1e-12));
      ++checked;
    }
  }
}

TEST_CASE("parse_loss round trip") {
  for (LossKind k : kAll) CHECK(parse_loss(to_string(k)) == k);
  CHECK(parse_loss("modified_huber") == LossKind::ModifiedHuber);
  CHECK_THROWS_AS(parse_loss("squared"), InputError);
}

TEST_CASE("train fits a separable 1-D pair under every loss") {
  const Dataset d(1, {1.0, -1.0}, {1, -1});
  for (LossKind k : kAll) {
    TrainConfig cfg;
    cfg.loss = k;
    const auto r = train(d, cfg);
    CHECK(r.classifier.predict(d.row(0)) == 1);
    CHECK(r.classifier.predict(d.row(1)) == -1);
  }
}

TEST_CASE("train fits a single repeated point") {
  const Dataset d(2, {0.5, -2.0, 0.5, -2.0, 0.5, -2.0}, {-1, -1, -1});
  for (LossKind k : kAll) {
    TrainConfig cfg;
    cfg.loss = k;
    CHECK(train(d, cfg).classifier.predict(d.row(0)) == -1);
  }
}

TEST_CASE("returned objective never exceeds the zero start") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto d = random_dataset(seed, 5 + seed % 20, 1 + seed % 4);
    TrainConfig cfg;
    cfg.loss = kAll[seed % 3];
    cfg.seed = seed;
    const auto r = train(d, cfg);
    const LinearClassifier zero{std::vector<double>(d.dim(), 0.0), 0.0};
    const double at_zero = ref_objective(zero, d, cfg.loss, cfg.l2);
    const double at_result = ref_objective(r.classifier, d, cfg.loss, cfg.l2);
    CHECK(at_result <= at_zero + 1e-12);
    CHECK(r.objective == doctest::Approx(at_result).epsilon(1e-9));
  }
}

TEST_CASE("train is bitwise deterministic and seed dependent") {
  const auto d = random_dataset(99, 40, 3);
  TrainConfig cfg;
  cfg.seed = 5;
  cfg.epochs_max = 20;
  const auto a = train(d, cfg), b = train(d, cfg);
  CHECK(a.classifier.w == b.classifier.w);
  CHECK(a.classifier.b == b.classifier.b);
  cfg.seed = 6;
  const auto c = train(d, cfg);
  CHECK((c.classifier.w != a.classifier.w || c.classifier.b != a.classifier.b));
}

TEST_CASE("heavy L2 shrinks w but leaves the bias free") {
  // Symmetric features, three positives out of four: only b can express the skew.
  const Dataset d(1, {1.0, -1.0, 1.0, -1.0}, {1, 1, 1, -1});
  TrainConfig cfg;
  cfg.l2 = 50.0;
  cfg.epochs_max = 200;
  const auto r = train(d, cfg);
  CHECK(std::abs(r.classifier.w[0]) < 0.05);
  CHECK(r.classifier.b > 0.0);
}

TEST_CASE("averaging is supported and deterministic") {
  const auto d = random_dataset(3, 30, 2);
  TrainConfig cfg;
  cfg.average = true;
  const auto a = train(d, cfg), b = train(d, cfg);
  CHECK(a.classifier.w == b.classifier.w);
  CHECK(a.objective <= ref_objective({{0.0, 0.0}, 0.0}, d, cfg.loss, cfg.l2) + 1e-12);
}

TEST_CASE("divergence guard and config validation") {
  const auto d = random_dataset(4, 10, 2);
  TrainConfig cfg;
  cfg.loss = LossKind::Log;
  cfg.l2 = 0.0;
  cfg.eta0 = 1e9;
  CHECK_THROWS_AS(train(d, cfg), DivergenceError);

  TrainConfig bad;
  bad.epochs_max = 0;
  CHECK_THROWS_AS(train(d, bad), InputError);
  bad = {};
  bad.patience = 0;
  CHECK_THROWS_AS(train(d, bad), InputError);
  bad = {};
  bad.eta0 = -1.0;
  CHECK_THROWS_AS(train(d, bad), InputError);
  bad = {};
  bad.l2 = -1.0;
  CHECK_THROWS_AS(train(d, bad), InputError);
  CHECK_THROWS_AS(train(Dataset(2, {}, {}), TrainConfig{}), InputError);
  CHECK(TrainConfig{}.step0() == 0.01);
  TrainConfig lg;
  lg.loss = LossKind::Log;
  CHECK(lg.step0() == 0.1);
}
