#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "flipbound/dataset.hpp"
#include "flipbound/trainer.hpp"
#include "flipbound/upper.hpp"

namespace flipbound {

/// m standard-normal points in d dimensions labeled by a random hyperplane
/// through the origin; points closer than `gap` to it are redrawn.
Dataset synthetic_separable(std::size_t m, std::size_t d, std::uint64_t seed, double gap = 0.1);

/// Negates the labels at flip_set plus `extra` further indices drawn uniformly
/// without replacement from the rest.
Dataset poison(const Dataset& data, const std::vector<std::size_t>& flip_set, std::size_t extra,
               std::uint64_t seed);

/// floor(v + 1/2) for v >= 0.
std::size_t round_half_up(double v);

struct PoisonSpec {
  std::vector<double> fractions{0.0, 0.25, 0.5, 1.0, 2.0, 4.0};
  std::vector<LossKind> attack_losses{LossKind::Hinge, LossKind::Log, LossKind::ModifiedHuber};
  std::vector<LossKind> victim_losses{LossKind::Hinge, LossKind::Log, LossKind::ModifiedHuber};
  std::uint64_t seed = 0;

  void validate() const;
};

struct EvalRow {
  double fraction = 0.0;
  double rho = 0.0;       // share of targets classified as desired
  double accuracy = 0.0;  // mean clean-test accuracy, target row excluded
  std::size_t n_points = 0;
};

struct Grid {
  LossKind attack = LossKind::Hinge;
  LossKind victim = LossKind::Hinge;
  std::vector<EvalRow> rows;
};

/// Per-target outcome of the attack step.
struct TargetRecord {
  std::size_t test_index = 0;
  Label desired = 1;
  std::vector<std::size_t> upper;   // one per attack loss
  std::vector<bool> certified;      // one per attack loss
};

struct GridReport {
  std::vector<Grid> grids;  // attack-major, victim-minor
  std::vector<TargetRecord> targets;
};

struct HarnessParams {
  UpperParams attack{};    // loss and seed are set per cell
  TrainConfig victim{};    // loss and seed are set per cell
  std::size_t threads = 1;
};

/// For each test row in target_indices the attacker wants the opposite of its
/// true label. r̂ and its flip set come from upper_bound with each attack loss;
/// for every fraction f, round(f r̂) labels are flipped (a uniform subset of the
/// flip set when f < 1, the flip set plus random extras when f > 1) and a
/// victim is retrained with each victim loss. Targets whose upper bound is not
/// certified are left out of that attack loss's grids.
GridReport evaluate_grid(const Dataset& train, const Dataset& test,
                         const std::vector<std::size_t>& target_indices, const PoisonSpec& spec,
                         const HarnessParams& params = {});

struct Bin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
};

/// Bins [lo, lo + width) anchored at a multiple of width, covering min..max.
std::vector<Bin> histogram(const std::vector<double>& values, double width);
/// Explicit ascending edges; the last bin is closed on the right.
std::vector<Bin> histogram(const std::vector<double>& values, const std::vector<double>& edges);

struct Summary {
  std::size_t n = 0;
  double min = 0, p25 = 0, median = 0, p75 = 0, max = 0, mean = 0;
};

/// Percentiles interpolate linearly between order statistics.
Summary summarize(const std::vector<double>& values);
double percentile(std::vector<double> values, double q);

}  // namespace flipbound
