#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "flipbound/dataset.hpp"
#include "flipbound/linsep.hpp"
#include "flipbound/trainer.hpp"

namespace flipbound {

/// The original rows followed by k_prime copies of the target.
Dataset augment(const Dataset& data, const TestTarget& target, std::size_t k_prime);

struct UpperTrial {
  std::uint64_t seed = 0;
  LossKind loss = LossKind::Hinge;
  bool target_ok = false;
  std::size_t misclassified = 0;
  std::size_t epochs = 0;
  std::string error;  // nonempty when training failed
};

struct UpperBoundReport {
  std::size_t upper = 0;
  bool certified = false;
  std::vector<std::size_t> flip_set;
  LinearClassifier witness;
  std::vector<UpperTrial> trials;
  std::string warning;
};

struct UpperParams {
  TrainConfig train{};  // its seed is the base for the per-trial seeds
  std::size_t n_trials = 10;
  std::size_t k_prime = 0;  // 0 means m + 1
  std::size_t threads = 1;
};

/// Seed used by trial i.
std::uint64_t trial_seed(std::uint64_t base, std::size_t i);

/// Trains n_trials classifiers on the augmented data and keeps the one that
/// classifies the target as desired with the fewest mistakes on the original
/// rows (lowest trial index on ties). If no trial reaches the target the
/// report falls back to upper = m, uncertified.
UpperBoundReport upper_bound(const Dataset& data, const TestTarget& target,
                             const UpperParams& params = {});

/// True iff the witness puts the target strictly on the desired side and its
/// mistakes on `data` are exactly the flip set.
bool certify_upper(const UpperBoundReport& report, const Dataset& data, const TestTarget& target);

}  // namespace flipbound
