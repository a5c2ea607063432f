#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "flipbound/dataset.hpp"
#include "flipbound/linsep.hpp"

namespace flipbound {

enum class LossKind { Hinge, Log, ModifiedHuber };

const char* to_string(LossKind k);
/// Accepts "hinge", "log" and "modified-huber" (also "modified_huber").
LossKind parse_loss(std::string_view s);

/// Loss as a function of the margin z = y (w . x + b).
double loss_value(LossKind kind, double margin);
/// d loss / d z, with the hinge kink at z = 1 mapped to 0.
double loss_subgradient(LossKind kind, double margin);

struct TrainConfig {
  LossKind loss = LossKind::Hinge;
  double l2 = 1e-4;
  std::size_t epochs_max = 1000;
  /// Unset means 0.1 for Log and 0.01 otherwise.
  std::optional<double> eta0;
  double tol = 1e-3;
  std::size_t patience = 5;
  std::uint64_t seed = 0;
  bool average = false;

  double step0() const { return eta0 ? *eta0 : (loss == LossKind::Log ? 0.1 : 0.01); }
  void validate() const;
};

/// mean_i loss(y_i (w . x_i + b)) + l2/2 |w|^2. The bias is not penalized.
double objective(const LinearClassifier& c, const Dataset& data, LossKind kind, double l2);

struct TrainResult {
  LinearClassifier classifier;
  std::size_t epochs = 0;
  double objective = 0.0;
};

/// Plain SGD from zero with a seeded shuffle each epoch and step
/// eta0 / (1 + eta0 l2 t). Returns the parameters with the lowest full
/// objective seen at an epoch boundary (the zero start included). Stops after
/// `patience` epochs without a `tol` improvement. Throws DivergenceError once
/// any weight exceeds 1e6 in magnitude.
TrainResult train(const Dataset& data, const TrainConfig& cfg);

}  // namespace flipbound
