#include "flipbound/trainer.hpp"

#include <cmath>
#include <string>

#include "flipbound/errors.hpp"
#include "flipbound/random.hpp"

namespace flipbound {

const char* to_string(LossKind k) {
  switch (k) {
    case LossKind::Hinge: return "hinge";
    case LossKind::Log: return "log";
    case LossKind::ModifiedHuber: return "modified-huber";
  }
  return "?";
}

LossKind parse_loss(std::string_view s) {
  if (s == "hinge") return LossKind::Hinge;
  if (s == "log") return LossKind::Log;
  if (s == "modified-huber" || s == "modified_huber") return LossKind::ModifiedHuber;
  throw InputError("unknown loss '" + std::string(s) + "' (hinge, log, modified-huber)");
}

double loss_value(LossKind kind, double z) {
  switch (kind) {
    case LossKind::Hinge: return std::max(0.0, 1.0 - z);
    case LossKind::Log:
      // ln(1 + e^-z) without overflow for very negative z.
      return z > 0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
    case LossKind::ModifiedHuber:
      if (z < -1.0) return -4.0 * z;
      return z < 1.0 ? (1.0 - z) * (1.0 - z) : 0.0;
  }
  return 0.0;
}

double loss_subgradient(LossKind kind, double z) {
  switch (kind) {
    case LossKind::Hinge: return z < 1.0 ? -1.0 : 0.0;
    case LossKind::Log:
      return z > 0 ? -std::exp(-z) / (1.0 + std::exp(-z)) : -1.0 / (1.0 + std::exp(z));
    case LossKind::ModifiedHuber:
      if (z < -1.0) return -4.0;
      return z < 1.0 ? -2.0 * (1.0 - z) : 0.0;
  }
  return 0.0;
}

void TrainConfig::validate() const {
  if (!(l2 >= 0.0) || !std::isfinite(l2)) throw InputError("l2 must be a nonnegative number");
  if (epochs_max < 1) throw InputError("epochs_max must be at least 1");
  if (patience < 1) throw InputError("patience must be at least 1");
  if (!(step0() > 0.0) || !std::isfinite(step0())) throw InputError("eta0 must be positive");
  if (!(tol >= 0.0)) throw InputError("tol must be nonnegative");
}

double objective(const LinearClassifier& c, const Dataset& data, LossKind kind, double l2) {
  double sum = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    sum += loss_value(kind, data.label(i) * c.score(data.row(i)));
  }
  double norm2 = 0.0;
  for (double v : c.w) norm2 += v * v;
  return sum / static_cast<double>(data.size()) + 0.5 * l2 * norm2;
}

TrainResult train(const Dataset& data, const TrainConfig& cfg) {
  cfg.validate();
  if (data.size() == 0) throw InputError("cannot train on an empty dataset");
  const std::size_t n = data.size(), d = data.dim();
  const double eta0 = cfg.step0();
  constexpr double kGuard = 1e6;

  LinearClassifier cur{std::vector<double>(d, 0.0), 0.0};
  LinearClassifier avg = cur;
  std::size_t averaged = 0;

  TrainResult best{cur, 0, objective(cur, data, cfg.loss, cfg.l2)};
  double reference = best.objective;  // last value that counted as an improvement
  std::size_t stale = 0;
  Rng rng(derive_seed(cfg.seed, "sgd"));
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::uint64_t t = 0;

  for (std::size_t epoch = 1; epoch <= cfg.epochs_max; ++epoch) {
    rng.shuffle(order);
    for (std::size_t i : order) {
      const auto x = data.row(i);
      const double y = data.label(i);
      const double eta = eta0 / (1.0 + eta0 * cfg.l2 * static_cast<double>(t));
      const double g = loss_subgradient(cfg.loss, y * cur.score(x));
      const double shrink = 1.0 - eta * cfg.l2;
      for (std::size_t j = 0; j < d; ++j) cur.w[j] = shrink * cur.w[j] - eta * g * y * x[j];
      cur.b -= eta * g * y;
      ++t;
      if (cfg.average) {
        ++averaged;
        const double a = 1.0 / static_cast<double>(averaged);
        for (std::size_t j = 0; j < d; ++j) avg.w[j] += a * (cur.w[j] - avg.w[j]);
        avg.b += a * (cur.b - avg.b);
      }
    }
    for (double v : cur.w) {
      if (!(std::abs(v) <= kGuard)) {
        throw DivergenceError("SGD diverged: a weight left [-1e6, 1e6] in epoch " +
                              std::to_string(epoch));
      }
    }
    const LinearClassifier& candidate = cfg.average ? avg : cur;
    const double obj = objective(candidate, data, cfg.loss, cfg.l2);
    if (obj < best.objective) best = {candidate, epoch, obj};
    best.epochs = epoch;
    if (obj < reference - cfg.tol) {
      reference = obj;
      stale = 0;
    } else if (++stale >= cfg.patience) {
      break;
    }
  }
  return best;
}

}  // namespace flipbound
