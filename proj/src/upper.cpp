#include "flipbound/upper.hpp"

#include <cmath>
#include <limits>

#include "flipbound/errors.hpp"
#include "flipbound/parallel.hpp"
#include "flipbound/random.hpp"

namespace flipbound {

Dataset augment(const Dataset& data, const TestTarget& target, std::size_t k_prime) {
  if (k_prime < 1) throw InputError("k' must be at least 1");
  target.validate(data.dim());
  std::vector<double> f = data.features();
  std::vector<Label> y = data.labels();
  for (std::size_t c = 0; c < k_prime; ++c) {
    f.insert(f.end(), target.x.begin(), target.x.end());
    y.push_back(target.y);
  }
  return Dataset(data.dim(), std::move(f), std::move(y), data.feature_names());
}

std::uint64_t trial_seed(std::uint64_t base, std::size_t i) {
  return derive_seed(base, "upper-trial", i);
}

namespace {

// Points sitting exactly on the hyperplane count as mistakes for either label,
// and flipping them would not help. Shift b toward the target's side by less
// than the smallest nonzero |score| so that every such point takes the
// target's label while no other sign changes.
void resolve_ties(LinearClassifier& c, const Dataset& data, const TestTarget& target) {
  bool tie = false;
  double smallest = std::numeric_limits<double>::infinity();
  const auto visit = [&](std::span<const double> x) {
    const double s = std::abs(c.score(x));
    if (s == 0.0) {
      tie = true;
    } else {
      smallest = std::min(smallest, s);
    }
  };
  for (std::size_t i = 0; i < data.size(); ++i) visit(data.row(i));
  visit(target.x);
  if (!tie) return;
  const double shift = std::isfinite(smallest) ? 0.5 * smallest : 1.0;
  c.b += target.y * shift;
}

}  // namespace

UpperBoundReport upper_bound(const Dataset& data, const TestTarget& target,
                             const UpperParams& params) {
  if (params.n_trials < 1) throw InputError("need at least one trial");
  params.train.validate();
  target.validate(data.dim());
  const std::size_t m = data.size();
  const Dataset augmented = augment(data, target, params.k_prime ? params.k_prime : m + 1);

  UpperBoundReport report;
  report.trials.resize(params.n_trials);
  std::vector<LinearClassifier> models(params.n_trials);
  std::vector<std::vector<std::size_t>> mistakes(params.n_trials);

  parallel_for(params.n_trials, params.threads, [&](std::size_t i) {
    UpperTrial& trial = report.trials[i];
    TrainConfig cfg = params.train;
    cfg.seed = trial_seed(params.train.seed, i);
    trial.seed = cfg.seed;
    trial.loss = cfg.loss;
    try {
      const TrainResult r = train(augmented, cfg);
      trial.epochs = r.epochs;
      models[i] = r.classifier;
      resolve_ties(models[i], data, target);
      const auto cons = check_consistency(models[i], data, target);
      trial.target_ok = cons.target_ok;
      trial.misclassified = cons.misclassified.size();
      mistakes[i] = cons.misclassified;
    } catch (const NumericalError& e) {
      trial.error = e.what();
    }
  });

  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < params.n_trials; ++i) {
    const auto& t = report.trials[i];
    if (!t.error.empty() || !t.target_ok) continue;
    if (!best || t.misclassified < report.trials[*best].misclassified) best = i;
  }
  if (!best) {
    report.upper = m;
    report.certified = false;
    report.witness = LinearClassifier{std::vector<double>(data.dim(), 0.0), 0.0};
    report.warning = "no trained classifier put the target on the desired side; reporting the trivial bound m";
    return report;
  }
  report.witness = models[*best];
  report.flip_set = mistakes[*best];
  report.upper = report.flip_set.size();
  report.certified = certify_upper(report, data, target);
  if (!report.certified) {
    report.upper = m;
    report.warning = "selected witness failed its consistency re-check; reporting the trivial bound m";
  }
  return report;
}

bool certify_upper(const UpperBoundReport& report, const Dataset& data, const TestTarget& target) {
  if (report.witness.w.size() != data.dim()) return false;
  const auto cons = check_consistency(report.witness, data, target);
  if (!cons.target_ok || cons.misclassified != report.flip_set) return false;
  // After flipping, every point must sit strictly on its new side.
  return check_consistency(report.witness, data.flipped(report.flip_set), target)
      .misclassified.empty();
}

}  // namespace flipbound
