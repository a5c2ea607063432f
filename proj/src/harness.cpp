#include "flipbound/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "flipbound/errors.hpp"
#include "flipbound/parallel.hpp"
#include "flipbound/random.hpp"

namespace flipbound {

Dataset synthetic_separable(std::size_t m, std::size_t d, std::uint64_t seed, double gap) {
  if (d == 0) throw InputError("dimension must be positive");
  if (!(gap >= 0.0 && gap < 1.0)) throw InputError("gap must lie in [0, 1)");
  Rng rng(derive_seed(seed, "synthetic"));
  std::vector<double> normal(d);
  double len = 0.0;
  while (len == 0.0) {
    len = 0.0;
    for (double& v : normal) {
      v = rng.normal();
      len += v * v;
    }
  }
  len = std::sqrt(len);
  for (double& v : normal) v /= len;

  std::vector<double> f;
  std::vector<Label> y;
  f.reserve(m * d);
  std::vector<double> x(d);
  while (y.size() < m) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      x[j] = rng.normal();
      s += x[j] * normal[j];
    }
    if (std::abs(s) < gap) continue;
    f.insert(f.end(), x.begin(), x.end());
    y.push_back(s > 0 ? 1 : -1);
  }
  return Dataset(d, std::move(f), std::move(y));
}

Dataset poison(const Dataset& data, const std::vector<std::size_t>& flip_set, std::size_t extra,
               std::uint64_t seed) {
  const std::size_t m = data.size();
  std::vector<bool> taken(m, false);
  for (std::size_t i : flip_set) {
    if (i >= m || taken[i]) throw InputError("flip set has an invalid or repeated index");
    taken[i] = true;
  }
  if (extra > m - flip_set.size()) throw InputError("not enough points left for the extra flips");
  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < m; ++i) {
    if (!taken[i]) rest.push_back(i);
  }
  Rng rng(derive_seed(seed, "poison-extra"));
  rng.shuffle(rest);
  std::vector<std::size_t> all = flip_set;
  all.insert(all.end(), rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(extra));
  return data.flipped(all);
}

std::size_t round_half_up(double v) {
  return static_cast<std::size_t>(std::floor(v + 0.5));
}

void PoisonSpec::validate() const {
  if (fractions.empty()) throw InputError("need at least one poison fraction");
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    if (!(fractions[i] >= 0.0) || !std::isfinite(fractions[i])) {
      throw InputError("poison fractions must be finite and nonnegative");
    }
    if (i > 0 && fractions[i] < fractions[i - 1]) throw InputError("poison fractions must ascend");
  }
  if (attack_losses.empty() || victim_losses.empty()) throw InputError("need at least one loss");
}

namespace {

struct Cell {
  bool desired = false;
  double accuracy = 0.0;
};

}  // namespace

GridReport evaluate_grid(const Dataset& train, const Dataset& test,
                         const std::vector<std::size_t>& target_indices, const PoisonSpec& spec,
                         const HarnessParams& params) {
  spec.validate();
  if (train.dim() != test.dim()) throw InputError("train and test dimensions differ");
  if (test.size() < 2) throw InputError("the test split needs a target and at least one more row");
  for (std::size_t t : target_indices) {
    if (t >= test.size()) throw InputError("target index out of range");
  }
  const std::size_t na = spec.attack_losses.size(), nv = spec.victim_losses.size(),
                    nf = spec.fractions.size(), nt = target_indices.size();

  std::vector<TargetRecord> records(nt);
  // cells[t][(a * nv + v) * nf + f]
  std::vector<std::vector<Cell>> cells(nt, std::vector<Cell>(na * nv * nf));

  parallel_for(nt, params.threads, [&](std::size_t j) {
    const std::size_t ti = target_indices[j];
    const TestTarget target{std::vector<double>(test.row(ti).begin(), test.row(ti).end()),
                            -test.label(ti)};
    TargetRecord& rec = records[j];
    rec.test_index = ti;
    rec.desired = target.y;
    for (std::size_t a = 0; a < na; ++a) {
      UpperParams up = params.attack;
      up.train.loss = spec.attack_losses[a];
      up.train.seed = derive_seed(spec.seed, "attack", j * na + a);
      up.threads = 1;
      const auto report = upper_bound(train, target, up);
      rec.upper.push_back(report.upper);
      rec.certified.push_back(report.certified);
      if (!report.certified) continue;
      const std::size_t r_hat = report.upper;

      for (std::size_t f = 0; f < nf; ++f) {
        const std::uint64_t cell_seed = derive_seed(spec.seed, "poison", (j * na + a) * nf + f);
        const std::size_t n_flip = round_half_up(spec.fractions[f] * static_cast<double>(r_hat));
        Dataset poisoned = train;
        if (n_flip <= r_hat) {
          std::vector<std::size_t> pick = report.flip_set;
          Rng rng(derive_seed(cell_seed, "subsample"));
          rng.shuffle(pick);
          pick.resize(n_flip);
          std::sort(pick.begin(), pick.end());
          poisoned = poison(train, pick, 0, cell_seed);
        } else {
          const std::size_t extra = std::min(n_flip - r_hat, train.size() - r_hat);
          poisoned = poison(train, report.flip_set, extra, cell_seed);
        }
        for (std::size_t v = 0; v < nv; ++v) {
          TrainConfig cfg = params.victim;
          cfg.loss = spec.victim_losses[v];
          cfg.seed = derive_seed(cell_seed, "victim", v);
          const auto model = flipbound::train(poisoned, cfg).classifier;
          Cell& cell = cells[j][(a * nv + v) * nf + f];
          cell.desired = model.predict(target.x) == target.y;
          std::size_t correct = 0;
          for (std::size_t i = 0; i < test.size(); ++i) {
            if (i != ti && model.predict(test.row(i)) == test.label(i)) ++correct;
          }
          cell.accuracy = static_cast<double>(correct) / static_cast<double>(test.size() - 1);
        }
      }
    }
  });

  GridReport out;
  out.targets = records;
  for (std::size_t a = 0; a < na; ++a) {
    for (std::size_t v = 0; v < nv; ++v) {
      Grid g{spec.attack_losses[a], spec.victim_losses[v], {}};
      for (std::size_t f = 0; f < nf; ++f) {
        EvalRow row{spec.fractions[f], 0.0, 0.0, 0};
        std::size_t hits = 0;
        double acc = 0.0;
        for (std::size_t j = 0; j < nt; ++j) {
          if (!records[j].certified[a]) continue;
          const Cell& c = cells[j][(a * nv + v) * nf + f];
          hits += c.desired ? 1 : 0;
          acc += c.accuracy;
          ++row.n_points;
        }
        if (row.n_points > 0) {
          row.rho = static_cast<double>(hits) / static_cast<double>(row.n_points);
          row.accuracy = acc / static_cast<double>(row.n_points);
        }
        g.rows.push_back(row);
      }
      out.grids.push_back(std::move(g));
    }
  }
  return out;
}

std::vector<Bin> histogram(const std::vector<double>& values, double width) {
  if (values.empty()) throw InputError("histogram of an empty sample");
  if (!(width > 0.0) || !std::isfinite(width)) throw InputError("bin width must be positive");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double start = std::floor(*lo_it / width) * width;
  const auto nbins = static_cast<std::size_t>(std::floor((*hi_it - start) / width)) + 1;
  std::vector<Bin> bins(nbins);
  for (std::size_t b = 0; b < nbins; ++b) {
    bins[b].lo = start + static_cast<double>(b) * width;
    bins[b].hi = bins[b].lo + width;
  }
  for (double x : values) {
    auto b = static_cast<std::size_t>(std::floor((x - start) / width));
    ++bins[std::min(b, nbins - 1)].count;
  }
  return bins;
}

std::vector<Bin> histogram(const std::vector<double>& values, const std::vector<double>& edges) {
  if (values.empty()) throw InputError("histogram of an empty sample");
  if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end()) ||
      std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
    throw InputError("bin edges must be strictly ascending, at least two");
  }
  std::vector<Bin> bins(edges.size() - 1);
  for (std::size_t b = 0; b + 1 < edges.size(); ++b) bins[b] = {edges[b], edges[b + 1], 0};
  for (double x : values) {
    if (x < edges.front() || x > edges.back()) throw InputError("value outside the bin edges");
    auto it = std::upper_bound(edges.begin(), edges.end(), x);
    auto b = static_cast<std::size_t>(it - edges.begin()) - 1;
    ++bins[std::min(b, bins.size() - 1)].count;
  }
  return bins;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw InputError("percentile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

Summary summarize(const std::vector<double>& values) {
  if (values.empty()) throw InputError("summary of an empty sample");
  Summary s;
  s.n = values.size();
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  s.p25 = percentile(values, 0.25);
  s.median = percentile(values, 0.5);
  s.p75 = percentile(values, 0.75);
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  return s;
}

}  // namespace flipbound
