#include "flipbound/sanitize.hpp"

#include <algorithm>
#include <numeric>

#include "flipbound/errors.hpp"
#include "flipbound/parallel.hpp"

namespace flipbound {

std::vector<std::size_t> nearest_neighbors(const Dataset& data, std::size_t i, std::size_t k) {
  const std::size_t m = data.size();
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(m - 1);
  const auto xi = data.row(i);
  for (std::size_t j = 0; j < m; ++j) {
    if (j == i) continue;
    const auto xj = data.row(j);
    double s = 0.0;
    for (std::size_t c = 0; c < data.dim(); ++c) s += (xi[c] - xj[c]) * (xi[c] - xj[c]);
    dist.emplace_back(s, j);
  }
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
  std::vector<std::size_t> out(k);
  for (std::size_t c = 0; c < k; ++c) out[c] = dist[c].second;
  return out;
}

namespace {

Label vote(const std::vector<std::size_t>& nbrs, const std::vector<Label>& labels, Label current) {
  long sum = 0;
  for (std::size_t j : nbrs) sum += labels[j];
  return sum > 0 ? 1 : (sum < 0 ? -1 : current);
}

std::vector<Label> one_pass(const std::vector<std::vector<std::size_t>>& nbrs,
                            std::vector<Label> labels, bool sequential) {
  if (sequential) {
    for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = vote(nbrs[i], labels, labels[i]);
    return labels;
  }
  std::vector<Label> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = vote(nbrs[i], labels, labels[i]);
  return out;
}

}  // namespace

SanitizeResult sanitize(const Dataset& data, const SanitizeConfig& cfg) {
  const std::size_t m = data.size();
  if (cfg.k_neighbors < 1 || cfg.k_neighbors + 1 > m) {
    throw InputError("k_neighbors must lie in [1, m - 1]");
  }
  // The neighbor lists depend only on features, so both passes share them.
  std::vector<std::vector<std::size_t>> nbrs(m);
  parallel_for(m, cfg.threads,
               [&](std::size_t i) { nbrs[i] = nearest_neighbors(data, i, cfg.k_neighbors); });

  const auto labels = one_pass(nbrs, data.labels(), cfg.sequential);
  std::vector<std::size_t> changed;
  for (std::size_t i = 0; i < m; ++i) {
    if (labels[i] != data.label(i)) changed.push_back(i);
  }
  const bool fixed = one_pass(nbrs, labels, cfg.sequential) == labels;
  return {data.with_labels(labels), std::move(changed), fixed};
}

ComparisonTable compare_robustness(const Dataset& data, const std::vector<TestTarget>& targets,
                                   const SanitizeConfig& cfg, const BoundParams& params) {
  const SanitizeResult clean = sanitize(data, cfg);
  ComparisonTable table;
  table.changed = clean.changed;
  table.fixed_point = clean.fixed_point;
  for (const auto& t : targets) {
    const auto before = compute_bounds(data, t, params);
    const auto after = compute_bounds(clean.data, t, params);
    table.rows.push_back({before.upper.upper, after.upper.upper, before.lower.lower,
                          after.lower.lower, before.upper.certified, after.upper.certified});
  }
  if (!table.rows.empty()) {
    std::size_t ub = 0, ua = 0, lb = 0, la = 0;
    for (const auto& r : table.rows) {
      ub += r.upper_before;
      ua += r.upper_after;
      lb += r.lower_before;
      la += r.lower_after;
    }
    const double n = static_cast<double>(table.rows.size());
    table.mean_upper_before = ub / n;
    table.mean_upper_after = ua / n;
    table.mean_lower_before = lb / n;
    table.mean_lower_after = la / n;
  }
  return table;
}

}  // namespace flipbound
