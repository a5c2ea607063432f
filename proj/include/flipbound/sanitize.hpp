#pragma once

#include <cstddef>
#include <vector>

#include "flipbound/bounds.hpp"
#include "flipbound/dataset.hpp"

namespace flipbound {

struct SanitizeConfig {
  std::size_t k_neighbors = 15;
  /// false: every vote reads the original labels. true: points are relabeled
  /// in index order and later votes see earlier changes.
  bool sequential = false;
  std::size_t threads = 1;
};

struct SanitizeResult {
  Dataset data;
  std::vector<std::size_t> changed;
  /// A second pass over the output would change nothing.
  bool fixed_point = false;
};

/// Relabels each point to the majority among its k nearest other points
/// (Euclidean, equal distances broken by lower index, tied votes keep the
/// current label). Features are untouched.
SanitizeResult sanitize(const Dataset& data, const SanitizeConfig& cfg = {});

/// Indices of the k nearest other points of row i, nearest first.
std::vector<std::size_t> nearest_neighbors(const Dataset& data, std::size_t i, std::size_t k);

struct ComparisonRow {
  std::size_t upper_before = 0, upper_after = 0;
  std::size_t lower_before = 0, lower_after = 0;
  bool certified_before = false, certified_after = false;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;
  double mean_upper_before = 0, mean_upper_after = 0;
  double mean_lower_before = 0, mean_lower_after = 0;
  std::vector<std::size_t> changed;
  bool fixed_point = false;
};

/// Bounds for every target on the data and on its sanitized copy.
ComparisonTable compare_robustness(const Dataset& data, const std::vector<TestTarget>& targets,
                                   const SanitizeConfig& cfg, const BoundParams& params);

}  // namespace flipbound
