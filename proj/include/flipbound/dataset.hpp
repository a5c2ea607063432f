#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace flipbound {

/// Binary class label, always +1 or -1.
using Label = int;

/// Dense m x d feature matrix (row-major) with +/-1 labels.
/// Immutable after construction; every constructor validates its invariants.
class Dataset {
 public:
  Dataset(std::size_t dim, std::vector<double> features, std::vector<Label> labels,
          std::vector<std::string> feature_names = {});

  std::size_t size() const { return labels_.size(); }
  std::size_t dim() const { return dim_; }

  std::span<const double> row(std::size_t i) const {
    return {features_.data() + i * dim_, dim_};
  }
  Label label(std::size_t i) const { return labels_[i]; }

  const std::vector<double>& features() const { return features_; }
  const std::vector<Label>& labels() const { return labels_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }

  /// Rows at `indices`, in the given order.
  Dataset subset(std::span<const std::size_t> indices) const;
  /// Same features, labels negated at `indices`.
  Dataset flipped(std::span<const std::size_t> indices) const;
  Dataset with_labels(std::vector<Label> labels) const;

  std::size_t count(Label y) const;

 private:
  std::size_t dim_;
  std::vector<double> features_;
  std::vector<Label> labels_;
  std::vector<std::string> feature_names_;
};

/// The attacker's targeted point and desired label.
struct TestTarget {
  std::vector<double> x;
  Label y = 1;

  /// Throws InputError unless x has `dim` finite entries and y is +/-1.
  void validate(std::size_t dim) const;
};

/// Features plus raw class tokens, before reduction to two classes.
struct RawTable {
  std::size_t dim = 0;
  std::vector<double> features;
  std::vector<std::string> classes;
  std::vector<std::string> feature_names;

  std::size_t size() const { return classes.size(); }
};

/// Selects the label column by header name or zero-based position.
/// An empty selector means the last column.
using ColumnSelector = std::variant<std::monostate, std::string, std::size_t>;

RawTable load_raw_csv(const std::filesystem::path& path, const ColumnSelector& label_column = {});

/// Loads a CSV whose label column holds +1/-1/1/0 (0 maps to -1).
Dataset load_csv(const std::filesystem::path& path, const ColumnSelector& label_column = {});

/// Writes header + rows, label last. Values use shortest round-trip formatting
/// so a reload reproduces every double bit for bit.
void save_csv(const Dataset& data, const std::filesystem::path& path,
              const std::string& label_name = "label");

/// Keeps rows of the two classes; pos_class -> +1, neg_class -> -1.
/// Tokens match textually or, when both parse as numbers, numerically.
Dataset binarize(const RawTable& raw, const std::string& pos_class, const std::string& neg_class);

/// Parses a label token from {+1, -1, 1, 0}; returns nullopt otherwise.
std::optional<Label> parse_label(std::string_view token);

struct SplitSpec {
  double test_fraction = 0.1;
  std::uint64_t seed = 0;
};

struct Split {
  Dataset train;
  Dataset test;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
};

/// Seeded random partition; the test part has ceil(m * test_fraction) rows.
Split split(const Dataset& data, const SplitSpec& spec);

/// Per-feature z-score fitted on one dataset and applied to others.
/// Constant features are centred but left unscaled.
class Standardizer {
 public:
  static Standardizer fit(const Dataset& train);
  Dataset apply(const Dataset& data) const;
  TestTarget apply(const TestTarget& target) const;

 private:
  std::vector<double> mean_;
  std::vector<double> scale_;
};

}  // namespace flipbound
