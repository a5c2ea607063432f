#include "flipbound/dataset.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>

#include "flipbound/errors.hpp"
#include "flipbound/random.hpp"

namespace flipbound {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::optional<double> parse_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

}  // namespace

Dataset::Dataset(std::size_t dim, std::vector<double> features, std::vector<Label> labels,
                 std::vector<std::string> feature_names)
    : dim_(dim),
      features_(std::move(features)),
      labels_(std::move(labels)),
      feature_names_(std::move(feature_names)) {
  if (dim_ == 0) throw InputError("dataset dimension must be at least 1");
  if (labels_.empty()) throw InputError("dataset must contain at least one row");
  if (features_.size() != labels_.size() * dim_) {
    throw InputError("feature matrix size does not match rows x dimension");
  }
  if (!feature_names_.empty() && feature_names_.size() != dim_) {
    throw InputError("feature name count does not match dimension");
  }
  for (std::size_t k = 0; k < features_.size(); ++k) {
    if (!std::isfinite(features_[k])) {
      throw InputError("non-finite feature at row " + std::to_string(k / dim_) + ", column " +
                       std::to_string(k % dim_));
    }
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] != 1 && labels_[i] != -1) {
      throw InputError("label at row " + std::to_string(i) + " is not +1 or -1");
    }
  }
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  std::vector<double> f;
  std::vector<Label> y;
  f.reserve(indices.size() * dim_);
  y.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= size()) throw InputError("row index out of range: " + std::to_string(i));
    const auto r = row(i);
    f.insert(f.end(), r.begin(), r.end());
    y.push_back(labels_[i]);
  }
  return Dataset(dim_, std::move(f), std::move(y), feature_names_);
}

Dataset Dataset::flipped(std::span<const std::size_t> indices) const {
  std::vector<Label> y = labels_;
  for (std::size_t i : indices) {
    if (i >= size()) throw InputError("flip index out of range: " + std::to_string(i));
    y[i] = -y[i];
  }
  return with_labels(std::move(y));
}

Dataset Dataset::with_labels(std::vector<Label> labels) const {
  if (labels.size() != labels_.size()) throw InputError("label count mismatch");
  return Dataset(dim_, features_, std::move(labels), feature_names_);
}

std::size_t Dataset::count(Label y) const {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), y));
}

void TestTarget::validate(std::size_t dim) const {
  if (x.size() != dim) {
    throw InputError("target has dimension " + std::to_string(x.size()) + ", dataset has " +
                     std::to_string(dim));
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw InputError("target has a non-finite entry");
  }
  if (y != 1 && y != -1) throw InputError("target label must be +1 or -1");
}

std::optional<Label> parse_label(std::string_view token) {
  const auto v = parse_double(trim(token));
  if (!v) return std::nullopt;
  if (*v == 1.0) return 1;
  if (*v == -1.0 || *v == 0.0) return -1;
  return std::nullopt;
}

RawTable load_raw_csv(const std::filesystem::path& path, const ColumnSelector& label_column) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || trim(line).empty()) {
    throw InputError(path.string() + ": empty file");
  }
  std::vector<std::string> header;
  for (auto field : split_fields(line)) header.emplace_back(field);
  const std::size_t ncols = header.size();
  if (ncols < 2) throw InputError(path.string() + ": need at least one feature and a label column");

  std::size_t label_col = ncols - 1;
  if (const auto* name = std::get_if<std::string>(&label_column)) {
    const auto it = std::find(header.begin(), header.end(), *name);
    if (it == header.end()) throw InputError(path.string() + ": no column named '" + *name + "'");
    label_col = static_cast<std::size_t>(it - header.begin());
  } else if (const auto* pos = std::get_if<std::size_t>(&label_column)) {
    if (*pos >= ncols) throw InputError(path.string() + ": label column index out of range");
    label_col = *pos;
  }

  RawTable raw;
  raw.dim = ncols - 1;
  for (std::size_t c = 0; c < ncols; ++c) {
    if (c != label_col) raw.feature_names.push_back(header[c]);
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != ncols) {
      throw InputError(path.string() + ": line " + std::to_string(line_no) + " has " +
                       std::to_string(fields.size()) + " fields, expected " + std::to_string(ncols));
    }
    for (std::size_t c = 0; c < ncols; ++c) {
      if (c == label_col) {
        raw.classes.emplace_back(fields[c]);
        continue;
      }
      const auto v = parse_double(fields[c]);
      if (!v || !std::isfinite(*v)) {
        throw InputError(path.string() + ": line " + std::to_string(line_no) + ", column '" +
                         header[c] + "': '" + std::string(fields[c]) +
                         "' is not a finite number");
      }
      raw.features.push_back(*v);
    }
  }
  if (raw.classes.empty()) throw InputError(path.string() + ": no data rows");
  return raw;
}

Dataset load_csv(const std::filesystem::path& path, const ColumnSelector& label_column) {
  RawTable raw = load_raw_csv(path, label_column);
  std::vector<Label> labels;
  labels.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto y = parse_label(raw.classes[i]);
    if (!y) {
      throw InputError(path.string() + ": line " + std::to_string(i + 2) + ": label '" +
                       raw.classes[i] + "' is not one of +1, -1, 1, 0");
    }
    labels.push_back(*y);
  }
  return Dataset(raw.dim, std::move(raw.features), std::move(labels), std::move(raw.feature_names));
}

void save_csv(const Dataset& data, const std::filesystem::path& path, const std::string& label_name) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  for (std::size_t j = 0; j < data.dim(); ++j) {
    out << (data.feature_names().empty() ? "x" + std::to_string(j) : data.feature_names()[j]) << ',';
  }
  out << label_name << '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (double v : data.row(i)) out << format_double(v) << ',';
    out << data.label(i) << '\n';
  }
  if (!out) throw InputError("write failed: " + path.string());
}

Dataset binarize(const RawTable& raw, const std::string& pos_class, const std::string& neg_class) {
  const auto matches = [](const std::string& token, const std::string& cls) {
    if (token == cls) return true;
    const auto a = parse_double(token);
    const auto b = parse_double(cls);
    return a && b && *a == *b;
  };
  std::vector<double> f;
  std::vector<Label> y;
  std::size_t pos = 0, neg = 0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    Label lab;
    if (matches(raw.classes[i], pos_class)) {
      lab = 1;
      ++pos;
    } else if (matches(raw.classes[i], neg_class)) {
      lab = -1;
      ++neg;
    } else {
      continue;
    }
    f.insert(f.end(), raw.features.begin() + static_cast<std::ptrdiff_t>(i * raw.dim),
             raw.features.begin() + static_cast<std::ptrdiff_t>((i + 1) * raw.dim));
    y.push_back(lab);
  }
  if (pos == 0) throw InputError("class '" + pos_class + "' does not occur in the data");
  if (neg == 0) throw InputError("class '" + neg_class + "' does not occur in the data");
  return Dataset(raw.dim, std::move(f), std::move(y), raw.feature_names);
}

Split split(const Dataset& data, const SplitSpec& spec) {
  const std::size_t m = data.size();
  if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0)) {
    throw InputError("test fraction must lie in (0, 1)");
  }
  const auto n_test = static_cast<std::size_t>(std::ceil(static_cast<double>(m) * spec.test_fraction));
  if (n_test < 1 || n_test >= m) {
    throw InputError("split must leave at least one test and one training row");
  }
  Rng rng(derive_seed(spec.seed, "split"));
  const auto perm = rng.permutation(m);
  std::vector<std::size_t> test(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_test));
  std::vector<std::size_t> train(perm.begin() + static_cast<std::ptrdiff_t>(n_test), perm.end());
  std::sort(test.begin(), test.end());
  std::sort(train.begin(), train.end());
  return Split{data.subset(train), data.subset(test), std::move(train), std::move(test)};
}

Standardizer Standardizer::fit(const Dataset& train) {
  const std::size_t d = train.dim();
  const auto m = static_cast<double>(train.size());
  Standardizer s;
  s.mean_.assign(d, 0.0);
  s.scale_.assign(d, 1.0);
  for (std::size_t i = 0; i < train.size(); ++i) {
    const auto r = train.row(i);
    for (std::size_t j = 0; j < d; ++j) s.mean_[j] += r[j] / m;
  }
  std::vector<double> var(d, 0.0);
  for (std::size_t i = 0; i < train.size(); ++i) {
    const auto r = train.row(i);
    for (std::size_t j = 0; j < d; ++j) var[j] += (r[j] - s.mean_[j]) * (r[j] - s.mean_[j]) / m;
  }
  for (std::size_t j = 0; j < d; ++j) {
    if (var[j] > 0.0) s.scale_[j] = std::sqrt(var[j]);
  }
  return s;
}

Dataset Standardizer::apply(const Dataset& data) const {
  if (data.dim() != mean_.size()) throw InputError("standardizer dimension mismatch");
  std::vector<double> f = data.features();
  for (std::size_t k = 0; k < f.size(); ++k) {
    const std::size_t j = k % data.dim();
    f[k] = (f[k] - mean_[j]) / scale_[j];
  }
  return Dataset(data.dim(), std::move(f), data.labels(), data.feature_names());
}

TestTarget Standardizer::apply(const TestTarget& target) const {
  target.validate(mean_.size());
  TestTarget t = target;
  for (std::size_t j = 0; j < t.x.size(); ++j) t.x[j] = (t.x[j] - mean_[j]) / scale_[j];
  return t;
}

}  // namespace flipbound
