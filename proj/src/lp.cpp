#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>

#include "flipbound/errors.hpp"
#include "flipbound/linsep.hpp"

namespace flipbound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// How a tableau column maps back to an original variable:
// x_orig += sign * value (+ offset, accumulated separately).
struct ColumnOrigin {
  std::size_t var;
  double sign;
};

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), stride_(cols + 1), data_((rows + 1) * (cols + 1), 0.0) {}

  double& at(std::size_t r, std::size_t c) { return data_[r * stride_ + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * stride_ + c]; }
  double& rhs(std::size_t r) { return data_[r * stride_ + cols_]; }
  double rhs(std::size_t r) const { return data_[r * stride_ + cols_]; }
  // The objective row lives after the constraint rows; its rhs holds -z.
  double& cost(std::size_t c) { return at(rows_, c); }
  double& neg_z() { return rhs(rows_); }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  void pivot(std::size_t r, std::size_t q) {
    double* prow = &data_[r * stride_];
    const double inv = 1.0 / prow[q];
    for (std::size_t c = 0; c <= cols_; ++c) prow[c] *= inv;
    prow[q] = 1.0;
    for (std::size_t i = 0; i <= rows_; ++i) {
      if (i == r) continue;
      double* row = &data_[i * stride_];
      const double f = row[q];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c <= cols_; ++c) {
        if (prow[c] != 0.0) row[c] -= f * prow[c];
      }
      row[q] = 0.0;
    }
  }

  // Replaces nonbasic column q by its complement u - x_q.
  void complement_column(std::size_t q, double u) {
    for (std::size_t i = 0; i <= rows_; ++i) {
      double& a = at(i, q);
      if (a == 0.0) continue;
      rhs(i) -= a * u;
      a = -a;
    }
  }

  // Replaces the basic variable of row r (column `basic`) by its complement.
  void complement_basic(std::size_t r, std::size_t basic, double u) {
    for (std::size_t c = 0; c < cols_; ++c) {
      if (c != basic) at(r, c) = -at(r, c);
    }
    rhs(r) = u - rhs(r);
  }

  void drop_row(std::size_t r) {
    // Move the last constraint row and the objective row up by one slot.
    for (std::size_t i = r; i < rows_; ++i) {
      std::copy_n(&data_[(i + 1) * stride_], stride_, &data_[i * stride_]);
    }
    --rows_;
    data_.resize((rows_ + 1) * stride_);
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::size_t stride_;
  std::vector<double> data_;
};

enum class PhaseResult { Optimal, Unbounded };

class Simplex {
 public:
  Simplex(Tableau& t, std::vector<std::size_t>& basis, std::vector<double>& upper,
          std::vector<char>& flipped, std::vector<char>& barred, const LpTolerances& tol,
          std::size_t& pivots, std::size_t cap)
      : t_(t), basis_(basis), upper_(upper), flipped_(flipped), barred_(barred), tol_(tol),
        pivots_(pivots), cap_(cap) {}

  PhaseResult run() {
    std::size_t degenerate = 0;
    bool bland = false;
    while (true) {
      const auto q = choose_entering(bland);
      if (!q) return PhaseResult::Optimal;
      if (++pivots_ > cap_) {
        throw NumericalError("simplex exceeded its iteration cap of " + std::to_string(cap_));
      }

      // Ratio test: basic variables falling to zero or rising to their upper
      // bound, and the entering variable reaching its own upper bound.
      double best = upper_[*q];
      std::ptrdiff_t leave = -1;
      bool leave_at_upper = false;
      double best_abs = 0.0;
      for (std::size_t i = 0; i < t_.rows(); ++i) {
        const double a = t_.at(i, *q);
        double step;
        bool at_upper;
        if (a > tol_.pivot) {
          step = std::max(t_.rhs(i), 0.0) / a;
          at_upper = false;
        } else if (a < -tol_.pivot && std::isfinite(upper_[basis_[i]])) {
          step = std::max(upper_[basis_[i]] - t_.rhs(i), 0.0) / -a;
          at_upper = true;
        } else {
          continue;
        }
        const double mag = std::abs(a);
        bool take = step < best - 1e-12 || (leave < 0 && step <= best);
        if (!take && leave >= 0 && step <= best + 1e-12) {
          take = bland ? basis_[i] < basis_[static_cast<std::size_t>(leave)] : mag > best_abs;
        }
        if (take) {
          best = step;
          leave = static_cast<std::ptrdiff_t>(i);
          leave_at_upper = at_upper;
          best_abs = mag;
        }
      }
      if (!std::isfinite(best)) return PhaseResult::Unbounded;

      if (best < 1e-12) {
        if (++degenerate >= tol_.bland_after) bland = true;
      }

      if (leave < 0) {
        // Bound flip of the entering variable; no basis change.
        t_.complement_column(*q, upper_[*q]);
        flipped_[*q] ^= 1;
        continue;
      }
      const auto r = static_cast<std::size_t>(leave);
      if (leave_at_upper) {
        const std::size_t b = basis_[r];
        t_.complement_basic(r, b, upper_[b]);
        flipped_[b] ^= 1;
      }
      t_.pivot(r, *q);
      basis_[r] = *q;
      clean();
    }
  }

  void refresh_basic_flags() {
    is_basic_.assign(t_.cols(), 0);
    for (std::size_t b : basis_) is_basic_[b] = 1;
  }

 private:
  std::optional<std::size_t> choose_entering(bool bland) {
    std::optional<std::size_t> q;
    double most = -tol_.reduced_cost;
    for (std::size_t c = 0; c < t_.cols(); ++c) {
      if (barred_[c] || is_basic_[c]) continue;
      const double d = t_.cost(c);
      if (d < most) {
        q = c;
        if (bland) break;
        most = d;
      }
    }
    return q;
  }

  void clean() {
    refresh_basic_flags();
    for (std::size_t i = 0; i < t_.rows(); ++i) {
      double& v = t_.rhs(i);
      if (v < 0.0 && v > -1e-11) v = 0.0;
      const double u = upper_[basis_[i]];
      if (std::isfinite(u) && v > u && v < u + 1e-11) v = u;
    }
  }

  Tableau& t_;
  std::vector<std::size_t>& basis_;
  std::vector<double>& upper_;
  std::vector<char>& flipped_;
  std::vector<char>& barred_;
  const LpTolerances& tol_;
  std::size_t& pivots_;
  std::size_t cap_;
  std::vector<char> is_basic_;
};

}  // namespace

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "Optimal";
    case LpStatus::Infeasible: return "Infeasible";
    case LpStatus::Unbounded: return "Unbounded";
  }
  return "?";
}

std::size_t LpProblem::add_var(double lo, double hi, double c) {
  objective.push_back(c);
  lower.push_back(lo);
  upper.push_back(hi);
  for (auto& con : constraints) con.coeffs.push_back(0.0);
  return objective.size() - 1;
}

void LpProblem::add_constraint(std::vector<double> coeffs, Relation rel, double rhs) {
  constraints.push_back(LpConstraint{std::move(coeffs), rel, rhs});
}

void LpProblem::validate() const {
  const std::size_t n = objective.size();
  if (n == 0) throw InputError("LP needs at least one variable");
  if (lower.size() != n || upper.size() != n) throw InputError("LP bound vectors have wrong length");
  bool any_bound = false;
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(objective[j])) throw InputError("LP objective has a non-finite entry");
    if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] > upper[j] ||
        lower[j] == kInf || upper[j] == -kInf) {
      throw InputError("LP variable " + std::to_string(j) + " has invalid bounds");
    }
    any_bound = any_bound || std::isfinite(lower[j]) || std::isfinite(upper[j]);
  }
  for (const auto& c : constraints) {
    if (c.coeffs.size() != n) throw InputError("LP constraint row has wrong length");
    if (!std::isfinite(c.rhs)) throw InputError("LP constraint rhs is not finite");
    for (double a : c.coeffs) {
      if (!std::isfinite(a)) throw InputError("LP constraint has a non-finite coefficient");
    }
  }
  if (constraints.empty() && !any_bound) throw InputError("LP has neither constraints nor bounds");
}

LpSolution solve_lp(const LpProblem& p, const LpTolerances& tol) {
  p.validate();
  const std::size_t n = p.num_vars();

  // Shift/reflect/split every non-fixed variable into columns in [0, u].
  std::vector<ColumnOrigin> origin;
  std::vector<double> col_upper;
  std::vector<double> base_value(n, 0.0);  // contribution of offsets
  std::vector<std::vector<std::pair<std::size_t, double>>> var_cols(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double lo = p.lower[j], hi = p.upper[j];
    if (lo == hi) {
      base_value[j] = lo;
    } else if (std::isfinite(lo)) {
      base_value[j] = lo;
      var_cols[j].push_back({origin.size(), 1.0});
      origin.push_back({j, 1.0});
      col_upper.push_back(hi - lo);
    } else if (std::isfinite(hi)) {
      base_value[j] = hi;
      var_cols[j].push_back({origin.size(), -1.0});
      origin.push_back({j, -1.0});
      col_upper.push_back(kInf);
    } else {
      var_cols[j].push_back({origin.size(), 1.0});
      origin.push_back({j, 1.0});
      col_upper.push_back(kInf);
      var_cols[j].push_back({origin.size(), -1.0});
      origin.push_back({j, -1.0});
      col_upper.push_back(kInf);
    }
  }
  const std::size_t n_struct = origin.size();

  // Rows over structural columns, rhs >= 0.
  struct Row {
    std::vector<double> a;
    Relation rel;
    double rhs;
  };
  std::vector<Row> rows;
  for (const auto& c : p.constraints) {
    Row row{std::vector<double>(n_struct, 0.0), c.relation, c.rhs};
    bool nonzero = false;
    for (std::size_t j = 0; j < n; ++j) {
      if (c.coeffs[j] == 0.0) continue;
      row.rhs -= c.coeffs[j] * base_value[j];
      for (auto [col, s] : var_cols[j]) {
        row.a[col] += s * c.coeffs[j];
        nonzero = true;
      }
    }
    if (!nonzero) {
      const double r = row.rhs;  // constraint reads 0 rel r
      const bool ok = (c.relation == Relation::LessEq && r >= -tol.feasibility) ||
                      (c.relation == Relation::GreaterEq && r <= tol.feasibility) ||
                      (c.relation == Relation::Equal && std::abs(r) <= tol.feasibility);
      if (!ok) return LpSolution{LpStatus::Infeasible, 0.0, {}, 0};
      continue;
    }
    if (row.rhs < 0.0) {
      row.rhs = -row.rhs;
      for (double& v : row.a) v = -v;
      if (row.rel == Relation::LessEq) {
        row.rel = Relation::GreaterEq;
      } else if (row.rel == Relation::GreaterEq) {
        row.rel = Relation::LessEq;
      }
    }
    rows.push_back(std::move(row));
  }

  double const_obj = 0.0;
  for (std::size_t j = 0; j < n; ++j) const_obj += p.objective[j] * base_value[j];
  std::vector<double> struct_cost(n_struct, 0.0);
  for (std::size_t c = 0; c < n_struct; ++c) struct_cost[c] = origin[c].sign * p.objective[origin[c].var];

  // Column layout: structural | slack/surplus | artificial.
  std::size_t n_slack = 0, n_art = 0;
  for (const auto& r : rows) {
    if (r.rel != Relation::Equal) ++n_slack;
    if (r.rel != Relation::LessEq) ++n_art;
  }
  const std::size_t n_cols = n_struct + n_slack + n_art;
  const std::size_t art_begin = n_struct + n_slack;
  Tableau t(rows.size(), n_cols);
  std::vector<std::size_t> basis(rows.size());
  std::vector<double> upper(n_cols, kInf);
  std::copy(col_upper.begin(), col_upper.end(), upper.begin());
  std::vector<char> flipped(n_cols, 0), barred(n_cols, 0);
  {
    std::size_t s = n_struct, a = art_begin;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t c = 0; c < n_struct; ++c) t.at(i, c) = rows[i].a[c];
      t.rhs(i) = rows[i].rhs;
      switch (rows[i].rel) {
        case Relation::LessEq:
          t.at(i, s) = 1.0;
          basis[i] = s++;
          break;
        case Relation::GreaterEq:
          t.at(i, s++) = -1.0;
          t.at(i, a) = 1.0;
          basis[i] = a++;
          break;
        case Relation::Equal:
          t.at(i, a) = 1.0;
          basis[i] = a++;
          break;
      }
    }
  }

  const std::size_t cap =
      tol.iteration_cap != 0 ? tol.iteration_cap : 50 * (n + p.constraints.size());
  std::size_t pivots = 0;
  Simplex simplex(t, basis, upper, flipped, barred, tol, pivots, cap);

  // Phase 1: minimize the sum of artificials.
  if (n_art > 0) {
    for (std::size_t c = art_begin; c < n_cols; ++c) t.cost(c) = 1.0;
    for (std::size_t i = 0; i < t.rows(); ++i) {
      if (basis[i] < art_begin) continue;
      for (std::size_t c = 0; c < n_cols; ++c) t.cost(c) -= t.at(i, c);
      t.neg_z() -= t.rhs(i);
    }
    simplex.refresh_basic_flags();
    simplex.run();  // bounded below by zero, never unbounded
    const double infeasibility = -t.neg_z();
    if (infeasibility > tol.feasibility) return LpSolution{LpStatus::Infeasible, 0.0, {}, pivots};

    // Drive remaining artificials out of the basis; drop redundant rows.
    for (std::size_t i = 0; i < t.rows();) {
      if (basis[i] < art_begin) {
        ++i;
        continue;
      }
      std::optional<std::size_t> q;
      double best = tol.pivot;
      for (std::size_t c = 0; c < art_begin; ++c) {
        bool is_basic = std::find(basis.begin(), basis.end(), c) != basis.end();
        if (!is_basic && std::abs(t.at(i, c)) > best) {
          best = std::abs(t.at(i, c));
          q = c;
        }
      }
      if (q) {
        t.pivot(i, *q);
        basis[i] = *q;
        ++i;
      } else {
        t.drop_row(i);
        basis.erase(basis.begin() + static_cast<std::ptrdiff_t>(i));
      }
    }
    for (std::size_t c = art_begin; c < n_cols; ++c) barred[c] = 1;
  }

  // Phase 2 objective row from the original costs in the current orientation.
  {
    double offset = 0.0;
    std::vector<double> cost(n_cols, 0.0);
    for (std::size_t c = 0; c < n_struct; ++c) {
      cost[c] = flipped[c] ? -struct_cost[c] : struct_cost[c];
      if (flipped[c]) offset += struct_cost[c] * upper[c];
    }
    for (std::size_t c = 0; c < n_cols; ++c) t.cost(c) = cost[c];
    t.neg_z() = -offset;
    for (std::size_t i = 0; i < t.rows(); ++i) {
      const double cb = cost[basis[i]];
      if (cb == 0.0) continue;
      for (std::size_t c = 0; c < n_cols; ++c) t.cost(c) -= cb * t.at(i, c);
      t.neg_z() -= cb * t.rhs(i);
    }
  }
  simplex.refresh_basic_flags();
  if (simplex.run() == PhaseResult::Unbounded) {
    return LpSolution{LpStatus::Unbounded, -kInf, {}, pivots};
  }

  std::vector<double> col_value(n_cols, 0.0);
  for (std::size_t i = 0; i < t.rows(); ++i) col_value[basis[i]] = std::max(t.rhs(i), 0.0);
  for (std::size_t c = 0; c < n_struct; ++c) {
    if (flipped[c]) col_value[c] = upper[c] - col_value[c];
  }
  LpSolution sol;
  sol.status = LpStatus::Optimal;
  sol.pivots = pivots;
  sol.assignment = base_value;
  for (std::size_t c = 0; c < n_struct; ++c) {
    sol.assignment[origin[c].var] += origin[c].sign * col_value[c];
  }
  for (std::size_t j = 0; j < n; ++j) {
    sol.assignment[j] = std::clamp(sol.assignment[j], p.lower[j], p.upper[j]);
  }
  sol.objective_value = -t.neg_z() + const_obj;

  // Residual guard on the original rows. Dense tableau updates accumulate
  // error, so the guard is looser than the pivoting tolerance and scales with
  // the magnitude of the row's terms.
  constexpr double kResidual = 1e-6;
  for (const auto& c : p.constraints) {
    double act = 0.0, scale = 1.0 + std::abs(c.rhs);
    for (std::size_t j = 0; j < n; ++j) {
      act += c.coeffs[j] * sol.assignment[j];
      scale += std::abs(c.coeffs[j] * sol.assignment[j]);
    }
    double viol = 0.0;
    if (c.relation != Relation::GreaterEq) viol = std::max(viol, act - c.rhs);
    if (c.relation != Relation::LessEq) viol = std::max(viol, c.rhs - act);
    if (viol > kResidual * scale) {
      std::ostringstream msg;
      msg << "simplex solution violates a constraint by " << viol << " (row scale " << scale << ")";
      throw NumericalError(msg.str());
    }
  }
  return sol;
}

}  // namespace flipbound
