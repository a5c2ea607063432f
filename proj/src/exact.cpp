#include "flipbound/exact.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <queue>
#include <sstream>

#include "flipbound/errors.hpp"

namespace flipbound {

MilpInstance encode(const Dataset& data, const TestTarget& target, double big_m, double eps,
                    bool bias) {
  if (!(eps > 0.0)) throw InputError("eps must be positive");
  if (!(big_m > 100.0 * eps)) throw InputError("big-M must be much larger than eps");
  target.validate(data.dim());

  const std::size_t d = data.dim(), m = data.size();
  MilpInstance inst{data, target, {}, {}, big_m, eps, bias};
  LpProblem& lp = inst.base;
  for (std::size_t j = 0; j < d; ++j) lp.add_var(-big_m, big_m, 0.0);
  lp.add_var(bias ? -big_m : 0.0, bias ? big_m : 0.0, 0.0);
  for (std::size_t i = 0; i < m; ++i) inst.binary_indices.push_back(lp.add_var(0.0, 1.0, 1.0));

  const std::size_t n = d + 1 + m;
  const auto margin_row = [&](std::span<const double> x, Label y) {
    std::vector<double> a(n, 0.0);
    for (std::size_t j = 0; j < d; ++j) a[j] = y * x[j];
    a[d] = y;
    return a;
  };
  lp.add_constraint(margin_row(target.x, target.y), Relation::GreaterEq, eps);
  for (std::size_t i = 0; i < m; ++i) {
    auto keep = margin_row(data.row(i), data.label(i));
    auto flip = keep;
    keep[inst.delta_index(i)] = big_m;
    lp.add_constraint(std::move(keep), Relation::GreaterEq, eps);
    // y_i (w . x_i + b) - M (1 - delta_i) <= -eps, with the constant moved right.
    flip[inst.delta_index(i)] = big_m;
    lp.add_constraint(std::move(flip), Relation::LessEq, big_m - eps);
  }
  return inst;
}

void write_lp_text(const MilpInstance& inst, std::ostream& out) {
  const std::size_t d = inst.dim(), m = inst.num_points();
  const auto name = [&](std::size_t v) {
    if (v < d) return "w" + std::to_string(v);
    if (v == d) return std::string("b");
    return "delta" + std::to_string(v - d - 1);
  };
  const auto expr = [&](const std::vector<double>& a) {
    std::string s;
    for (std::size_t v = 0; v < a.size(); ++v) {
      if (a[v] == 0.0) continue;
      s += (a[v] < 0 ? " - " : (s.empty() ? " " : " + "));
      const double mag = std::abs(a[v]);
      if (mag != 1.0) {
        std::ostringstream num;
        num.precision(17);
        num << mag;
        s += num.str() + " ";
      }
      s += name(v);
    }
    return s.empty() ? std::string(" 0") : s;
  };
  out.precision(17);
  out << "\\ label-flip robustness MILP, m = " << m << ", d = " << d << ", M = " << inst.big_m
      << ", eps = " << inst.eps << "\n";
  out << "Minimize\n obj:" << expr(inst.base.objective) << "\nSubject To\n";
  for (std::size_t r = 0; r < inst.base.constraints.size(); ++r) {
    const auto& c = inst.base.constraints[r];
    const std::string label = r == 0 ? "target" : ((r - 1) % 2 == 0 ? "keep" : "flip") +
                                                      std::to_string((r - 1) / 2);
    const char* rel = c.relation == Relation::LessEq ? "<=" : (c.relation == Relation::GreaterEq ? ">=" : "=");
    out << ' ' << label << ':' << expr(c.coeffs) << ' ' << rel << ' ' << c.rhs << '\n';
  }
  out << "Bounds\n";
  for (std::size_t v = 0; v <= d; ++v) {
    out << ' ' << inst.base.lower[v] << " <= " << name(v) << " <= " << inst.base.upper[v] << '\n';
  }
  out << "Binaries\n";
  for (std::size_t i = 0; i < m; ++i) out << ' ' << name(inst.delta_index(i));
  out << "\nEnd\n";
}

const char* to_string(SolveStatus s) {
  return s == SolveStatus::Proven ? "Proven" : "BudgetExhausted";
}

bool verify_certificate(const Dataset& data, const TestTarget& target,
                        const std::vector<std::size_t>& flip_set, const LinearClassifier& witness) {
  if (witness.w.size() != data.dim()) return false;
  const auto check = check_consistency(witness, data.flipped(flip_set), target);
  return check.target_ok && check.misclassified.empty();
}

namespace {

struct Node {
  std::vector<std::int8_t> fixing;  // -1 free, 0 or 1 fixed
  std::size_t bound = 0;
  std::size_t depth = 0;
  std::size_t id = 0;
  std::size_t branch_var = 0;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.id > b.id;
  }
};

class BranchAndBound {
 public:
  BranchAndBound(const MilpInstance& inst, const MilpParams& params)
      : inst_(inst), params_(params), sep_{inst.eps, inst.big_m, inst.bias, params.lp} {}

  ExactResult run(std::optional<std::size_t> cutoff_hint) {
    const std::size_t m = inst_.num_points();
    seed_trivial_incumbent();
    if (cutoff_hint && *cutoff_hint + 1 < cutoff_) {
      cutoff_ = *cutoff_hint + 1;
      incumbent_from_hint_ = true;
    }

    Node root{std::vector<std::int8_t>(m, -1), 0, 0, next_id_++, 0};
    const auto root_eval = evaluate(root);
    if (root_eval == Eval::Infeasible) {
      throw TargetUnreachable("no classifier within the weight cap classifies the target as desired");
    }
    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    if (root_eval == Eval::Open) open.push(std::move(root));

    bool exhausted = false;
    std::size_t frontier_bound = cutoff_;
    while (!open.empty()) {
      Node node = open.top();
      open.pop();
      if (node.bound >= cutoff_) break;  // best-first: everything left is pruned too
      if (nodes_ + 2 > params_.node_budget) {
        exhausted = true;
        frontier_bound = node.bound;
        break;
      }
      for (std::int8_t value : {std::int8_t{1}, std::int8_t{0}}) {
        Node child{node.fixing, node.bound, node.depth + 1, next_id_++, 0};
        child.fixing[node.branch_var] = value;
        if (evaluate(child) == Eval::Open) open.push(std::move(child));
      }
    }

    if (incumbent_from_hint_ && !found_under_hint_ && !exhausted) {
      // The hint was not a valid upper bound; search again without it.
      BranchAndBound again(inst_, params_);
      ExactResult r = again.run(std::nullopt);
      r.node_count += nodes_;
      return r;
    }

    if (!have_incumbent_) {
      if (exhausted) throw NumericalError("node budget ran out before any realizable flip set was found");
      throw TargetUnreachable("no flip set makes the target reachable");
    }
    ExactResult out;
    out.robustness = best_flips_.size();
    out.flip_set = best_flips_;
    out.witness = best_witness_;
    out.node_count = nodes_;
    out.lp_failures = lp_failures_;
    if (exhausted) {
      out.status = SolveStatus::BudgetExhausted;
      out.best_bound = std::min({frontier_bound, cutoff_, out.robustness});
    } else {
      out.status = SolveStatus::Proven;
      out.best_bound = out.robustness;
    }
    return out;
  }

 private:
  enum class Eval { Infeasible, Pruned, Open };

  // Constant classifier b = y_t: every point is labelled y_t, so flipping all
  // points of the other class is always realizable. Without a bias, try
  // w = y_t x_t instead, which works unless some score lands exactly on zero.
  void seed_trivial_incumbent() {
    best_flips_.clear();
    if (inst_.bias) {
      for (std::size_t i = 0; i < inst_.num_points(); ++i) {
        if (inst_.data.label(i) != inst_.target.y) best_flips_.push_back(i);
      }
      best_witness_ = LinearClassifier{std::vector<double>(inst_.dim(), 0.0),
                                       static_cast<double>(inst_.target.y)};
      cutoff_ = best_flips_.size();
      have_incumbent_ = true;
      return;
    }
    cutoff_ = inst_.num_points() + 1;
    LinearClassifier c{inst_.target.x, 0.0};
    for (double& v : c.w) v *= inst_.target.y;
    const auto cons = check_consistency(c, inst_.data, inst_.target);
    if (!cons.target_ok) return;
    for (std::size_t i : cons.misclassified) {
      if (c.score(inst_.data.row(i)) == 0.0) return;
    }
    offer(cons.misclassified);
    found_under_hint_ = false;
  }

  void offer(std::vector<std::size_t> flips) {
    if (flips.size() >= cutoff_) return;
    FeasibilityWitness cert;
    try {
      cert = feasible_labeling(inst_.data.flipped(flips), inst_.target, sep_);
    } catch (const NumericalError&) {
      return;
    }
    if (!cert.feasible) return;
    best_flips_ = std::move(flips);
    best_witness_ = *cert.classifier;
    cutoff_ = best_flips_.size();
    have_incumbent_ = true;
    found_under_hint_ = true;
  }

  Eval evaluate(Node& node) {
    ++nodes_;
    const std::size_t d = inst_.dim(), m = inst_.num_points();
    LpProblem lp = inst_.base;
    std::size_t fixed_ones = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (node.fixing[i] < 0) continue;
      const double v = node.fixing[i];
      lp.lower[inst_.delta_index(i)] = v;
      lp.upper[inst_.delta_index(i)] = v;
      fixed_ones += static_cast<std::size_t>(node.fixing[i]);
    }
    if (fixed_ones >= cutoff_) return Eval::Pruned;

    LpSolution sol;
    try {
      sol = solve_lp(lp, params_.lp);
    } catch (const NumericalError&) {
      // No trustworthy bound here: keep the node and split on the first free
      // point, or settle a fully fixed node by a direct certificate check.
      ++lp_failures_;
      node.bound = fixed_ones;
      for (std::size_t i = 0; i < m; ++i) {
        if (node.fixing[i] < 0) {
          node.branch_var = i;
          return Eval::Open;
        }
      }
      std::vector<std::size_t> flips;
      for (std::size_t i = 0; i < m; ++i) {
        if (node.fixing[i] == 1) flips.push_back(i);
      }
      offer(flips);
      return Eval::Pruned;
    }
    if (sol.status == LpStatus::Infeasible) return Eval::Infeasible;
    if (sol.status != LpStatus::Optimal) throw NumericalError("unbounded MILP relaxation");

    const double relaxed = std::ceil(sol.objective_value - params_.lp.objective);
    node.bound = std::max(fixed_ones, static_cast<std::size_t>(std::max(relaxed, 0.0)));

    // Rounding heuristic: the relaxation's own classifier often certifies a flip set.
    LinearClassifier c{std::vector<double>(sol.assignment.begin(),
                                           sol.assignment.begin() + static_cast<std::ptrdiff_t>(d)),
                       sol.assignment[d]};
    const auto cons = check_consistency(c, inst_.data, inst_.target);
    if (cons.target_ok && cons.misclassified.size() < cutoff_) {
      bool strict = true;
      for (std::size_t i : cons.misclassified) strict = strict && c.score(inst_.data.row(i)) != 0.0;
      if (strict) offer(cons.misclassified);
    }
    if (node.bound >= cutoff_) return Eval::Pruned;

    // Most fractional free delta; ties go to the lowest index.
    std::optional<std::size_t> branch;
    double best_frac = params_.integrality;
    for (std::size_t i = 0; i < m; ++i) {
      if (node.fixing[i] >= 0) continue;
      const double v = sol.assignment[inst_.delta_index(i)];
      const double frac = std::min(v, 1.0 - v);
      if (frac > best_frac) {
        best_frac = frac;
        branch = i;
      }
    }
    if (!branch) {
      std::vector<std::size_t> flips;
      for (std::size_t i = 0; i < m; ++i) {
        const bool one = node.fixing[i] >= 0 ? node.fixing[i] == 1
                                              : sol.assignment[inst_.delta_index(i)] > 0.5;
        if (one) flips.push_back(i);
      }
      const std::size_t before = cutoff_;
      offer(flips);
      if (cutoff_ < before && best_flips_ == flips) return Eval::Pruned;
      // The relaxation was integral only up to tolerance: the rounded labeling
      // is not strictly realizable. Split on the free point closest to the
      // relaxation's decision boundary.
      double closest = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m; ++i) {
        if (node.fixing[i] >= 0) continue;
        const double margin = std::abs(c.score(inst_.data.row(i)));
        if (margin < closest) {
          closest = margin;
          branch = i;
        }
      }
      if (!branch) return Eval::Pruned;  // fully fixed and not realizable
    }
    node.branch_var = *branch;
    return Eval::Open;
  }

  const MilpInstance& inst_;
  const MilpParams& params_;
  SeparabilityParams sep_;
  std::vector<std::size_t> best_flips_;
  LinearClassifier best_witness_;
  std::size_t cutoff_ = 0;
  std::size_t nodes_ = 0;
  std::size_t lp_failures_ = 0;
  std::size_t next_id_ = 0;
  bool have_incumbent_ = false;
  bool incumbent_from_hint_ = false;
  bool found_under_hint_ = false;
};

}  // namespace

ExactResult solve_bnb(const MilpInstance& inst, const MilpParams& params,
                      std::optional<std::size_t> incumbent_hint) {
  if (params.node_budget < 1) throw InputError("node budget must be at least 1");
  BranchAndBound bnb(inst, params);
  return bnb.run(incumbent_hint);
}

ExactResult brute_force_robustness(const Dataset& data, const TestTarget& target,
                                   const SeparabilityParams& params) {
  const std::size_t m = data.size();
  if (m > kBruteForceLimit) {
    throw InputError("brute force is limited to " + std::to_string(kBruteForceLimit) + " points");
  }
  target.validate(data.dim());
  ExactResult out;
  for (std::size_t size = 0; size <= m; ++size) {
    // Lexicographic combinations of `size` indices.
    std::vector<std::size_t> combo(size);
    for (std::size_t k = 0; k < size; ++k) combo[k] = k;
    while (true) {
      ++out.node_count;
      const auto cert = feasible_labeling(data.flipped(combo), target, params);
      if (cert.feasible) {
        out.robustness = size;
        out.best_bound = size;
        out.flip_set = combo;
        out.witness = *cert.classifier;
        out.status = SolveStatus::Proven;
        return out;
      }
      std::size_t k = size;
      while (k > 0 && combo[k - 1] == m - size + k - 1) --k;
      if (k == 0) break;
      ++combo[k - 1];
      for (std::size_t j = k; j < size; ++j) combo[j] = combo[j - 1] + 1;
    }
  }
  if (!params.bias) throw TargetUnreachable("no flip set is realizable by a classifier through the origin");
  throw NumericalError("no flip set is realizable; the all-one-class labeling should always be");
}

}  // namespace flipbound
