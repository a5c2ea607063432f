#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "flipbound/bounds.hpp"
#include "flipbound/errors.hpp"
#include "flipbound/harness.hpp"
#include "flipbound/parallel.hpp"
#include "flipbound/random.hpp"
#include "flipbound/reduction.hpp"
#include "flipbound/report.hpp"
#include "flipbound/sanitize.hpp"

namespace fs = std::filesystem;

namespace flipbound::cli {
namespace {

constexpr const char* kVersion = "0.1.0";

struct Global {
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  std::string out = ".";
  std::string log_level = "info";
};

struct DataOpts {
  std::string train;
  std::string label;
  std::string pos_class, neg_class;
  bool standardize = false;
  std::string targets;
  std::string target_json;
  std::vector<std::size_t> target_index;
  std::size_t n_targets = 0;
  double test_fraction = 0.1;
};

struct SolveOpts {
  double big_m = 1000.0;
  double eps = 1e-10;
  std::size_t node_budget = 1'000'000;
  std::size_t k = 0;        // 0: default_k
  std::size_t k_prime = 0;  // 0: m + 1
  std::string loss = "hinge";
  std::size_t trials = 10;
  double l2 = 1e-4;
  double eta0 = 0.0;  // 0: loss default
  std::size_t epochs = 1000;
  double tol = 1e-3;
  std::size_t patience = 5;
  bool average = false;
};

class Logger {
 public:
  Logger(std::ostream& os, const std::string& level) : os_(os), level_(level) {}
  template <class... T>
  void info(const T&... parts) {
    if (level_ == "quiet") return;
    ((os_ << parts), ...);
    os_ << '\n';
  }
  template <class... T>
  void debug(const T&... parts) {
    if (level_ != "debug") return;
    ((os_ << parts), ...);
    os_ << '\n';
  }
  template <class... T>
  void warn(const T&... parts) {
    os_ << "warning: ";
    ((os_ << parts), ...);
    os_ << '\n';
  }

 private:
  std::ostream& os_;
  std::string level_;
};

ColumnSelector selector(const std::string& label) {
  if (label.empty()) return {};
  if (std::all_of(label.begin(), label.end(), [](unsigned char c) { return std::isdigit(c); })) {
    return static_cast<std::size_t>(std::stoull(label));
  }
  return label;
}

struct NamedTarget {
  std::size_t index = 0;
  std::optional<std::size_t> source_row;  // row of the input file, split mode only
  TestTarget target;
};

struct Inputs {
  Dataset train;
  std::optional<Dataset> test;  // split mode
  std::vector<NamedTarget> targets;
  std::string target_mode;
};

Dataset load_dataset(const DataOpts& o) {
  if (o.train.empty()) throw InputError("--train is required");
  if (!o.pos_class.empty() || !o.neg_class.empty()) {
    if (o.pos_class.empty() || o.neg_class.empty()) {
      throw InputError("--pos-class and --neg-class go together");
    }
    return binarize(load_raw_csv(o.train, selector(o.label)), o.pos_class, o.neg_class);
  }
  return load_csv(o.train, selector(o.label));
}

Inputs load_inputs(const DataOpts& o, const Global& g, bool need_targets) {
  Inputs in{load_dataset(o), std::nullopt, {}, {}};
  const int modes = !o.targets.empty() + !o.target_json.empty() +
                    (!o.target_index.empty() || o.n_targets > 0);
  if (modes > 1) throw InputError("use one of --targets, --target-json, --target-index/--n-targets");
  if (need_targets && modes == 0) {
    throw InputError("no targets: pass --targets, --target-json or --target-index");
  }

  if (!o.target_index.empty() || o.n_targets > 0) {
    in.target_mode = "split";
    Split s = split(in.train, {o.test_fraction, derive_seed(g.seed, "split")});
    std::vector<std::size_t> idx = o.target_index;
    if (idx.empty()) {
      for (std::size_t i = 0; i < std::min(o.n_targets, s.test.size()); ++i) idx.push_back(i);
    }
    for (std::size_t i : idx) {
      if (i >= s.test.size()) {
        throw InputError("--target-index " + std::to_string(i) + " is outside the test split of " +
                         std::to_string(s.test.size()) + " rows");
      }
      const auto row = s.test.row(i);
      in.targets.push_back({i, s.test_indices[i], {{row.begin(), row.end()}, -s.test.label(i)}});
    }
    in.train = std::move(s.train);
    in.test = std::move(s.test);
  } else {
    if (!o.targets.empty()) {
      in.target_mode = "file";
      const Dataset t = o.pos_class.empty()
                            ? load_csv(o.targets, selector(o.label))
                            : binarize(load_raw_csv(o.targets, selector(o.label)), o.pos_class,
                                       o.neg_class);
      if (t.dim() != in.train.dim()) throw InputError("targets and training data differ in width");
      for (std::size_t i = 0; i < t.size(); ++i) {
        const auto row = t.row(i);
        in.targets.push_back({i, std::nullopt, {{row.begin(), row.end()}, t.label(i)}});
      }
    } else if (!o.target_json.empty()) {
      in.target_mode = "json";
      std::ifstream f(o.target_json);
      if (!f) throw InputError("cannot open " + o.target_json);
      json j;
      try {
        f >> j;
      } catch (const json::exception& e) {
        throw InputError(o.target_json + ": " + e.what());
      }
      in.targets.push_back({0, std::nullopt, target_from_json(j)});
    }
  }
  for (const auto& t : in.targets) t.target.validate(in.train.dim());

  if (o.standardize) {
    const auto z = Standardizer::fit(in.train);
    in.train = z.apply(in.train);
    if (in.test) in.test = z.apply(*in.test);
    for (auto& t : in.targets) t.target = z.apply(t.target);
  }
  return in;
}

TrainConfig train_config(const SolveOpts& s) {
  TrainConfig c;
  c.loss = parse_loss(s.loss);
  c.l2 = s.l2;
  c.epochs_max = s.epochs;
  if (s.eta0 > 0.0) c.eta0 = s.eta0;
  c.tol = s.tol;
  c.patience = s.patience;
  c.average = s.average;
  c.validate();
  return c;
}

MilpParams milp_params(const SolveOpts& s) {
  if (!(s.eps > 0.0)) throw InputError("--eps must be positive");
  if (!(s.big_m > 100.0 * s.eps)) throw InputError("--M must be much larger than --eps");
  if (s.node_budget < 1) throw InputError("--node-budget must be at least 1");
  MilpParams p;
  p.big_m = s.big_m;
  p.eps = s.eps;
  p.node_budget = s.node_budget;
  return p;
}

BoundParams bound_params(const SolveOpts& s, const Global& g, std::size_t m, std::size_t d) {
  BoundParams p;
  p.milp = milp_params(s);
  if (s.k > 0) {
    if (s.k > m) throw InputError("--k " + std::to_string(s.k) + " exceeds m = " + std::to_string(m));
    p.k = s.k;
  } else {
    p.k = default_k(m, d);
  }
  if (s.trials < 1) throw InputError("--trials must be at least 1");
  p.upper.n_trials = s.trials;
  p.upper.k_prime = s.k_prime;
  p.upper.train = train_config(s);
  p.seed = g.seed;
  p.threads = g.threads;
  return p;
}

json solve_params_json(const SolveOpts& s, const Inputs& in, const Global& g) {
  const std::size_t m = in.train.size(), d = in.train.dim();
  const TrainConfig tc = train_config(s);
  return {{"M", s.big_m},
          {"eps", s.eps},
          {"node_budget", s.node_budget},
          {"k", s.k > 0 ? s.k : default_k(m, d)},
          {"k_prime", s.k_prime > 0 ? s.k_prime : m + 1},
          {"loss", to_string(tc.loss)},
          {"trials", s.trials},
          {"l2", tc.l2},
          {"eta0", tc.step0()},
          {"epochs_max", tc.epochs_max},
          {"tol", tc.tol},
          {"patience", tc.patience},
          {"average", tc.average},
          {"seed", g.seed},
          {"m", m},
          {"d", d},
          {"target_mode", in.target_mode}};
}

void write_json(const fs::path& p, const json& j) {
  std::ofstream f(p);
  if (!f) throw InputError("cannot write " + p.string());
  f << j.dump(2) << '\n';
}

fs::path out_dir(const Global& g) {
  fs::path p(g.out);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (!fs::is_directory(p)) throw InputError("cannot create output directory " + g.out);
  return p;
}

void write_manifest(const fs::path& dir, const std::string& command,
                    const std::vector<std::string>& argv, const json& params) {
  write_json(dir / "manifest.json", {{"tool", "flipbound"},
                                     {"version", kVersion},
                                     {"command", command},
                                     {"argv", argv},
                                     {"cwd", fs::current_path().string()},
                                     {"params", params}});
}

json target_json(const NamedTarget& t) {
  json j = {{"index", t.index}, {"desired", t.target.y}};
  if (t.source_row) j["source_row"] = *t.source_row;
  return j;
}

double millis_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

// Per-target work shares the thread budget: many targets run side by side with
// serial inner loops, a few targets each get the whole pool.
std::pair<std::size_t, std::size_t> split_threads(std::size_t threads, std::size_t targets) {
  if (threads == 0) threads = default_threads();
  if (targets >= threads) return {threads, 1};
  return {1, threads};
}

bool all_blocks_exhausted(const LowerBoundReport& r) {
  return !r.blocks.empty() && std::all_of(r.blocks.begin(), r.blocks.end(), [](const BlockResult& b) {
    return b.status == BlockStatus::BudgetExhausted;
  });
}

// ---------------------------------------------------------------- commands

int cmd_bounds(const DataOpts& o, const SolveOpts& s, const Global& g,
               const std::vector<std::string>& argv, Logger& log) {
  const Inputs in = load_inputs(o, g, true);
  BoundParams p = bound_params(s, g, in.train.size(), in.train.dim());
  const auto dir = out_dir(g);
  const auto [outer, inner] = split_threads(g.threads, in.targets.size());
  p.threads = inner;

  const std::size_t n = in.targets.size();
  std::vector<json> rows(n), timing(n);
  std::vector<std::optional<BoundsReport>> results(n);
  std::vector<std::string> errors(n);
  std::vector<int> error_kind(n, 0);
  parallel_for(n, outer, [&](std::size_t i) {
    const auto start = std::chrono::steady_clock::now();
    try {
      results[i] = compute_bounds(in.train, in.targets[i].target, p);
    } catch (const InputError& e) {
      errors[i] = e.what();
      error_kind[i] = kExitInput;
    } catch (const TargetUnreachable& e) {
      errors[i] = e.what();
      error_kind[i] = kExitInput;
    } catch (const std::exception& e) {
      errors[i] = e.what();
      error_kind[i] = kExitNumerical;
    }
    timing[i] = {{"index", in.targets[i].index}, {"millis", millis_since(start)}};
  });

  std::vector<double> lowers, uppers;
  std::size_t failed = 0, exhausted = 0;
  std::ostringstream csv;
  csv << "index,lower,upper,certified\n";
  for (std::size_t i = 0; i < n; ++i) {
    json row = target_json(in.targets[i]);
    if (!results[i]) {
      row["error"] = errors[i];
      ++failed;
      log.warn("target ", in.targets[i].index, ": ", errors[i]);
      rows[i] = std::move(row);
      continue;
    }
    const auto& r = *results[i];
    row["lower"] = r.lower.lower;
    row["upper"] = r.upper.upper;
    row["certified"] = r.upper.certified;
    row["lower_report"] = to_json(r.lower);
    row["upper_report"] = to_json(r.upper);
    rows[i] = std::move(row);
    json blocks = json::array();
    for (const auto& b : r.lower.blocks) blocks.push_back({{"id", b.id}, {"millis", b.millis}});
    timing[i]["blocks"] = std::move(blocks);
    lowers.push_back(static_cast<double>(r.lower.lower));
    uppers.push_back(static_cast<double>(r.upper.upper));
    if (all_blocks_exhausted(r.lower)) ++exhausted;
    if (r.upper.certified && r.lower.lower > r.upper.upper) {
      log.warn("target ", in.targets[i].index, ": lower ", r.lower.lower, " exceeds upper ",
               r.upper.upper);
    }
    if (!r.upper.warning.empty()) log.warn("target ", in.targets[i].index, ": ", r.upper.warning);
    csv << in.targets[i].index << ',' << r.lower.lower << ',' << r.upper.upper << ','
        << (r.upper.certified ? 1 : 0) << '\n';
    log.info("[bounds] target ", in.targets[i].index, ": lower ", r.lower.lower, ", upper ",
             r.upper.upper, r.upper.certified ? "" : " (uncertified)");
  }

  json params = solve_params_json(s, in, g);
  json report = {{"command", "bounds"}, {"params", params}, {"targets", rows}};
  if (!lowers.empty()) {
    report["summary"] = {{"lower", to_json(summarize(lowers))}, {"upper", to_json(summarize(uppers))}};
  }
  write_json(dir / "report.json", report);
  write_json(dir / "timings.json", {{"targets", timing}});
  std::ofstream(dir / "bounds.csv") << csv.str();
  write_manifest(dir, "bounds", argv, params);

  if (n > 0 && failed == n) {
    return *std::max_element(error_kind.begin(), error_kind.end());
  }
  if (n > 0 && exhausted == n - failed && exhausted > 0) return kExitBudget;
  return kExitOk;
}

int cmd_exact(const DataOpts& o, const SolveOpts& s, const Global& g, bool no_bias,
              bool brute, const std::string& lp_file, const std::vector<std::string>& argv,
              Logger& log) {
  const Inputs in = load_inputs(o, g, true);
  const MilpParams mp = milp_params(s);
  const auto dir = out_dir(g);
  json rows = json::array();
  bool exhausted = false;
  for (const auto& t : in.targets) {
    const auto inst = encode(in.train, t.target, mp.big_m, mp.eps, !no_bias);
    if (!lp_file.empty()) {
      std::ofstream f(in.targets.size() == 1 ? fs::path(lp_file)
                                             : fs::path(lp_file + "." + std::to_string(t.index)));
      write_lp_text(inst, f);
    }
    ExactResult r;
    if (brute) {
      SeparabilityParams sep{mp.eps, mp.big_m, !no_bias, mp.lp};
      r = brute_force_robustness(in.train, t.target, sep);
    } else {
      r = solve_bnb(inst, mp);
    }
    exhausted = exhausted || r.status == SolveStatus::BudgetExhausted;
    json row = target_json(t);
    row.update(to_json(r));
    row["certificate_ok"] = verify_certificate(in.train, t.target, r.flip_set, r.witness);
    rows.push_back(std::move(row));
    log.info("robustness ", r.robustness, " (", to_string(r.status), ", ", r.node_count, " nodes)");
  }
  json params = solve_params_json(s, in, g);
  params["bias"] = !no_bias;
  params["solver"] = brute ? "brute-force" : "branch-and-bound";
  write_json(dir / "exact.json", {{"command", "exact"}, {"params", params}, {"targets", rows}});
  write_manifest(dir, "exact", argv, params);
  return exhausted ? kExitBudget : kExitOk;
}

int cmd_lower(const DataOpts& o, const SolveOpts& s, const Global& g,
              const std::vector<std::string>& argv, Logger& log) {
  const Inputs in = load_inputs(o, g, true);
  const BoundParams p = bound_params(s, g, in.train.size(), in.train.dim());
  const auto dir = out_dir(g);
  json rows = json::array(), timing = json::array();
  std::size_t exhausted = 0;
  for (const auto& t : in.targets) {
    const auto plan = partition(in.train.size(), *p.k, derive_seed(g.seed, "lower"));
    const auto r = lower_bound(in.train, t.target, plan, p.milp, g.threads);
    json row = target_json(t);
    row.update(to_json(r));
    rows.push_back(std::move(row));
    json tr = to_json(r, true);
    timing.push_back({{"index", t.index}, {"blocks", tr["blocks"]}});
    exhausted += all_blocks_exhausted(r);
    log.info("[lower] target ", t.index, ": ", r.lower);
  }
  json params = solve_params_json(s, in, g);
  write_json(dir / "lower.json", {{"command", "lower"}, {"params", params}, {"targets", rows}});
  write_json(dir / "timings.json", {{"targets", timing}});
  write_manifest(dir, "lower", argv, params);
  return exhausted > 0 && exhausted == in.targets.size() ? kExitBudget : kExitOk;
}

int cmd_upper(const DataOpts& o, const SolveOpts& s, const Global& g,
              const std::vector<std::string>& argv, Logger& log) {
  const Inputs in = load_inputs(o, g, true);
  const BoundParams p = bound_params(s, g, in.train.size(), in.train.dim());
  const auto dir = out_dir(g);
  json rows = json::array();
  for (const auto& t : in.targets) {
    UpperParams up = p.upper;
    up.train.seed = derive_seed(g.seed, "upper");
    up.threads = g.threads;
    const auto r = upper_bound(in.train, t.target, up);
    if (!r.warning.empty()) log.warn("target ", t.index, ": ", r.warning);
    json row = target_json(t);
    row.update(to_json(r));
    rows.push_back(std::move(row));
    log.info("[upper] target ", t.index, ": ", r.upper, r.certified ? "" : " (uncertified)");
  }
  json params = solve_params_json(s, in, g);
  write_json(dir / "upper.json", {{"command", "upper"}, {"params", params}, {"targets", rows}});
  write_manifest(dir, "upper", argv, params);
  return kExitOk;
}

int cmd_poison_eval(const DataOpts& o, const SolveOpts& s, const Global& g,
                    const std::vector<double>& fractions,
                    const std::vector<std::string>& attack_losses,
                    const std::vector<std::string>& victim_losses,
                    const std::vector<std::string>& argv, Logger& log) {
  if (o.target_index.empty() && o.n_targets == 0) {
    throw InputError("poison-eval needs a held-out split: pass --target-index or --n-targets");
  }
  const Inputs in = load_inputs(o, g, true);
  PoisonSpec spec;
  if (!fractions.empty()) spec.fractions = fractions;
  if (!attack_losses.empty()) {
    spec.attack_losses.clear();
    for (const auto& l : attack_losses) spec.attack_losses.push_back(parse_loss(l));
  }
  if (!victim_losses.empty()) {
    spec.victim_losses.clear();
    for (const auto& l : victim_losses) spec.victim_losses.push_back(parse_loss(l));
  }
  spec.seed = derive_seed(g.seed, "poison-eval");
  spec.validate();

  HarnessParams hp;
  hp.attack.n_trials = s.trials;
  hp.attack.k_prime = s.k_prime;
  hp.attack.train = train_config(s);
  hp.victim = train_config(s);
  hp.threads = g.threads;
  std::vector<std::size_t> idx;
  for (const auto& t : in.targets) idx.push_back(t.index);

  log.info("[poison-eval] ", idx.size(), " targets, ", spec.fractions.size(), " fractions, ",
           spec.attack_losses.size() * spec.victim_losses.size(), " loss pairs");
  const auto result = evaluate_grid(in.train, *in.test, idx, spec, hp);
  const auto dir = out_dir(g);

  json grids = json::array();
  for (const auto& grid : result.grids) {
    grids.push_back(to_json(grid));
    std::ofstream f(dir / ("grid_" + std::string(to_string(grid.attack)) + "_" +
                           to_string(grid.victim) + ".csv"));
    f << "fraction,rho,accuracy,n\n" << std::setprecision(17);
    for (const auto& r : grid.rows) {
      f << r.fraction << ',' << r.rho << ',' << r.accuracy << ',' << r.n_points << '\n';
    }
  }
  json targets = json::array();
  for (std::size_t a = 0; a < spec.attack_losses.size(); ++a) {
    std::vector<double> values;
    for (const auto& t : result.targets) {
      if (t.certified[a]) values.push_back(static_cast<double>(t.upper[a]));
    }
    if (values.empty()) continue;
    std::ofstream f(dir / ("hist_upper_" + std::string(to_string(spec.attack_losses[a])) + ".csv"));
    f << "bin_lo,bin_hi,count\n";
    for (const auto& b : histogram(values, 1.0)) f << b.lo << ',' << b.hi << ',' << b.count << '\n';
  }
  for (const auto& t : result.targets) {
    targets.push_back({{"index", t.test_index},
                       {"desired", t.desired},
                       {"upper", t.upper},
                       {"certified", t.certified}});
  }
  json params = solve_params_json(s, in, g);
  params["fractions"] = spec.fractions;
  params["accuracy_set"] = "clean test split, target row excluded";
  params["test_fraction"] = o.test_fraction;
  write_json(dir / "grids.json",
             {{"command", "poison-eval"}, {"params", params}, {"grids", grids}, {"targets", targets}});
  write_manifest(dir, "poison-eval", argv, params);
  for (const auto& grid : result.grids) {
    if (grid.rows.size() >= 2 && grid.rows.front().fraction == 0.0) {
      const auto one = std::find_if(grid.rows.begin(), grid.rows.end(),
                                    [](const EvalRow& r) { return r.fraction == 1.0; });
      if (one != grid.rows.end() && one->rho < grid.rows.front().rho) {
        log.warn("rho(1) < rho(0) for ", to_string(grid.attack), "/", to_string(grid.victim));
      }
    }
  }
  return kExitOk;
}

int cmd_sanitize(const DataOpts& o, const SolveOpts& s, const Global& g, std::size_t k_neighbors,
                 bool sequential, const std::vector<std::string>& argv, Logger& log) {
  const Inputs in = load_inputs(o, g, false);
  SanitizeConfig cfg{k_neighbors, sequential, g.threads};
  const auto r = sanitize(in.train, cfg);
  const auto dir = out_dir(g);
  save_csv(r.data, dir / "sanitized.csv");
  json out = {{"command", "sanitize"},
              {"k_neighbors", k_neighbors},
              {"sequential", sequential},
              {"changed", r.changed},
              {"fixed_point", r.fixed_point}};
  log.info("[sanitize] relabeled ", r.changed.size(), " of ", in.train.size(), " points",
           r.fixed_point ? "" : " (not a fixed point)");
  json params = {{"k_neighbors", k_neighbors}, {"sequential", sequential}, {"seed", g.seed}};
  if (!in.targets.empty()) {
    std::vector<TestTarget> targets;
    for (const auto& t : in.targets) targets.push_back(t.target);
    const auto table =
        compare_robustness(in.train, targets, cfg, bound_params(s, g, in.train.size(), in.train.dim()));
    out["comparison"] = to_json(table);
    params.update(solve_params_json(s, in, g));
  }
  write_json(dir / "sanitize.json", out);
  write_manifest(dir, "sanitize", argv, params);
  return kExitOk;
}

int cmd_gen_vc(std::size_t n, double p, const std::string& graph_file, const Global& g,
               const std::vector<std::string>& argv, Logger& log) {
  const Graph graph = graph_file.empty() ? Graph::erdos_renyi(n, p, g.seed) : load_edge_list(graph_file);
  const auto inst = reduce(graph);
  const auto dir = out_dir(g);
  save_csv(inst.data, dir / "dataset.csv");
  write_json(dir / "target.json", to_json(inst.target));
  {
    std::ofstream f(dir / "graph.txt");
    write_edge_list(graph, f);
  }
  json info = {{"n", graph.n()}, {"edges", graph.edges().size()}};
  if (graph.n() <= kVertexCoverLimit) {
    const auto vc = min_vertex_cover(graph);
    info["min_vertex_cover"] = {{"size", vc.size}, {"cover", vc.cover}};
  }
  write_json(dir / "cover.json", info);
  log.info("[gen-vc] ", graph.n(), " vertices, ", graph.edges().size(), " edges -> ",
           inst.data.size(), " points");
  json params = {{"n", graph.n()}, {"p", p}, {"seed", g.seed}, {"graph", graph_file}};
  write_manifest(dir, "gen-vc", argv, params);
  return kExitOk;
}

int cmd_hist(const std::string& report_path, const std::string& field, double width,
             const std::vector<double>& edges, const Global& g,
             const std::vector<std::string>& argv, Logger& log) {
  std::ifstream f(report_path);
  if (!f) throw InputError("cannot open " + report_path);
  json report;
  try {
    f >> report;
  } catch (const json::exception& e) {
    throw InputError(report_path + ": " + e.what());
  }
  if (field != "upper" && field != "lower") throw InputError("--field must be upper or lower");
  std::vector<double> values;
  for (const auto& t : report.value("targets", json::array())) {
    if (!t.contains(field)) continue;
    if (field == "upper" && !t.value("certified", true)) continue;
    values.push_back(t.at(field).get<double>());
  }
  if (values.empty()) throw InputError("no " + field + " values in " + report_path);
  const auto bins = edges.empty() ? histogram(values, width) : histogram(values, edges);
  const auto dir = out_dir(g);
  std::ofstream csv(dir / ("histogram_" + field + ".csv"));
  csv << "bin_lo,bin_hi,count\n" << std::setprecision(17);
  for (const auto& b : bins) csv << b.lo << ',' << b.hi << ',' << b.count << '\n';
  write_json(dir / ("summary_" + field + ".json"), to_json(summarize(values)));
  log.info("[hist] ", values.size(), " values in ", bins.size(), " bins");
  write_manifest(dir, "hist", argv, {{"report", report_path}, {"field", field}, {"width", width}, {"edges", edges}});
  return kExitOk;
}

// ---------------------------------------------------------------- parsing

void add_global(CLI::App* sub, Global& g) {
  sub->add_option("--seed", g.seed, "Master seed; every random stream is derived from it");
  sub->add_option("--threads", g.threads, "Worker cap (0: logical cores)");
  sub->add_option("--out", g.out, "Output directory");
  sub->add_option("--log-level", g.log_level, "quiet, info or debug")
      ->check(CLI::IsMember({"quiet", "info", "debug"}));
}

void add_data(CLI::App* sub, DataOpts& o) {
  sub->add_option("--train", o.train, "Training CSV")->required();
  sub->add_option("--label", o.label, "Label column name or zero-based index (default: last)");
  sub->add_option("--pos-class", o.pos_class, "Class mapped to +1 (multi-class input)");
  sub->add_option("--neg-class", o.neg_class, "Class mapped to -1 (multi-class input)");
  sub->add_flag("--standardize", o.standardize, "z-score features with training statistics");
  sub->add_option("--targets", o.targets, "CSV of target rows; the label column is the desired label");
  sub->add_option("--target-json", o.target_json, "Single target as {x, y}");
  sub->add_option("--target-index", o.target_index, "Rows of the held-out split to attack")
      ->delimiter(',');
  sub->add_option("--n-targets", o.n_targets, "Attack the first N rows of the held-out split");
  sub->add_option("--test-fraction", o.test_fraction, "Held-out share for --target-index")
      ->check(CLI::Range(0.0, 1.0));
}

void add_solve(CLI::App* sub, SolveOpts& s) {
  sub->add_option("--M", s.big_m, "Big-M constant");
  sub->add_option("--eps", s.eps, "Strict-margin epsilon");
  sub->add_option("--node-budget", s.node_budget, "Branch-and-bound node budget per solve");
  sub->add_option("--k", s.k, "Number of partition blocks (presets: 20, 100, 250, 1000)");
  sub->add_option("--k-prime", s.k_prime, "Target copies for augmentation (default m + 1)");
  sub->add_option("--loss", s.loss, "hinge, log or modified-huber")
      ->check(CLI::IsMember({"hinge", "log", "modified-huber", "modified_huber"}));
  sub->add_option("--trials", s.trials, "Classifiers trained for the upper bound");
  sub->add_option("--l2", s.l2, "L2 penalty on w");
  sub->add_option("--eta0", s.eta0, "Initial step (0: 0.1 for log, 0.01 otherwise)");
  sub->add_option("--epochs", s.epochs, "Maximum SGD epochs");
  sub->add_option("--tol", s.tol, "Objective improvement that resets patience");
  sub->add_option("--patience", s.patience, "Epochs without improvement before stopping");
  sub->add_flag("--average", s.average, "Polyak averaging");
}

int dispatch(const std::vector<std::string>& args, std::ostream& err, int depth);

int cmd_replay(const std::string& manifest, const std::string& out_override, std::ostream& err,
               int depth) {
  if (depth > 0) throw InputError("a replay manifest cannot itself be a replay");
  std::ifstream f(manifest);
  if (!f) throw InputError("cannot open " + manifest);
  json m;
  try {
    f >> m;
  } catch (const json::exception& e) {
    throw InputError(manifest + ": " + e.what());
  }
  if (!m.contains("argv") || !m["argv"].is_array()) throw InputError(manifest + ": no argv");
  auto args = m["argv"].get<std::vector<std::string>>();
  if (!out_override.empty()) {
    // Absolute, so it survives the switch to the recorded working directory.
    const std::string out = fs::absolute(out_override).string();
    auto it = std::find(args.begin(), args.end(), "--out");
    if (it != args.end() && it + 1 != args.end()) {
      *(it + 1) = out;
    } else {
      args.push_back("--out");
      args.push_back(out);
    }
  }
  const fs::path here = fs::current_path();
  if (m.contains("cwd")) fs::current_path(m["cwd"].get<std::string>());
  int code;
  try {
    code = dispatch(args, err, depth + 1);
  } catch (...) {
    fs::current_path(here);
    throw;
  }
  fs::current_path(here);
  return code;
}

int dispatch(const std::vector<std::string>& args, std::ostream& err, int depth) {
  CLI::App app{"Certified bounds on label-flip robustness for linear classifiers", "flipbound"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Global g;
  DataOpts data;
  SolveOpts solve;

  auto* bounds = app.add_subcommand("bounds", "Lower and upper robustness bounds per target");
  add_global(bounds, g);
  add_data(bounds, data);
  add_solve(bounds, solve);

  bool no_bias = false, brute = false;
  std::string lp_file;
  auto* exact = app.add_subcommand("exact", "Exact robustness by branch-and-bound");
  add_global(exact, g);
  add_data(exact, data);
  add_solve(exact, solve);
  exact->add_flag("--no-bias", no_bias, "Restrict to classifiers through the origin");
  exact->add_flag("--brute-force", brute, "Enumerate flip sets instead (m <= 20)");
  exact->add_option("--lp-file", lp_file, "Also write the MILP in LP text form");

  auto* lower = app.add_subcommand("lower", "Partition lower bound only");
  add_global(lower, g);
  add_data(lower, data);
  add_solve(lower, solve);

  auto* upper = app.add_subcommand("upper", "Augmentation upper bound only");
  add_global(upper, g);
  add_data(upper, data);
  add_solve(upper, solve);

  std::vector<double> fractions;
  std::vector<std::string> attack_losses, victim_losses;
  auto* poison_eval = app.add_subcommand("poison-eval", "Poison-fraction grids over loss pairs");
  add_global(poison_eval, g);
  add_data(poison_eval, data);
  add_solve(poison_eval, solve);
  poison_eval->add_option("--fractions", fractions, "Multiples of the upper bound to flip")
      ->delimiter(',');
  poison_eval->add_option("--attack-losses", attack_losses, "Losses used to compute the attack")
      ->delimiter(',');
  poison_eval->add_option("--victim-losses", victim_losses, "Losses used by the retrained victim")
      ->delimiter(',');

  std::size_t k_neighbors = 15;
  bool sequential = false;
  auto* sanitize_cmd = app.add_subcommand("sanitize", "KNN label sanitization");
  add_global(sanitize_cmd, g);
  add_data(sanitize_cmd, data);
  add_solve(sanitize_cmd, solve);
  sanitize_cmd->add_option("--k-neighbors", k_neighbors, "Neighbors consulted per point");
  sanitize_cmd->add_flag("--sequential", sequential, "Relabel in index order instead of in one pass");

  std::size_t vc_n = 5;
  double vc_p = 0.4;
  std::string graph_file;
  auto* gen_vc = app.add_subcommand("gen-vc", "Vertex-cover reduction instance");
  add_global(gen_vc, g);
  gen_vc->add_option("--n", vc_n, "Vertices of the random graph");
  gen_vc->add_option("--p", vc_p, "Edge probability")->check(CLI::Range(0.0, 1.0));
  gen_vc->add_option("--graph", graph_file, "Edge-list file instead of a random graph");

  std::string report_path, field = "upper";
  double width = 1.0;
  std::vector<double> edges;
  auto* hist = app.add_subcommand("hist", "Histogram of a bounds report");
  add_global(hist, g);
  hist->add_option("--report", report_path, "report.json from bounds")->required();
  hist->add_option("--field", field, "upper or lower");
  hist->add_option("--width", width, "Bin width");
  hist->add_option("--edges", edges, "Explicit ascending bin edges")->delimiter(',');

  std::string manifest, replay_out;
  auto* replay = app.add_subcommand("replay", "Re-run a command from its manifest.json");
  replay->add_option("--manifest", manifest, "manifest.json")->required();
  replay->add_option("--out", replay_out, "Write to this directory instead");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    err << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    err << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    err << kVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }

  Logger log(err, g.log_level);
  if (*replay) return cmd_replay(manifest, replay_out, err, depth);
  if (*bounds) return cmd_bounds(data, solve, g, args, log);
  if (*exact) return cmd_exact(data, solve, g, no_bias, brute, lp_file, args, log);
  if (*lower) return cmd_lower(data, solve, g, args, log);
  if (*upper) return cmd_upper(data, solve, g, args, log);
  if (*poison_eval) {
    return cmd_poison_eval(data, solve, g, fractions, attack_losses, victim_losses, args, log);
  }
  if (*sanitize_cmd) return cmd_sanitize(data, solve, g, k_neighbors, sequential, args, log);
  if (*gen_vc) return cmd_gen_vc(vc_n, vc_p, graph_file, g, args, log);
  if (*hist) return cmd_hist(report_path, field, width, edges, g, args, log);
  return kExitInput;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& log) {
  try {
    return dispatch(args, log, 0);
  } catch (const InputError& e) {
    log << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const TargetUnreachable& e) {
    log << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const NumericalError& e) {
    log << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const fs::filesystem_error& e) {
    log << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    log << "internal error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace flipbound::cli
