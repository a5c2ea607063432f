#include "flipbound/reduction.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>

#include "flipbound/errors.hpp"
#include "flipbound/random.hpp"

namespace flipbound {

Graph::Graph(std::size_t n, std::vector<std::pair<std::size_t, std::size_t>> edges) : n_(n) {
  for (auto [u, v] : edges) {
    if (u < 1 || v < 1 || u > n || v > n) {
      throw InputError("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                       ") has an endpoint outside 1.." + std::to_string(n));
    }
    if (u == v) throw InputError("self-loop at vertex " + std::to_string(u));
    edges_.emplace_back(std::min(u, v), std::max(u, v));
  }
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
    throw InputError("duplicate edge");
  }
}

Graph Graph::complete(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = i + 1; j <= n; ++j) e.emplace_back(i, j);
  }
  return Graph(n, std::move(e));
}

Graph Graph::path(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t i = 1; i < n; ++i) e.emplace_back(i, i + 1);
  return Graph(n, std::move(e));
}

Graph Graph::star(std::size_t leaves) {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t i = 2; i <= leaves + 1; ++i) e.emplace_back(1, i);
  return Graph(leaves + 1, std::move(e));
}

Graph Graph::erdos_renyi(std::size_t n, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw InputError("edge probability must lie in [0, 1]");
  Rng rng(derive_seed(seed, "erdos-renyi"));
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = i + 1; j <= n; ++j) {
      if (rng.uniform01() < p) e.emplace_back(i, j);
    }
  }
  return Graph(n, std::move(e));
}

Graph parse_edge_list(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::optional<std::size_t> n;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    if (!n) {
      long long v;
      if (!(ls >> v) || v < 0) throw InputError("line " + std::to_string(lineno) + ": expected vertex count");
      n = static_cast<std::size_t>(v);
    } else {
      long long u, v;
      if (!(ls >> u >> v) || u < 1 || v < 1) {
        throw InputError("line " + std::to_string(lineno) + ": expected two positive vertex ids");
      }
      edges.emplace_back(static_cast<std::size_t>(u), static_cast<std::size_t>(v));
    }
    std::string rest;
    if (ls >> rest) throw InputError("line " + std::to_string(lineno) + ": trailing content");
  }
  if (!n) throw InputError("edge list is empty");
  return Graph(*n, std::move(edges));
}

Graph load_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return parse_edge_list(in);
}

void write_edge_list(const Graph& g, std::ostream& out) {
  out << g.n() << '\n';
  for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

ReducedInstance reduce(const Graph& g) {
  const std::size_t n = g.n(), d = n + 1;
  std::vector<double> f;
  std::vector<Label> y;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(d, 0.0);
    row[i] = 1.0;
    f.insert(f.end(), row.begin(), row.end());
    y.push_back(-1);
  }
  for (auto [u, v] : g.edges()) {
    std::vector<double> row(d, 0.0);
    row[u - 1] = row[v - 1] = row[n] = 1.0;
    f.insert(f.end(), row.begin(), row.end());
    y.push_back(1);
  }
  std::vector<std::string> names;
  for (std::size_t j = 1; j <= d; ++j) names.push_back("x" + std::to_string(j));
  TestTarget t{std::vector<double>(d, 0.0), -1};
  t.x[n] = 1.0;
  return {Dataset(d, std::move(f), std::move(y), std::move(names)), std::move(t)};
}

VertexCover min_vertex_cover(const Graph& g) {
  const std::size_t n = g.n();
  if (n > kVertexCoverLimit) {
    throw InputError("vertex cover search is limited to " + std::to_string(kVertexCoverLimit) +
                     " vertices");
  }
  for (std::size_t size = 0; size <= n; ++size) {
    std::vector<std::size_t> combo(size);
    for (std::size_t k = 0; k < size; ++k) combo[k] = k + 1;
    while (true) {
      std::vector<bool> in(n + 1, false);
      for (std::size_t v : combo) in[v] = true;
      bool covers = true;
      for (auto [u, v] : g.edges()) covers = covers && (in[u] || in[v]);
      if (covers) return {size, combo};
      std::size_t k = size;
      while (k > 0 && combo[k - 1] == n - size + k) --k;
      if (k == 0) break;
      ++combo[k - 1];
      for (std::size_t j = k; j < size; ++j) combo[j] = combo[j - 1] + 1;
    }
  }
  return {n, {}};  // not reached: all vertices always cover
}

std::pair<std::vector<std::size_t>, LinearClassifier> cover_certificate(const Graph& g,
                                                                        const VertexCover& c) {
  LinearClassifier w{std::vector<double>(g.n() + 1, -1.0), 0.0};
  std::vector<std::size_t> flips;
  for (std::size_t v : c.cover) {
    w.w[v - 1] = 3.0;
    flips.push_back(v - 1);
  }
  return {flips, w};
}

ReductionCheck verify_reduction(const Graph& g, ReductionSolver solver, bool bias,
                                const MilpParams& params) {
  const auto inst = reduce(g);
  ReductionCheck out;
  out.cover_size = min_vertex_cover(g).size;
  if (solver == ReductionSolver::BranchAndBound) {
    const auto r = solve_bnb(encode(inst.data, inst.target, params.big_m, params.eps, bias), params);
    if (r.status != SolveStatus::Proven) throw NumericalError("node budget ran out on the reduction");
    out.robustness = r.robustness;
  } else {
    SeparabilityParams sep{params.eps, params.big_m, bias, params.lp};
    out.robustness = brute_force_robustness(inst.data, inst.target, sep).robustness;
  }
  out.equal = out.robustness == out.cover_size;
  return out;
}

}  // namespace flipbound
