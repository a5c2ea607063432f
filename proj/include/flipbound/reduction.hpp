#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "flipbound/dataset.hpp"
#include "flipbound/exact.hpp"

namespace flipbound {

/// Undirected simple graph on vertices 1..n. Edges are stored as (i, j) with
/// i < j, sorted.
class Graph {
 public:
  Graph(std::size_t n, std::vector<std::pair<std::size_t, std::size_t>> edges);

  std::size_t n() const { return n_; }
  const std::vector<std::pair<std::size_t, std::size_t>>& edges() const { return edges_; }

  static Graph complete(std::size_t n);
  static Graph path(std::size_t n);
  static Graph star(std::size_t leaves);  // center is vertex 1
  static Graph erdos_renyi(std::size_t n, double p, std::uint64_t seed);

 private:
  std::size_t n_;
  std::vector<std::pair<std::size_t, std::size_t>> edges_;
};

/// "n" on the first line, then one "u v" edge per line. Blank lines and
/// lines starting with '#' are skipped.
Graph parse_edge_list(std::istream& in);
Graph load_edge_list(const std::filesystem::path& path);
void write_edge_list(const Graph& g, std::ostream& out);

struct ReducedInstance {
  Dataset data;
  TestTarget target;
};

/// One point per vertex (unit vector, label -1), then one per edge (ones at
/// both endpoints and at coordinate n + 1, label +1). Target (0, ..., 0, 1)
/// with desired label -1.
ReducedInstance reduce(const Graph& g);

inline constexpr std::size_t kVertexCoverLimit = 20;

struct VertexCover {
  std::size_t size = 0;
  std::vector<std::size_t> cover;  // 1-based, ascending
};

/// Exhaustive search by increasing size; the lexicographically first cover of
/// the minimum size wins. n <= 20.
VertexCover min_vertex_cover(const Graph& g);

/// Flip set (vertex rows of the cover) and the witness w_i = 3 on the cover,
/// -1 elsewhere, -1 on the last coordinate, b = 0.
std::pair<std::vector<std::size_t>, LinearClassifier> cover_certificate(const Graph& g,
                                                                        const VertexCover& c);

enum class ReductionSolver { BranchAndBound, BruteForce };

struct ReductionCheck {
  std::size_t robustness = 0;
  std::size_t cover_size = 0;
  bool equal = false;
};

/// Robustness of reduce(g) over the chosen hypothesis class against the
/// minimum vertex cover size. `bias` selects affine classifiers (true) or
/// classifiers through the origin (false).
ReductionCheck verify_reduction(const Graph& g, ReductionSolver solver, bool bias = true,
                                const MilpParams& params = {});

}  // namespace flipbound
