// Shortest path as cardinality-minimal model expansion, in four encodings.
//
//   variant 1: binary reaches, transitive join reaches(x,z) & reaches(z,y)
//   variant 2: binary reaches, recursion through edgeOnPath(x,z) & reaches(z,y)
//   variant 3: unary reachable from `from`
//   variant 4: unary reachable, degree and endpoint constraints dropped
//
// Variants 1-3 carry the five path constraints:
//   (1) edgeOnPath(x,y) => edge(x,y)
//   (2) from reaches to
//   (3) no selected edge enters `from` or leaves `to`
//   (4) every node has fewer than 2 selected in-edges and out-edges
//   (5) the head of every selected edge is reached from `from`
#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "satkit/encode.hpp"
#include "satkit/sat.hpp"

namespace satkit {

using Edge = std::pair<int, int>;

struct DiGraph {
  std::vector<std::string> nodes;
  std::vector<Edge> edges;
  int from = 0;
  int to = 0;

  int size() const { return static_cast<int>(nodes.size()); }
  bool has_edge(int u, int v) const;
  bool has_self_loop() const;

  /// Graph over nodes named "0".."n-1".
  static DiGraph numbered(int n, std::vector<Edge> edges, int from, int to);

  /// Throws InputError when from/to or an endpoint is out of range.
  void validate() const;
};

/// Edge-list text: `n m`, then m lines `u v` (0-based), then `from to`.
/// Blank lines and lines starting with '#' are ignored.
DiGraph read_graph(std::istream& in, const std::string& source = "<graph>");
void write_graph(std::ostream& out, const DiGraph& g);

/// `n` nodes, every ordered pair (u != v) present with probability `density`;
/// from and to are distinct random nodes.
DiGraph random_digraph(int n, double density, std::uint64_t seed);

struct EncodingStats {
  int variant = 0;
  int vars = 0;
  std::size_t clauses = 0;
  double encode_ms = 0;
  double solve_ms = 0;
};

struct ShortestPathEncoding {
  CnfFormula cnf;
  SymbolTable symbols;
  /// edgeOnPath atoms of the graph's edges, parallel to `objective_edges`.
  std::vector<Lit> objective;
  std::vector<Edge> objective_edges;
  EncodingStats stats;
};

/// Throws std::invalid_argument for a variant outside 1..4.
ShortestPathEncoding encode_variant(const DiGraph& g, int variant);

struct PathResult {
  int length = 0;
  /// Edges in path order from `from` to `to`.
  std::vector<Edge> edges;
  MinimizeStatus status = MinimizeStatus::Optimal;
  EncodingStats stats;
};

struct ShortestPathOptions {
  std::uint64_t seed = 0;
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

/// std::nullopt when `to` is unreachable from `from`. from == to yields the
/// empty path without calling the solver.
std::optional<PathResult> solve_shortest_path(const DiGraph& g, int variant,
                                              const ShortestPathOptions& options = {});

/// Breadth-first shortest path length; std::nullopt when unreachable.
std::optional<int> bfs_oracle(const DiGraph& g);

/// Evaluates the five path constraints on a selected edge set, with `reaches`
/// taken as the transitive closure of the selection.
bool satisfies_path_constraints(const DiGraph& g, const std::vector<Edge>& selected);

}  // namespace satkit
