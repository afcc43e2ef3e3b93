// Minimum common supergraph of partially labeled n-graphs: complete every
// graph's labeling to a bijection onto n names so that the union of the
// induced edge images has as few arcs as possible.
#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "satkit/encode.hpp"

namespace satkit {

/// Undirected graph on vertices 0..n-1 with a partial injective labeling
/// vertex -> name index.
struct LabeledGraph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;
  std::vector<std::optional<int>> labels;
};

struct McsInstance {
  std::vector<std::string> names;
  std::vector<LabeledGraph> graphs;

  int n() const { return static_cast<int>(names.size()); }
  /// Throws InputError unless every graph has n vertices, edges join distinct
  /// in-range vertices, and labels are in range and injective.
  void validate() const;
};

/// Arcs over name indices, each stored as (a, b) with a < b, sorted.
struct Supergraph {
  std::vector<std::pair<int, int>> arcs;
  int size() const { return static_cast<int>(arcs.size()); }
};

/// Per graph, a total bijection vertex -> name index.
using LabelingFamily = std::vector<std::vector<int>>;

/// The union of edge images under `family`, normalized and sorted.
Supergraph induced_supergraph(const McsInstance& inst, const LabelingFamily& family);

/// True iff each labeling is a bijection extending the partial labels and
/// `sg` is exactly the induced union.
bool verify_supergraph(const McsInstance& inst, const LabelingFamily& family, const Supergraph& sg);

struct McsResult {
  Supergraph supergraph;
  LabelingFamily labeling;
  /// Optimal, or Suboptimal when the deadline stopped the descent.
  MinimizeStatus status = MinimizeStatus::Unknown;
  std::size_t clauses = 0;
  int vars = 0;
};

struct McsOptions {
  std::uint64_t seed = 0;
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct McsEncoding {
  CnfFormula cnf;
  SymbolTable symbols;
  /// label[t][x][a]: vertex x of graph t carries name a.
  std::vector<std::vector<std::vector<Lit>>> label;
  /// The arc(a,b) atoms, a < b, in lexicographic order.
  std::vector<Lit> arcs;
  std::vector<std::pair<int, int>> arc_names;
};

/// Bijective one-hot labeling, given labels as units, and the arc definition
/// in flattened form with both implications of its completion.
McsEncoding encode_mcs(const McsInstance& inst);

/// Throws std::runtime_error when the deadline passes before any model.
McsResult exact_mcs(const McsInstance& inst, const McsOptions& options = {});

/// Pairwise greedy merge: best pair first, then repeatedly the remaining
/// graph whose merge with the accumulated supergraph is smallest. Ties go to
/// the lowest input index. Requires at least two graphs.
McsResult greedy_mcs(const McsInstance& inst, const McsOptions& options = {});

/// Exhaustive minimum over all label completions. Throws std::invalid_argument
/// when some graph has more than `max_free` unlabeled vertices.
int brute_force_mcs(const McsInstance& inst, int max_free = 6);

/// `trees` random trees on n vertices; names "0".."n-1"; in every tree the
/// names 0..labeled-1 sit on distinct random vertices.
McsInstance random_mcs_instance(int trees, int n, int labeled, std::uint64_t seed);

/// JSON: {"names": [...], "graphs": [{"edges": [[u, v], ...],
/// "labels": {"<vertex>": "<name>", ...}}, ...]}; "n" is optional and must
/// match the number of names when present.
McsInstance read_mcs_json(std::istream& in, const std::string& source = "<instance>");
void write_mcs_json(std::ostream& out, const McsInstance& inst);

}  // namespace satkit
