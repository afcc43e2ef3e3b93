// Stemma consistency: does a partial variant labeling of a manuscript family
// tree extend to a coloring in which every variant reading spreads from a
// single source down copiedBy edges?
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "satkit/sat.hpp"

namespace satkit {

/// A connected DAG with a single root. Edges are (parent, child) index pairs.
struct Stemma {
  std::vector<std::string> manuscripts;
  std::vector<std::pair<int, int>> copied_by;

  int size() const { return static_cast<int>(manuscripts.size()); }
  std::optional<int> index_of(const std::string& name) const;
  /// parents()[x] lists the manuscripts x was copied from.
  std::vector<std::vector<int>> parents() const;
  std::vector<std::vector<int>> children() const;
  /// The unique manuscript without a parent. Requires a validated stemma.
  int root() const;

  /// Throws InputError on an empty graph, out-of-range endpoints, a cycle,
  /// several roots, or several weakly connected components.
  void validate() const;
};

/// Partial labeling: readings[x] is the variant index of manuscript x, or
/// nullopt when unknown. `variants` names the variant indices.
struct Feature {
  std::vector<std::optional<int>> readings;
  std::vector<std::string> variants;

  /// Distinct variants that occur in `readings`.
  int used_variants() const;
};

/// Total map manuscript -> variant index.
using Coloring = std::vector<int>;

struct SourceAssignment {
  Coloring coloring;
  /// source_of[v] is the manuscript where variant v originates; nullopt for
  /// variants the coloring does not use.
  std::vector<std::optional<int>> source_of;
};

struct StemmaOptions {
  std::uint64_t seed = 0;
};

/// Returns a witness when the feature extends to a coloring in which every
/// manuscript other than the source of its reading has a parent with the same
/// reading; nullopt otherwise. A feature without any variant is colored with
/// a single anonymous variant.
std::optional<SourceAssignment> check_consistency(const Stemma& s, const Feature& f,
                                                  const StemmaOptions& options = {});

/// Polynomial check: every two same-colored manuscripts have a common
/// monochrome ancestor-or-self z with monochrome paths to both.
bool check_coloring(const Stemma& s, const Coloring& c);

struct SourcesResult {
  int k_min = 0;
  Coloring coloring;
  /// Manuscripts without a parent of the same color, ascending.
  std::vector<int> sources;
};

/// Minimum, over all colorings extending the feature, of the number of
/// manuscripts that have no parent with their own reading.
SourcesResult minimize_sources(const Stemma& s, const Feature& f,
                               const StemmaOptions& options = {});

/// Pairs (x, y) joined by a copiedBy path with at least two edges, sorted.
std::vector<std::pair<int, int>> indirect_ancestors(const Stemma& s);

/// Partially colored stemma built from a CNF. Variant 0 is "black", 1 is
/// "white". The instance is consistent iff the CNF is satisfiable.
struct ReducedInstance {
  Stemma stemma;
  Feature feature;
  /// Node of each CNF variable (index 0 unused), and of its negation copy
  /// where one was introduced (-1 otherwise).
  std::vector<int> positive_node;
  std::vector<int> negative_node;
};

ReducedInstance reduce_sat_to_color_connected(const CnfFormula& cnf);

/// Subset of dot: `digraph [name] { A -> B; A -> C -> D; E; }`, with optional
/// `[...]` attribute lists (ignored), quoted names, and `//` or `#` comments.
Stemma read_stemma_dot(std::istream& in, const std::string& source = "<stemma>");
void write_stemma_dot(std::ostream& out, const Stemma& s, const std::string& name = "stemma");

/// JSON array of objects mapping manuscript names to variant strings; null
/// marks an unknown reading. Names missing from an object are unknown too.
std::vector<Feature> read_features_json(std::istream& in, const Stemma& s,
                                        const std::string& source = "<features>");

enum class StemmaTask { Check, MinSources };

struct FeatureReport {
  bool consistent = false;
  /// Set for StemmaTask::MinSources.
  std::optional<int> k_min;
  /// Witness coloring; empty for inconsistent features under Check.
  Coloring coloring;
};

/// Processes every feature; uses up to `jobs` threads, each with private
/// solvers. Reports are in feature order.
std::vector<FeatureReport> run_stemma_batch(const Stemma& s, const std::vector<Feature>& features,
                                            StemmaTask task, int jobs = 1,
                                            const StemmaOptions& options = {});

}  // namespace satkit
