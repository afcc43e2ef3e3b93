// Reusable encoding layer shared by all problem encoders.
#pragma once

#include <chrono>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "satkit/sat.hpp"

namespace satkit {

/// Bidirectional map between named problem atoms and SAT variables.
/// Names are structured as `predicate(arg1,arg2,...)`.
class SymbolTable {
 public:
  static std::string atom_name(std::string_view predicate,
                               std::span<const std::string> args);

  /// Registers `name` for `v`. Throws std::invalid_argument if either side is
  /// already bound to something else.
  void bind(const std::string& name, Var v);

  std::optional<Var> find(const std::string& name) const;
  const std::string* name_of(Var v) const;
  std::size_t size() const { return by_name_.size(); }

  /// One `name ↦ variable` pair per line, ordered by variable.
  void dump(std::ostream& out) const;

 private:
  std::unordered_map<std::string, Var> by_name_;
  std::map<Var, std::string> by_var_;
};

enum class Sense { AtMost, AtLeast, Exactly };

struct CardinalityConstraint {
  std::vector<Lit> literals;
  int bound = 0;
  Sense sense = Sense::AtMost;
};

/// An edge whose presence is decided by a literal, for reachability encodings.
struct SelectableEdge {
  int from = 0;
  int to = 0;
  Lit selected;
};

/// Clause builder over a ClauseSink with a named-atom table.
class Encoder {
 public:
  explicit Encoder(ClauseSink& sink) : sink_(&sink) {}

  ClauseSink& sink() { return *sink_; }
  SymbolTable& symbols() { return symbols_; }
  const SymbolTable& symbols() const { return symbols_; }

  Lit fresh() { return Lit(sink_->new_var()); }

  /// Returns the variable of a named atom, allocating it on first use.
  Lit atom(std::string_view predicate, std::span<const std::string> args);
  Lit atom(std::string_view predicate, std::initializer_list<std::string> args) {
    return atom(predicate, std::span<const std::string>(args.begin(), args.size()));
  }

  /// A literal fixed to true by a unit clause.
  Lit constant_true();

  void clause(std::span<const Lit> lits) { sink_->add_clause(lits); }
  void clause(std::initializer_list<Lit> lits) { sink_->add_clause(lits); }

  /// Fresh literal equivalent to the conjunction / disjunction of `operands`.
  /// Throws std::invalid_argument on an empty operand list.
  Lit tseitin_and(std::span<const Lit> operands);
  Lit tseitin_or(std::span<const Lit> operands);
  Lit tseitin_and(std::initializer_list<Lit> ops) {
    return tseitin_and(std::span<const Lit>(ops.begin(), ops.size()));
  }
  Lit tseitin_or(std::initializer_list<Lit> ops) {
    return tseitin_or(std::span<const Lit>(ops.begin(), ops.size()));
  }
  /// Fresh literal equivalent to (antecedent -> consequent).
  Lit tseitin_implies(Lit antecedent, Lit consequent);

  /// Sequential-counter encoding. Literals must be distinct variables.
  void add_cardinality(const CardinalityConstraint& c);
  void at_most(std::span<const Lit> lits, int k);
  void at_least(std::span<const Lit> lits, int k);
  void exactly(std::span<const Lit> lits, int k);

  /// `width` fresh bits, least significant first.
  std::vector<Lit> new_number(int width);

  /// Fresh literal that implies value(a) < value(b) for two unsigned binary
  /// numbers of equal width (least significant bit first). One direction only:
  /// a false result says nothing about the order.
  Lit implies_less_than(std::span<const Lit> a, std::span<const Lit> b);

 private:
  ClauseSink* sink_;
  SymbolTable symbols_;
  std::optional<Lit> true_;
};

/// Bits needed to store any level 0..n, i.e. ceil(log2(n + 1)), at least 1.
int level_width(int n);

/// Founded (least-fixpoint) reachability from `root` over edges gated by their
/// selection literals. Returns one literal per node; in every model reach[y] is
/// true iff y is reachable from root through selected edges. Self-supporting
/// cycles are excluded with per-node binary levels: a reached non-root node
/// needs a selected in-edge from a reached node of strictly smaller level.
std::vector<Lit> encode_founded_reachability(Encoder& enc, int num_nodes,
                                             std::span<const SelectableEdge> edges,
                                             int root);

enum class MinimizeStatus {
  Optimal,     // k is the minimum
  Suboptimal,  // deadline hit; k is the best incumbent
  NoModel,     // base formula unsatisfiable
  Unknown,     // deadline hit before any model
};

const char* to_string(MinimizeStatus s);

struct MinimizeResult {
  MinimizeStatus status = MinimizeStatus::Unknown;
  int k = 0;
  Assignment model;
  int solver_calls = 0;
};

struct MinimizeOptions {
  std::uint64_t seed = 0;
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

/// Linear descent: solve, then require strictly fewer true objective
/// literals and re-solve until UNSAT. The bound is tightened through unit
/// clauses on one shared counter, so the solver keeps its learnt clauses.
MinimizeResult minimize_cardinality(Solver& solver, std::span<const Lit> objective,
                                    std::optional<std::chrono::steady_clock::time_point>
                                        deadline = std::nullopt);

MinimizeResult minimize_cardinality(const CnfFormula& formula,
                                    std::span<const Lit> objective,
                                    const MinimizeOptions& options = {});

}  // namespace satkit
