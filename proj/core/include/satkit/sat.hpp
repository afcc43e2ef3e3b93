// Propositional literals, CNF containers and a CDCL solver.
#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace satkit {

/// Variables are dense positive indices starting at 1.
using Var = std::int32_t;

class Lit {
 public:
  constexpr Lit() = default;
  constexpr explicit Lit(Var v, bool positive = true)
      : code_(static_cast<std::uint32_t>(v) * 2u + (positive ? 0u : 1u)) {}

  /// Builds a literal from a signed DIMACS integer (non-zero).
  static Lit from_dimacs(int value);

  constexpr Var var() const { return static_cast<Var>(code_ >> 1); }
  constexpr bool positive() const { return (code_ & 1u) == 0; }
  constexpr std::uint32_t code() const { return code_; }
  constexpr Lit operator~() const {
    Lit l;
    l.code_ = code_ ^ 1u;
    return l;
  }
  constexpr int to_dimacs() const { return positive() ? var() : -var(); }

  constexpr auto operator<=>(const Lit&) const = default;

 private:
  std::uint32_t code_ = 0;
};

using Clause = std::vector<Lit>;

/// Sorts, removes duplicate literals and reports tautologies.
/// Returns std::nullopt when the clause contains both polarities of a variable.
std::optional<Clause> normalize_clause(std::span<const Lit> lits);

/// Anything that hands out variables and accepts clauses: a recorded formula
/// or a live solver. Encoders are written against this interface.
class ClauseSink {
 public:
  virtual ~ClauseSink() = default;
  virtual Var new_var() = 0;
  virtual void add_clause(std::span<const Lit> lits) = 0;
  virtual int num_vars() const = 0;

  void add_clause(std::initializer_list<Lit> lits) {
    add_clause(std::span<const Lit>(lits.begin(), lits.size()));
  }
};

/// A total truth assignment over the variables of one formula or solver.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(std::vector<bool> values) : values_(std::move(values)) {}

  bool value(Var v) const { return values_.at(static_cast<std::size_t>(v)); }
  bool value(Lit l) const { return value(l.var()) == l.positive(); }
  int num_vars() const { return static_cast<int>(values_.size()) - 1; }
  bool satisfies(std::span<const Lit> clause) const;

 private:
  // index 0 unused
  std::vector<bool> values_;
};

/// A recorded CNF: the unit of DIMACS export and grounding-size statistics.
/// Tautologies are dropped and duplicate literals merged on insertion.
class CnfFormula final : public ClauseSink {
 public:
  Var new_var() override { return ++num_vars_; }
  using ClauseSink::add_clause;
  void add_clause(std::span<const Lit> lits) override;
  int num_vars() const override { return num_vars_; }

  /// Grows the variable range without emitting clauses (DIMACS headers).
  void reserve_vars(int n);

  const std::vector<Clause>& clauses() const { return clauses_; }
  std::size_t num_clauses() const { return clauses_.size(); }
  bool satisfied_by(const Assignment& a) const;

 private:
  int num_vars_ = 0;
  std::vector<Clause> clauses_;
};

enum class Status { Sat, Unsat, Unknown };

const char* to_string(Status s);

struct SolverOptions {
  std::uint64_t seed = 0;
  double random_decision_freq = 0.01;
  double var_decay = 0.95;
  double clause_decay = 0.999;
  int restart_base = 100;
};

struct SolverStats {
  std::uint64_t decisions = 0;
  std::uint64_t propagations = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t restarts = 0;
  std::uint64_t learnt_clauses = 0;
};

/// Conflict-driven clause-learning solver: two watched literals, first-UIP
/// learning with clause minimisation, VSIDS branching with phase saving,
/// Luby restarts and activity/LBD based learnt-clause deletion.
///
/// Incremental: clauses may be added between solve() calls and each call
/// may pass a different set of assumptions. Verdict and model are a pure
/// function of the seed and of the clause insertion order.
class Solver final : public ClauseSink {
 public:
  explicit Solver(SolverOptions options = {});
  Solver(const Solver&) = delete;
  Solver& operator=(const Solver&) = delete;
  Solver(Solver&&) noexcept;
  Solver& operator=(Solver&&) noexcept;
  ~Solver() override;

  Var new_var() override;
  using ClauseSink::add_clause;
  /// Throws std::invalid_argument on an unallocated variable.
  void add_clause(std::span<const Lit> lits) override;
  int num_vars() const override;

  /// Loads every clause of `formula`, allocating missing variables.
  void add_formula(const CnfFormula& formula);

  Status solve(std::span<const Lit> assumptions = {});
  Status solve(std::initializer_list<Lit> assumptions) {
    return solve(std::span<const Lit>(assumptions.begin(), assumptions.size()));
  }

  /// Model of the last Sat answer.
  const Assignment& model() const;

  /// False once the clause set alone has been shown unsatisfiable.
  bool okay() const;

  /// Solving past the deadline yields Status::Unknown.
  void set_deadline(std::optional<std::chrono::steady_clock::time_point> t);

  const SolverStats& stats() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace satkit
