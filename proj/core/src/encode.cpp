#include "satkit/encode.hpp"

#include <algorithm>
#include <bit>
#include <ostream>
#include <stdexcept>

namespace satkit {

std::string SymbolTable::atom_name(std::string_view predicate,
                                   std::span<const std::string> args) {
  std::string s(predicate);
  s += '(';
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) s += ',';
    s += args[i];
  }
  s += ')';
  return s;
}

void SymbolTable::bind(const std::string& name, Var v) {
  auto n = by_name_.find(name);
  if (n != by_name_.end()) {
    if (n->second == v) return;
    throw std::invalid_argument("atom " + name + " already bound");
  }
  if (by_var_.count(v))
    throw std::invalid_argument("variable " + std::to_string(v) + " already named");
  by_name_.emplace(name, v);
  by_var_.emplace(v, name);
}

std::optional<Var> SymbolTable::find(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

const std::string* SymbolTable::name_of(Var v) const {
  auto it = by_var_.find(v);
  return it == by_var_.end() ? nullptr : &it->second;
}

void SymbolTable::dump(std::ostream& out) const {
  for (const auto& [v, name] : by_var_) out << name << " ↦ " << v << '\n';
}

Lit Encoder::atom(std::string_view predicate, std::span<const std::string> args) {
  std::string name = SymbolTable::atom_name(predicate, args);
  if (auto v = symbols_.find(name)) return Lit(*v);
  Var v = sink_->new_var();
  symbols_.bind(name, v);
  return Lit(v);
}

Lit Encoder::constant_true() {
  if (!true_) {
    true_ = fresh();
    clause({*true_});
  }
  return *true_;
}

Lit Encoder::tseitin_and(std::span<const Lit> operands) {
  if (operands.empty()) throw std::invalid_argument("tseitin_and: no operands");
  Lit t = fresh();
  std::vector<Lit> big{t};
  for (Lit o : operands) {
    clause({~t, o});
    big.push_back(~o);
  }
  clause(big);
  return t;
}

Lit Encoder::tseitin_or(std::span<const Lit> operands) {
  if (operands.empty()) throw std::invalid_argument("tseitin_or: no operands");
  Lit t = fresh();
  std::vector<Lit> big{~t};
  for (Lit o : operands) {
    clause({t, ~o});
    big.push_back(o);
  }
  clause(big);
  return t;
}

Lit Encoder::tseitin_implies(Lit antecedent, Lit consequent) {
  return tseitin_or({~antecedent, consequent});
}

namespace {

void check_distinct(std::span<const Lit> lits) {
  std::vector<Var> vars;
  vars.reserve(lits.size());
  for (Lit l : lits) vars.push_back(l.var());
  std::sort(vars.begin(), vars.end());
  if (std::adjacent_find(vars.begin(), vars.end()) != vars.end())
    throw std::invalid_argument("cardinality constraint over repeated variable");
}

}  // namespace

// Sinz sequential counter. s[i][j] means "at least j+1 of lits[0..i] true".
void Encoder::at_most(std::span<const Lit> lits, int k) {
  check_distinct(lits);
  const int n = static_cast<int>(lits.size());
  if (k >= n) return;
  if (k < 0) {
    clause(std::span<const Lit>{});
    return;
  }
  if (k == 0) {
    for (Lit l : lits) clause({~l});
    return;
  }
  std::vector<std::vector<Lit>> s(static_cast<std::size_t>(n - 1));
  for (auto& row : s) row = new_number(k);

  clause({~lits[0], s[0][0]});
  for (int j = 1; j < k; ++j) clause({~s[0][j]});
  for (int i = 1; i < n - 1; ++i) {
    clause({~lits[i], s[i][0]});
    clause({~s[i - 1][0], s[i][0]});
    for (int j = 1; j < k; ++j) {
      clause({~lits[i], ~s[i - 1][j - 1], s[i][j]});
      clause({~s[i - 1][j], s[i][j]});
    }
    clause({~lits[i], ~s[i - 1][k - 1]});
  }
  clause({~lits[n - 1], ~s[n - 2][k - 1]});
}

void Encoder::at_least(std::span<const Lit> lits, int k) {
  std::vector<Lit> neg;
  neg.reserve(lits.size());
  for (Lit l : lits) neg.push_back(~l);
  at_most(neg, static_cast<int>(lits.size()) - k);
}

void Encoder::exactly(std::span<const Lit> lits, int k) {
  at_most(lits, k);
  at_least(lits, k);
}

void Encoder::add_cardinality(const CardinalityConstraint& c) {
  switch (c.sense) {
    case Sense::AtMost: at_most(c.literals, c.bound); break;
    case Sense::AtLeast: at_least(c.literals, c.bound); break;
    case Sense::Exactly: exactly(c.literals, c.bound); break;
  }
}

std::vector<Lit> Encoder::new_number(int width) {
  std::vector<Lit> bits;
  bits.reserve(static_cast<std::size_t>(width));
  for (int i = 0; i < width; ++i) bits.push_back(fresh());
  return bits;
}

// Scans from the most significant bit: either a is 0 and b is 1 here, or the
// bits agree and the decision moves one bit down.
Lit Encoder::implies_less_than(std::span<const Lit> a, std::span<const Lit> b) {
  if (a.size() != b.size() || a.empty())
    throw std::invalid_argument("implies_less_than: width mismatch");
  Lit top = fresh();
  Lit cur = top;
  for (std::size_t i = a.size(); i-- > 0;) {
    Lit strict = fresh();
    clause({~strict, ~a[i]});
    clause({~strict, b[i]});
    if (i == 0) {
      clause({~cur, strict});
    } else {
      Lit equal = fresh();
      clause({~cur, strict, equal});
      clause({~equal, ~a[i], b[i]});
      clause({~equal, a[i], ~b[i]});
      cur = equal;
    }
  }
  return top;
}

int level_width(int n) {
  return std::max(1, static_cast<int>(std::bit_width(static_cast<unsigned>(n))));
}

std::vector<Lit> encode_founded_reachability(Encoder& enc, int num_nodes,
                                             std::span<const SelectableEdge> edges,
                                             int root) {
  if (root < 0 || root >= num_nodes)
    throw std::invalid_argument("founded reachability: root out of range");
  std::vector<Lit> reach;
  reach.reserve(static_cast<std::size_t>(num_nodes));
  for (int v = 0; v < num_nodes; ++v) reach.push_back(enc.fresh());
  enc.clause({reach[root]});

  const int width = level_width(num_nodes);
  std::vector<std::vector<Lit>> level(static_cast<std::size_t>(num_nodes));
  for (int v = 0; v < num_nodes; ++v) level[v] = enc.new_number(width);
  for (Lit bit : level[root]) enc.clause({~bit});

  std::vector<std::vector<Lit>> support(static_cast<std::size_t>(num_nodes));
  for (const auto& e : edges) {
    if (e.from < 0 || e.from >= num_nodes || e.to < 0 || e.to >= num_nodes)
      throw std::invalid_argument("founded reachability: edge endpoint out of range");
    if (e.from == e.to || e.to == root) continue;
    // rule: selected(x,y) & reach(x) -> reach(y)
    enc.clause({~e.selected, ~reach[e.from], reach[e.to]});
    Lit s = enc.fresh();
    enc.clause({~s, e.selected});
    enc.clause({~s, reach[e.from]});
    enc.clause({~s, enc.implies_less_than(level[e.from], level[e.to])});
    support[e.to].push_back(s);
  }
  for (int y = 0; y < num_nodes; ++y) {
    if (y == root) continue;
    std::vector<Lit> c{~reach[y]};
    c.insert(c.end(), support[y].begin(), support[y].end());
    enc.clause(c);
  }
  return reach;
}

const char* to_string(MinimizeStatus s) {
  switch (s) {
    case MinimizeStatus::Optimal: return "optimal";
    case MinimizeStatus::Suboptimal: return "suboptimal";
    case MinimizeStatus::NoModel: return "no-model";
    case MinimizeStatus::Unknown: return "unknown";
  }
  return "?";
}

namespace {

int count_true(const Assignment& m, std::span<const Lit> lits) {
  return static_cast<int>(
      std::count_if(lits.begin(), lits.end(), [&](Lit l) { return m.value(l); }));
}

// Lower-bound registers: out[j] is forced true whenever at least j+1 of the
// literals are true. Asserting ~out[m] enforces "at most m".
std::vector<Lit> build_count_registers(Solver& solver, std::span<const Lit> lits,
                                       int width) {
  std::vector<Lit> prev;
  for (std::size_t i = 0; i < lits.size(); ++i) {
    std::vector<Lit> cur;
    for (int j = 0; j < width; ++j) cur.push_back(Lit(solver.new_var()));
    solver.add_clause({~lits[i], cur[0]});
    for (int j = 0; j < width; ++j) {
      if (!prev.empty()) {
        solver.add_clause({~prev[j], cur[j]});
        if (j > 0) solver.add_clause({~lits[i], ~prev[j - 1], cur[j]});
      }
    }
    prev = std::move(cur);
  }
  return prev;
}

}  // namespace

MinimizeResult minimize_cardinality(
    Solver& solver, std::span<const Lit> objective,
    std::optional<std::chrono::steady_clock::time_point> deadline) {
  MinimizeResult result;
  solver.set_deadline(deadline);
  Status st = solver.solve();
  ++result.solver_calls;
  if (st != Status::Sat) {
    result.status =
        st == Status::Unsat ? MinimizeStatus::NoModel : MinimizeStatus::Unknown;
    solver.set_deadline(std::nullopt);
    return result;
  }
  result.model = solver.model();
  result.k = count_true(result.model, objective);
  result.status = MinimizeStatus::Optimal;
  if (result.k == 0) {
    solver.set_deadline(std::nullopt);
    return result;
  }

  std::vector<Lit> registers = build_count_registers(solver, objective, result.k);
  while (result.k > 0) {
    solver.add_clause({~registers[result.k - 1]});
    st = solver.solve();
    ++result.solver_calls;
    if (st == Status::Unsat) break;
    if (st == Status::Unknown) {
      result.status = MinimizeStatus::Suboptimal;
      break;
    }
    result.model = solver.model();
    result.k = count_true(result.model, objective);
  }
  solver.set_deadline(std::nullopt);
  return result;
}

MinimizeResult minimize_cardinality(const CnfFormula& formula,
                                    std::span<const Lit> objective,
                                    const MinimizeOptions& options) {
  Solver solver(SolverOptions{.seed = options.seed});
  solver.add_formula(formula);
  MinimizeResult r = minimize_cardinality(solver, objective, options.deadline);
  if (r.status == MinimizeStatus::Optimal || r.status == MinimizeStatus::Suboptimal) {
    // Trim the counter variables so the model matches the formula.
    std::vector<bool> values(static_cast<std::size_t>(formula.num_vars()) + 1, false);
    for (Var v = 1; v <= formula.num_vars(); ++v) values[v] = r.model.value(v);
    r.model = Assignment(std::move(values));
  }
  return r;
}

}  // namespace satkit
