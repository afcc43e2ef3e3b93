#include "satkit/sat.hpp"

#include <algorithm>
#include <cassert>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace satkit {

Lit Lit::from_dimacs(int value) {
  if (value == 0) throw std::invalid_argument("DIMACS literal 0 is a terminator");
  return Lit(value > 0 ? value : -value, value > 0);
}

std::optional<Clause> normalize_clause(std::span<const Lit> lits) {
  Clause c(lits.begin(), lits.end());
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  for (std::size_t i = 1; i < c.size(); ++i)
    if (c[i].var() == c[i - 1].var()) return std::nullopt;
  return c;
}

bool Assignment::satisfies(std::span<const Lit> clause) const {
  return std::any_of(clause.begin(), clause.end(),
                     [&](Lit l) { return value(l); });
}

void CnfFormula::add_clause(std::span<const Lit> lits) {
  for (Lit l : lits)
    if (l.var() < 1 || l.var() > num_vars_)
      throw std::invalid_argument("clause references unallocated variable " +
                                  std::to_string(l.var()));
  auto c = normalize_clause(lits);
  if (c) clauses_.push_back(std::move(*c));
}

void CnfFormula::reserve_vars(int n) { num_vars_ = std::max(num_vars_, n); }

bool CnfFormula::satisfied_by(const Assignment& a) const {
  return std::all_of(clauses_.begin(), clauses_.end(),
                     [&](const Clause& c) { return a.satisfies(c); });
}

const char* to_string(Status s) {
  switch (s) {
    case Status::Sat: return "SAT";
    case Status::Unsat: return "UNSAT";
    case Status::Unknown: return "UNKNOWN";
  }
  return "?";
}

namespace {

using CRef = std::uint32_t;
constexpr CRef kNoReason = std::numeric_limits<CRef>::max();

// Per-variable truth values: 0 unassigned, 1 true, -1 false.
using Value = std::int8_t;

double luby(double y, int x) {
  int size = 1, seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  double r = 1;
  for (int i = 0; i < seq; ++i) r *= y;
  return r;
}

struct Watcher {
  CRef cref;
  Lit blocker;
};

struct ClauseRec {
  std::vector<Lit> lits;
  double activity = 0;
  int lbd = 0;
  bool learnt = false;
  bool removed = false;
};

// Binary max-heap over variables keyed by activity; ties go to the lower index.
class VarHeap {
 public:
  explicit VarHeap(const std::vector<double>& act) : act_(act) {}

  void grow(int nvars) { pos_.resize(static_cast<std::size_t>(nvars) + 1, -1); }
  bool contains(Var v) const { return pos_[v] >= 0; }
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  Var at(std::size_t i) const { return heap_[i]; }

  void insert(Var v) {
    if (contains(v)) return;
    pos_[v] = static_cast<int>(heap_.size());
    heap_.push_back(v);
    up(pos_[v]);
  }
  void increased(Var v) {
    if (contains(v)) up(pos_[v]);
  }
  Var pop() {
    Var top = heap_.front();
    heap_.front() = heap_.back();
    pos_[heap_.front()] = 0;
    heap_.pop_back();
    pos_[top] = -1;
    if (!heap_.empty()) down(0);
    return top;
  }

 private:
  bool before(Var a, Var b) const {
    return act_[a] > act_[b] || (act_[a] == act_[b] && a < b);
  }
  void up(int i) {
    Var v = heap_[i];
    while (i > 0) {
      int p = (i - 1) / 2;
      if (!before(v, heap_[p])) break;
      heap_[i] = heap_[p];
      pos_[heap_[i]] = i;
      i = p;
    }
    heap_[i] = v;
    pos_[v] = i;
  }
  void down(int i) {
    Var v = heap_[i];
    int n = static_cast<int>(heap_.size());
    for (;;) {
      int c = 2 * i + 1;
      if (c >= n) break;
      if (c + 1 < n && before(heap_[c + 1], heap_[c])) ++c;
      if (!before(heap_[c], v)) break;
      heap_[i] = heap_[c];
      pos_[heap_[i]] = i;
      i = c;
    }
    heap_[i] = v;
    pos_[v] = i;
  }

  const std::vector<double>& act_;
  std::vector<Var> heap_;
  std::vector<int> pos_;
};

}  // namespace

struct Solver::Impl {
  explicit Impl(SolverOptions o) : opt(o), rng(o.seed), order(activity) {
    grow();
  }

  SolverOptions opt;
  SolverStats stats;
  std::mt19937_64 rng;

  int nvars = 0;
  bool ok = true;

  std::vector<Value> assigns{0};
  std::vector<int> level{0};
  std::vector<CRef> reason{kNoReason};
  std::vector<char> phase{0};
  std::vector<char> seen{0};
  std::vector<double> activity{0.0};
  VarHeap order;
  double var_inc = 1.0;
  double cla_inc = 1.0;

  std::vector<Lit> trail;
  std::vector<std::size_t> trail_lim;
  std::size_t qhead = 0;

  std::vector<ClauseRec> db;
  std::vector<CRef> free_slots;
  std::vector<CRef> learnts;
  std::size_t num_original = 0;
  std::vector<std::vector<Watcher>> watches{{}, {}};

  double max_learnts = 0;
  Assignment model;
  std::optional<std::chrono::steady_clock::time_point> deadline;

  // scratch
  std::vector<Lit> learnt_buf;
  std::vector<Lit> analyze_toclear;

  void grow() {
    order.grow(nvars);
    watches.resize(2 * static_cast<std::size_t>(nvars) + 2);
  }

  Var new_var() {
    ++nvars;
    assigns.push_back(0);
    level.push_back(0);
    reason.push_back(kNoReason);
    phase.push_back(0);
    seen.push_back(0);
    activity.push_back(0.0);
    grow();
    order.insert(nvars);
    return nvars;
  }

  Value value(Lit l) const {
    Value v = assigns[l.var()];
    return l.positive() ? v : static_cast<Value>(-v);
  }
  int decision_level() const { return static_cast<int>(trail_lim.size()); }

  void enqueue(Lit l, CRef from) {
    Var v = l.var();
    assigns[v] = l.positive() ? 1 : -1;
    level[v] = decision_level();
    reason[v] = from;
    trail.push_back(l);
  }

  CRef alloc(std::vector<Lit> lits, bool learnt) {
    ClauseRec rec;
    rec.lits = std::move(lits);
    rec.learnt = learnt;
    CRef cr;
    if (!free_slots.empty()) {
      cr = free_slots.back();
      free_slots.pop_back();
      db[cr] = std::move(rec);
    } else {
      cr = static_cast<CRef>(db.size());
      db.push_back(std::move(rec));
    }
    return cr;
  }

  void attach(CRef cr) {
    const auto& c = db[cr].lits;
    watches[c[0].code()].push_back({cr, c[1]});
    watches[c[1].code()].push_back({cr, c[0]});
  }

  void cancel_until(int lvl) {
    if (decision_level() <= lvl) return;
    for (std::size_t i = trail.size(); i-- > trail_lim[lvl];) {
      Var v = trail[i].var();
      phase[v] = assigns[v] > 0 ? 1 : 0;
      assigns[v] = 0;
      reason[v] = kNoReason;
      order.insert(v);
    }
    trail.resize(trail_lim[lvl]);
    trail_lim.resize(lvl);
    qhead = trail.size();
  }

  CRef propagate() {
    CRef confl = kNoReason;
    while (qhead < trail.size()) {
      Lit p = trail[qhead++];
      Lit false_lit = ~p;
      auto& ws = watches[false_lit.code()];
      ++stats.propagations;
      std::size_t i = 0, j = 0;
      const std::size_t n = ws.size();
      while (i < n) {
        Watcher w = ws[i];
        if (value(w.blocker) > 0) {
          ws[j++] = ws[i++];
          continue;
        }
        auto& c = db[w.cref].lits;
        if (c[0] == false_lit) std::swap(c[0], c[1]);
        ++i;
        Lit first = c[0];
        if (first != w.blocker && value(first) > 0) {
          ws[j++] = {w.cref, first};
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < c.size(); ++k) {
          if (value(c[k]) >= 0) {
            std::swap(c[1], c[k]);
            watches[c[1].code()].push_back({w.cref, first});
            moved = true;
            break;
          }
        }
        if (moved) continue;
        ws[j++] = {w.cref, first};
        if (value(first) < 0) {
          confl = w.cref;
          qhead = trail.size();
          while (i < n) ws[j++] = ws[i++];
        } else {
          enqueue(first, w.cref);
        }
      }
      ws.resize(j);
      if (confl != kNoReason) break;
    }
    return confl;
  }

  void bump_var(Var v) {
    if ((activity[v] += var_inc) > 1e100) {
      for (int x = 1; x <= nvars; ++x) activity[x] *= 1e-100;
      var_inc *= 1e-100;
    }
    order.increased(v);
  }

  void bump_clause(ClauseRec& c) {
    if ((c.activity += cla_inc) > 1e20) {
      for (CRef cr : learnts) db[cr].activity *= 1e-20;
      cla_inc *= 1e-20;
    }
  }

  bool redundant(Lit l) const {
    CRef r = reason[l.var()];
    if (r == kNoReason) return false;
    const auto& c = db[r].lits;
    for (std::size_t k = 1; k < c.size(); ++k) {
      Var v = c[k].var();
      if (!seen[v] && level[v] > 0) return false;
    }
    return true;
  }

  // First-UIP conflict analysis. Leaves the asserting literal at index 0 and
  // a literal of the backjump level at index 1.
  int analyze(CRef confl, std::vector<Lit>& out, int& lbd) {
    out.clear();
    out.push_back(Lit());
    int path = 0;
    bool have_p = false;
    Lit p;
    std::size_t index = trail.size();
    do {
      ClauseRec& c = db[confl];
      if (c.learnt) bump_clause(c);
      for (std::size_t k = have_p ? 1 : 0; k < c.lits.size(); ++k) {
        Lit q = c.lits[k];
        Var v = q.var();
        if (!seen[v] && level[v] > 0) {
          bump_var(v);
          seen[v] = 1;
          if (level[v] >= decision_level())
            ++path;
          else
            out.push_back(q);
        }
      }
      while (!seen[trail[--index].var()]) {
      }
      p = trail[index];
      have_p = true;
      confl = reason[p.var()];
      seen[p.var()] = 0;
      --path;
    } while (path > 0);
    out[0] = ~p;

    analyze_toclear.assign(out.begin(), out.end());
    std::size_t keep = 1;
    for (std::size_t k = 1; k < out.size(); ++k)
      if (!redundant(out[k])) out[keep++] = out[k];
    out.resize(keep);
    for (Lit l : analyze_toclear) seen[l.var()] = 0;

    int bt = 0;
    if (out.size() > 1) {
      std::size_t max_i = 1;
      for (std::size_t k = 2; k < out.size(); ++k)
        if (level[out[k].var()] > level[out[max_i].var()]) max_i = k;
      std::swap(out[1], out[max_i]);
      bt = level[out[1].var()];
    }

    std::vector<int> levels;
    levels.reserve(out.size());
    for (Lit l : out) levels.push_back(level[l.var()]);
    std::sort(levels.begin(), levels.end());
    lbd = static_cast<int>(std::unique(levels.begin(), levels.end()) -
                           levels.begin());
    return bt;
  }

  double uniform() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

  std::optional<Lit> pick_branch() {
    Var next = 0;
    if (!order.empty() && uniform() < opt.random_decision_freq) {
      Var v = order.at(static_cast<std::size_t>(rng() % order.size()));
      if (assigns[v] == 0) next = v;
    }
    while (next == 0 || assigns[next] != 0) {
      if (order.empty()) return std::nullopt;
      next = order.pop();
    }
    return Lit(next, phase[next] != 0);
  }

  bool locked(CRef cr) const {
    const auto& c = db[cr].lits;
    return reason[c[0].var()] == cr && value(c[0]) > 0;
  }

  void reduce_db() {
    std::vector<CRef> cand;
    std::vector<CRef> kept;
    for (CRef cr : learnts) {
      if (db[cr].lbd <= 2 || locked(cr))
        kept.push_back(cr);
      else
        cand.push_back(cr);
    }
    std::stable_sort(cand.begin(), cand.end(), [&](CRef a, CRef b) {
      if (db[a].lbd != db[b].lbd) return db[a].lbd > db[b].lbd;
      return db[a].activity < db[b].activity;
    });
    std::size_t drop = cand.size() / 2;
    for (std::size_t k = 0; k < cand.size(); ++k) {
      if (k < drop) {
        db[cand[k]].removed = true;
        db[cand[k]].lits.clear();
        free_slots.push_back(cand[k]);
      } else {
        kept.push_back(cand[k]);
      }
    }
    std::sort(kept.begin(), kept.end());
    learnts = std::move(kept);
    for (auto& ws : watches)
      ws.erase(std::remove_if(ws.begin(), ws.end(),
                              [&](const Watcher& w) { return db[w.cref].removed; }),
               ws.end());
  }

  bool out_of_time() const {
    return deadline && std::chrono::steady_clock::now() >= *deadline;
  }

  // Returns Sat/Unsat, or Unknown for a restart or an expired deadline.
  Status search(int conflict_budget, std::span<const Lit> assumptions,
                bool& timed_out) {
    int conflicts = 0;
    for (;;) {
      CRef confl = propagate();
      if (confl != kNoReason) {
        ++stats.conflicts;
        ++conflicts;
        if (decision_level() == 0) {
          ok = false;
          return Status::Unsat;
        }
        int lbd = 0;
        int bt = analyze(confl, learnt_buf, lbd);
        cancel_until(bt);
        if (learnt_buf.size() == 1) {
          enqueue(learnt_buf[0], kNoReason);
        } else {
          CRef cr = alloc(learnt_buf, true);
          db[cr].lbd = lbd;
          attach(cr);
          learnts.push_back(cr);
          bump_clause(db[cr]);
          enqueue(db[cr].lits[0], cr);
          ++stats.learnt_clauses;
        }
        var_inc /= opt.var_decay;
        cla_inc /= opt.clause_decay;
        if ((stats.conflicts & 255u) == 0 && out_of_time()) {
          timed_out = true;
          return Status::Unknown;
        }
      } else {
        if (conflicts >= conflict_budget) {
          cancel_until(0);
          return Status::Unknown;
        }
        if (static_cast<double>(learnts.size()) >= max_learnts) reduce_db();

        std::optional<Lit> next;
        while (decision_level() < static_cast<int>(assumptions.size())) {
          Lit a = assumptions[decision_level()];
          if (value(a) > 0) {
            trail_lim.push_back(trail.size());
          } else if (value(a) < 0) {
            return Status::Unsat;
          } else {
            next = a;
            break;
          }
        }
        if (!next) {
          next = pick_branch();
          if (!next) return Status::Sat;
          ++stats.decisions;
        }
        trail_lim.push_back(trail.size());
        enqueue(*next, kNoReason);
      }
    }
  }

  Status solve(std::span<const Lit> assumptions) {
    for (Lit a : assumptions)
      if (a.var() < 1 || a.var() > nvars)
        throw std::invalid_argument("assumption references unallocated variable " +
                                    std::to_string(a.var()));
    if (!ok) return Status::Unsat;
    if (out_of_time()) return Status::Unknown;
    max_learnts = std::max(static_cast<double>(num_original) / 3.0, 2000.0);
    Status status = Status::Unknown;
    bool timed_out = false;
    for (int round = 0; status == Status::Unknown; ++round) {
      int budget = static_cast<int>(luby(2.0, round) * opt.restart_base);
      status = search(budget, assumptions, timed_out);
      if (status == Status::Unknown) {
        ++stats.restarts;
        max_learnts *= 1.05;
        if (timed_out || out_of_time()) break;
      }
    }
    if (status == Status::Sat) {
      std::vector<bool> values(static_cast<std::size_t>(nvars) + 1, false);
      for (int v = 1; v <= nvars; ++v) values[v] = assigns[v] > 0;
      model = Assignment(std::move(values));
    }
    cancel_until(0);
    return status;
  }

  void add_clause(std::span<const Lit> lits) {
    for (Lit l : lits)
      if (l.var() < 1 || l.var() > nvars)
        throw std::invalid_argument("clause references unallocated variable " +
                                    std::to_string(l.var()));
    if (!ok) return;
    auto norm = normalize_clause(lits);
    if (!norm) return;
    std::vector<Lit> c;
    c.reserve(norm->size());
    for (Lit l : *norm) {
      Value v = value(l);
      if (v > 0) return;
      if (v == 0) c.push_back(l);
    }
    if (c.empty()) {
      ok = false;
    } else if (c.size() == 1) {
      enqueue(c[0], kNoReason);
      ok = propagate() == kNoReason;
    } else {
      CRef cr = alloc(std::move(c), false);
      attach(cr);
      ++num_original;
    }
  }
};

Solver::Solver(SolverOptions options) : impl_(std::make_unique<Impl>(options)) {}
Solver::Solver(Solver&&) noexcept = default;
Solver& Solver::operator=(Solver&&) noexcept = default;
Solver::~Solver() = default;

Var Solver::new_var() { return impl_->new_var(); }
int Solver::num_vars() const { return impl_->nvars; }
void Solver::add_clause(std::span<const Lit> lits) { impl_->add_clause(lits); }

void Solver::add_formula(const CnfFormula& formula) {
  while (impl_->nvars < formula.num_vars()) impl_->new_var();
  for (const auto& c : formula.clauses()) impl_->add_clause(c);
}

Status Solver::solve(std::span<const Lit> assumptions) {
  return impl_->solve(assumptions);
}

const Assignment& Solver::model() const { return impl_->model; }
bool Solver::okay() const { return impl_->ok; }
void Solver::set_deadline(std::optional<std::chrono::steady_clock::time_point> t) {
  impl_->deadline = t;
}
const SolverStats& Solver::stats() const { return impl_->stats; }

}  // namespace satkit
