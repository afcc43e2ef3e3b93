#include "satkit/dfa.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "satkit/error.hpp"

namespace satkit {

void Sample::validate() const {
  if (alphabet_size < 0) throw InputError("negative alphabet size");
  auto check = [&](const Word& w) {
    for (int a : w)
      if (a < 0 || a >= alphabet_size)
        throw InputError("symbol " + std::to_string(a) + " outside the alphabet 0.." +
                         std::to_string(alphabet_size - 1));
  };
  for (const auto& w : positives) check(w);
  for (const auto& w : negatives) check(w);
  for (const auto& [w, c] : precolored) {
    check(w);
    if (c < 0) throw InputError("negative pre-assigned color");
  }
  std::set<Word> pos(positives.begin(), positives.end());
  for (const auto& w : negatives)
    if (pos.count(w)) {
      std::string text;
      for (int a : w) text += (text.empty() ? "" : " ") + std::to_string(a);
      throw InputError("string [" + text + "] is both positive and negative");
    }
}

Sample sample_from_strings(const std::string& alphabet, const std::vector<std::string>& positives,
                           const std::vector<std::string>& negatives) {
  Sample s;
  s.alphabet_size = static_cast<int>(alphabet.size());
  auto word = [&](const std::string& text) {
    Word w;
    for (char ch : text) {
      auto pos = alphabet.find(ch);
      if (pos == std::string::npos)
        throw std::invalid_argument(std::string("character '") + ch + "' not in the alphabet");
      w.push_back(static_cast<int>(pos));
    }
    return w;
  };
  for (const auto& p : positives) s.positives.push_back(word(p));
  for (const auto& n : negatives) s.negatives.push_back(word(n));
  return s;
}

Sample read_abbadingo(std::istream& in, const std::string& source) {
  Sample s;
  std::string line;
  int lineno = 0;
  long expected = -1;
  auto read_word = [&](std::istringstream& ls, long len) {
    if (len < 0) throw InputError(source, lineno, "negative string length");
    Word w;
    for (long i = 0; i < len; ++i) {
      long a;
      if (!(ls >> a)) throw InputError(source, lineno, "fewer symbols than the stated length");
      if (s.alphabet_size >= 0 && expected >= 0 && (a < 0 || a >= s.alphabet_size))
        throw InputError(source, lineno, "symbol " + std::to_string(a) + " outside the alphabet");
      w.push_back(static_cast<int>(a));
    }
    std::string extra;
    if (ls >> extra) throw InputError(source, lineno, "more symbols than the stated length");
    return w;
  };
  std::vector<std::pair<int, std::pair<Word, int>>> pending_colors;
  long seen = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    if (line.compare(first, 6, "@color") == 0) {
      if (expected >= 0) throw InputError(source, lineno, "@color lines must precede the header");
      std::string tag;
      long color, len;
      ls >> tag;
      if (!(ls >> color >> len)) throw InputError(source, lineno, "expected '@color <color> <len> <symbols...>'");
      if (color < 0) throw InputError(source, lineno, "negative color");
      pending_colors.push_back({lineno, {read_word(ls, len), static_cast<int>(color)}});
      continue;
    }
    if (expected < 0) {
      long n, a;
      std::string extra;
      if (!(ls >> n >> a) || (ls >> extra) || n < 0 || a < 0)
        throw InputError(source, lineno, "expected header '<strings> <alphabet size>'");
      expected = n;
      s.alphabet_size = static_cast<int>(a);
      for (const auto& [at, pc] : pending_colors)
        for (int sym : pc.first)
          if (sym < 0 || sym >= s.alphabet_size)
            throw InputError(source, at, "symbol " + std::to_string(sym) + " outside the alphabet");
      for (auto& [at, pc] : pending_colors) s.precolored.push_back(std::move(pc));
      continue;
    }
    long label, len;
    if (!(ls >> label >> len)) throw InputError(source, lineno, "expected '<label> <len> <symbols...>'");
    if (label != 0 && label != 1) throw InputError(source, lineno, "label must be 0 or 1");
    if (seen == expected) throw InputError(source, lineno, "more strings than the header states");
    Word w = read_word(ls, len);
    (label == 1 ? s.positives : s.negatives).push_back(std::move(w));
    ++seen;
  }
  if (expected < 0) throw InputError(source, lineno, "missing header");
  if (seen != expected)
    throw InputError(source, lineno, "header states " + std::to_string(expected) + " strings, found " +
                                         std::to_string(seen));
  try {
    s.validate();
  } catch (const InputError& e) {
    throw InputError(source, 0, e.what());
  }
  return s;
}

void write_abbadingo(std::ostream& out, const Sample& s) {
  auto word = [&](const Word& w) {
    out << w.size();
    for (int a : w) out << ' ' << a;
    out << '\n';
  };
  for (const auto& [w, c] : s.precolored) {
    out << "@color " << c << ' ';
    word(w);
  }
  out << s.positives.size() + s.negatives.size() << ' ' << s.alphabet_size << '\n';
  for (const auto& w : s.positives) {
    out << "1 ";
    word(w);
  }
  for (const auto& w : s.negatives) {
    out << "0 ";
    word(w);
  }
}

int Apta::find(const Word& w) const {
  int q = 0;
  for (int a : w) {
    if (a < 0 || a >= alphabet_size || q < 0) return -1;
    q = trans[q][a];
  }
  return q;
}

Apta build_apta(const Sample& s) {
  s.validate();
  // Trie in insertion order, renumbered breadth-first afterwards.
  std::vector<std::vector<int>> child{std::vector<int>(static_cast<std::size_t>(s.alphabet_size), -1)};
  std::vector<char> acc{0}, rej{0};
  auto insert = [&](const Word& w) {
    int q = 0;
    for (int a : w) {
      if (child[q][a] < 0) {
        child[q][a] = static_cast<int>(child.size());
        child.emplace_back(static_cast<std::size_t>(s.alphabet_size), -1);
        acc.push_back(0);
        rej.push_back(0);
      }
      q = child[q][a];
    }
    return q;
  };
  for (const auto& w : s.positives) acc[insert(w)] = 1;
  for (const auto& w : s.negatives) rej[insert(w)] = 1;

  Apta out;
  out.alphabet_size = s.alphabet_size;
  std::vector<int> order{0}, number(child.size(), -1);
  number[0] = 0;
  std::vector<Word> prefix{{}};
  for (std::size_t i = 0; i < order.size(); ++i)
    for (int a = 0; a < s.alphabet_size; ++a)
      if (int c = child[order[i]][a]; c >= 0) {
        number[c] = static_cast<int>(order.size());
        order.push_back(c);
        Word p = prefix[i];
        p.push_back(a);
        prefix.push_back(std::move(p));
      }
  for (int old : order) {
    std::vector<int> row(static_cast<std::size_t>(s.alphabet_size), -1);
    for (int a = 0; a < s.alphabet_size; ++a)
      if (child[old][a] >= 0) row[a] = number[child[old][a]];
    out.trans.push_back(std::move(row));
    out.accepting.push_back(acc[old]);
    out.rejecting.push_back(rej[old]);
  }
  out.prefix = std::move(prefix);
  for (const auto& [w, c] : s.precolored)
    if (out.find(w) < 0) throw InputError("pre-assigned prefix is not a prefix of any sample string");
  return out;
}

std::vector<std::pair<int, int>> ConflictGraph::pairs() const {
  std::vector<std::pair<int, int>> out;
  for (std::size_t p = 0; p < conflict.size(); ++p)
    for (std::size_t q = p + 1; q < conflict.size(); ++q)
      if (conflict[p][q]) out.emplace_back(static_cast<int>(p), static_cast<int>(q));
  return out;
}

ConflictGraph compute_conflicts(const Apta& a) {
  const int n = a.size();
  std::vector<int> parent(static_cast<std::size_t>(n), -1), via(static_cast<std::size_t>(n), -1);
  for (int q = 0; q < n; ++q)
    for (int s = 0; s < a.alphabet_size; ++s)
      if (int c = a.trans[q][s]; c >= 0) {
        parent[c] = q;
        via[c] = s;
      }
  ConflictGraph cg;
  cg.conflict.assign(static_cast<std::size_t>(n), std::vector<char>(static_cast<std::size_t>(n), 0));
  std::deque<std::pair<int, int>> todo;
  auto mark = [&](int p, int q) {
    if (p == q || cg.conflict[p][q]) return;
    cg.conflict[p][q] = cg.conflict[q][p] = 1;
    todo.emplace_back(p, q);
  };
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      if (a.accepting[p] && a.rejecting[q]) mark(p, q);
  while (!todo.empty()) {
    auto [p, q] = todo.front();
    todo.pop_front();
    if (parent[p] >= 0 && parent[q] >= 0 && via[p] == via[q]) mark(parent[p], parent[q]);
  }
  return cg;
}

std::vector<int> greedy_clique(const ConflictGraph& cg, const Apta& a) {
  std::vector<int> clique;
  for (int q = 0; q < a.size(); ++q)
    if (std::all_of(clique.begin(), clique.end(), [&](int p) { return cg(p, q); })) {
      bool any = false;
      for (int r = 0; r < a.size() && !any; ++r) any = cg(q, r);
      if (any || !clique.empty()) clique.push_back(q);
    }
  if (clique.size() == 1) clique.clear();
  return clique;
}

ColoringEncoding encode_coloring(const Apta& a, int k, const std::vector<std::pair<int, int>>& fixed,
                                 bool redundant) {
  if (k < 1) throw std::invalid_argument("need at least one color");
  for (const auto& [q, c] : fixed)
    if (c >= k) throw std::invalid_argument("pre-assigned color not below the color count");
  ColoringEncoding out;
  Encoder enc(out.cnf);
  const int n = a.size(), sigma = a.alphabet_size;
  auto str = [](int i) { return std::to_string(i); };

  for (int q = 0; q < n; ++q) {
    auto& row = out.color.emplace_back();
    for (int c = 0; c < k; ++c) row.push_back(enc.atom("colorOf", {str(q), str(c)}));
    enc.exactly(row, 1);
  }
  for (int c = 0; c < k; ++c) out.accept.push_back(enc.atom("accColor", {str(c)}));
  out.trans.assign(static_cast<std::size_t>(k), {});
  for (int c = 0; c < k; ++c)
    for (int s = 0; s < sigma; ++s) {
      auto& targets = out.trans[c].emplace_back();
      for (int d = 0; d < k; ++d) targets.push_back(enc.atom("colorTrans", {str(c), str(s), str(d)}));
      enc.at_most(targets, 1);
    }
  for (const auto& [q, c] : fixed) enc.clause({out.color[q][c]});

  for (int q = 0; q < n; ++q)
    for (int c = 0; c < k; ++c) {
      if (a.accepting[q]) enc.clause({~out.color[q][c], out.accept[c]});
      if (a.rejecting[q]) enc.clause({~out.color[q][c], ~out.accept[c]});
    }
  // trans(x,l) = z: colorOf(x) = i & colorOf(z) = j => colorTrans(i,l) = j.
  for (int x = 0; x < n; ++x)
    for (int s = 0; s < sigma; ++s) {
      const int z = a.trans[x][s];
      if (z < 0) continue;
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
          enc.clause({~out.color[x][i], ~out.color[z][j], out.trans[i][s][j]});
          if (redundant) enc.clause({~out.trans[i][s][j], ~out.color[x][i], out.color[z][j]});
        }
    }
  out.symbols = enc.symbols();
  return out;
}

int Dfa::transition_count() const {
  int count = 0;
  for (const auto& row : trans) count += static_cast<int>(std::count_if(row.begin(), row.end(), [](int t) { return t >= 0; }));
  return count;
}

bool Dfa::total() const {
  return std::all_of(trans.begin(), trans.end(), [](const std::vector<int>& row) {
    return std::all_of(row.begin(), row.end(), [](int t) { return t >= 0; });
  });
}

Dfa complete_dfa(const Dfa& d) {
  if (d.total()) return d;
  Dfa out = d;
  const int sink = out.size();
  out.trans.emplace_back(static_cast<std::size_t>(d.alphabet_size), sink);
  out.accepting.push_back(0);
  for (auto& row : out.trans)
    for (int& t : row)
      if (t < 0) t = sink;
  return out;
}

bool run_dfa(const Dfa& d, const Word& w) {
  int q = d.start;
  for (int a : w) {
    if (a < 0 || a >= d.alphabet_size)
      throw std::invalid_argument("symbol " + std::to_string(a) + " outside the alphabet");
    q = d.trans[q][a];
    if (q < 0) throw std::logic_error("automaton has no transition for a symbol");
  }
  return d.accepting[q] != 0;
}

bool consistent_with(const Dfa& d, const Sample& s) {
  const Dfa total = complete_dfa(d);
  return std::all_of(s.positives.begin(), s.positives.end(), [&](const Word& w) { return run_dfa(total, w); }) &&
         std::none_of(s.negatives.begin(), s.negatives.end(), [&](const Word& w) { return run_dfa(total, w); });
}

DfaResult find_min_dfa(const Sample& s, const DfaOptions& options) {
  const Apta a = build_apta(s);
  DfaResult out;
  std::vector<std::pair<int, int>> fixed;
  int k = 1;
  if (!s.precolored.empty()) {
    for (const auto& [w, c] : s.precolored) {
      fixed.emplace_back(a.find(w), c);
      k = std::max(k, c + 1);
    }
  } else {
    out.clique = greedy_clique(compute_conflicts(a), a);
    for (std::size_t i = 0; i < out.clique.size(); ++i) fixed.emplace_back(out.clique[i], static_cast<int>(i));
    k = std::max(k, static_cast<int>(out.clique.size()));
  }

  const int k_limit = std::max(k, a.size());
  for (;; ++k) {
    if (k > k_limit) throw InputError("pre-assigned colors admit no consistent automaton");
    ColoringEncoding e = encode_coloring(a, k, fixed, options.redundant);
    Solver solver(SolverOptions{.seed = options.seed});
    solver.add_formula(e.cnf);
    ++out.solver_calls;
    out.vars = e.cnf.num_vars();
    out.clauses = e.cnf.num_clauses();
    Assignment model;
    if (options.objective == DfaObjective::Transitions) {
      std::vector<Lit> objective;
      for (const auto& per_color : e.trans)
        for (const auto& targets : per_color) objective.insert(objective.end(), targets.begin(), targets.end());
      MinimizeResult r = minimize_cardinality(solver, objective);
      out.solver_calls += r.solver_calls - 1;
      if (r.status == MinimizeStatus::NoModel) continue;
      model = std::move(r.model);
    } else {
      if (solver.solve() != Status::Sat) continue;
      model = solver.model();
    }

    // Renumber the used colors in order of first use.
    std::vector<int> raw(static_cast<std::size_t>(a.size()));
    for (int q = 0; q < a.size(); ++q)
      for (int c = 0; c < k; ++c)
        if (model.value(e.color[q][c])) raw[q] = c;
    std::vector<int> number(static_cast<std::size_t>(k), -1), original;
    for (int q = 0; q < a.size(); ++q)
      if (number[raw[q]] < 0) {
        number[raw[q]] = static_cast<int>(original.size());
        original.push_back(raw[q]);
      }
    out.colors = k;
    Dfa& d = out.dfa;
    d.alphabet_size = a.alphabet_size;
    d.start = 0;
    d.trans.assign(original.size(), std::vector<int>(static_cast<std::size_t>(a.alphabet_size), -1));
    for (int c : original) d.accepting.push_back(model.value(e.accept[c]) ? 1 : 0);
    for (int q = 0; q < a.size(); ++q) {
      out.coloring.push_back(number[raw[q]]);
      for (int sym = 0; sym < a.alphabet_size; ++sym)
        if (int z = a.trans[q][sym]; z >= 0) d.trans[number[raw[q]]][sym] = number[raw[z]];
    }
    if (!consistent_with(d, s)) throw std::logic_error("learned automaton contradicts the sample");
    return out;
  }
}

namespace {

/// Depth-first search over partial automata with at most k states whose
/// transitions are created only when a sample string needs them. Calls
/// `found` with each consistent automaton's transition count; the search
/// stops when `found` returns true.
class LazyDfaSearch {
 public:
  LazyDfaSearch(const Sample& s, int k) : s_(s), k_(k) {
    for (const auto& w : s.positives) words_.emplace_back(&w, 1);
    for (const auto& w : s.negatives) words_.emplace_back(&w, 0);
    trans_.assign(static_cast<std::size_t>(k), std::vector<int>(static_cast<std::size_t>(s.alphabet_size), -1));
  }

  template <class F>
  void run(F&& found) {
    used_ = 1;
    defined_ = 0;
    stop_ = false;
    search(found);
  }

 private:
  template <class F>
  void search(F& found) {
    if (stop_) return;
    std::vector<int> label(static_cast<std::size_t>(k_), -1);
    int open_q = -1, open_a = -1;
    for (const auto& [w, lab] : words_) {
      int q = 0;
      bool complete = true;
      for (int a : *w) {
        if (trans_[q][a] < 0) {
          if (open_q < 0) {
            open_q = q;
            open_a = a;
          }
          complete = false;
          break;
        }
        q = trans_[q][a];
      }
      if (!complete) continue;
      if (label[q] >= 0 && label[q] != lab) return;
      label[q] = lab;
    }
    if (open_q < 0) {
      stop_ = found(defined_);
      return;
    }
    const int limit = std::min(used_ + 1, k_);
    for (int t = 0; t < limit && !stop_; ++t) {
      const bool fresh = t == used_;
      trans_[open_q][open_a] = t;
      ++defined_;
      if (fresh) ++used_;
      search(found);
      if (fresh) --used_;
      --defined_;
      trans_[open_q][open_a] = -1;
    }
  }

  const Sample& s_;
  int k_;
  std::vector<std::pair<const Word*, int>> words_;
  std::vector<std::vector<int>> trans_;
  int used_ = 1, defined_ = 0;
  bool stop_ = false;
};

}  // namespace

int brute_force_min_dfa(const Sample& s, int k_max) {
  s.validate();
  for (int k = 1; k <= k_max; ++k) {
    bool exists = false;
    LazyDfaSearch(s, k).run([&](int) { return exists = true; });
    if (exists) return k;
  }
  throw std::runtime_error("no consistent automaton with at most " + std::to_string(k_max) + " states");
}

int brute_force_min_transitions(const Sample& s, int k) {
  s.validate();
  int best = -1;
  LazyDfaSearch(s, k).run([&](int count) {
    if (best < 0 || count < best) best = count;
    return false;
  });
  return best;
}

void write_dfa_dot(std::ostream& out, const Dfa& d) {
  out << "digraph dfa {\n  rankdir=LR;\n  start [shape=point];\n  start -> q" << d.start << ";\n";
  for (int q = 0; q < d.size(); ++q)
    out << "  q" << q << " [shape=" << (d.accepting[q] ? "doublecircle" : "circle") << "];\n";
  for (int q = 0; q < d.size(); ++q)
    for (int a = 0; a < d.alphabet_size; ++a)
      if (d.trans[q][a] >= 0) out << "  q" << q << " -> q" << d.trans[q][a] << " [label=\"" << a << "\"];\n";
  out << "}\n";
}

}  // namespace satkit
