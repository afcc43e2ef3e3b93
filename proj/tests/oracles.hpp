// Independent reference procedures used by the test suites. Nothing in here
// calls into the SAT solver or the encoders.
#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "satkit/random.hpp"

namespace satkit::oracle {

/// Clauses as signed DIMACS integers.
using IntClause = std::vector<int>;
using IntCnf = std::vector<IntClause>;

inline bool eval_clause(const IntClause& c, const std::vector<int>& value) {
  for (int l : c) {
    int v = value[static_cast<std::size_t>(l > 0 ? l : -l)];
    if (v != 0 && (v > 0) == (l > 0)) return true;
  }
  return false;
}

/// Plain recursive DPLL with unit propagation; value[v] in {-1,0,1}.
inline bool dpll(const IntCnf& cnf, std::vector<int>& value) {
  for (;;) {
    bool changed = false;
    for (const auto& c : cnf) {
      int unassigned = 0, last = 0;
      bool sat = false;
      for (int l : c) {
        int v = value[static_cast<std::size_t>(l > 0 ? l : -l)];
        if (v == 0) {
          ++unassigned;
          last = l;
        } else if ((v > 0) == (l > 0)) {
          sat = true;
          break;
        }
      }
      if (sat) continue;
      if (unassigned == 0) return false;
      if (unassigned == 1) {
        value[static_cast<std::size_t>(last > 0 ? last : -last)] = last > 0 ? 1 : -1;
        changed = true;
      }
    }
    if (!changed) break;
  }
  std::size_t branch = 0;
  for (std::size_t v = 1; v < value.size(); ++v)
    if (value[v] == 0) {
      branch = v;
      break;
    }
  if (branch == 0) return true;
  for (int polarity : {1, -1}) {
    std::vector<int> copy = value;
    copy[branch] = polarity;
    if (dpll(cnf, copy)) {
      value = std::move(copy);
      return true;
    }
  }
  return false;
}

inline bool satisfiable(const IntCnf& cnf, int num_vars) {
  std::vector<int> value(static_cast<std::size_t>(num_vars) + 1, 0);
  return dpll(cnf, value);
}

/// Exhaustive truth table, for tiny formulas.
inline bool truth_table_sat(const IntCnf& cnf, int num_vars) {
  std::vector<int> value(static_cast<std::size_t>(num_vars) + 1, 0);
  for (std::uint64_t bits = 0; bits < (1ull << num_vars); ++bits) {
    for (int v = 1; v <= num_vars; ++v) value[v] = (bits >> (v - 1)) & 1u ? 1 : -1;
    if (std::all_of(cnf.begin(), cnf.end(),
                    [&](const IntClause& c) { return eval_clause(c, value); }))
      return true;
  }
  return false;
}

inline IntCnf random_kcnf(Rng& rng, int num_vars, int num_clauses, int k) {
  IntCnf cnf;
  for (int i = 0; i < num_clauses; ++i) {
    IntClause c;
    for (int j = 0; j < k; ++j) {
      int v = rng.range(1, num_vars);
      c.push_back(rng.chance(0.5) ? v : -v);
    }
    cnf.push_back(std::move(c));
  }
  return cnf;
}

/// Calls f(bits) for every assignment of n booleans.
inline void for_each_assignment(int n, const std::function<void(std::uint32_t)>& f) {
  for (std::uint32_t bits = 0; bits < (1u << n); ++bits) f(bits);
}

/// Random connected single-rooted DAG on n nodes: node 0 is the root, every
/// other node gets one parent with a smaller index plus extra ones with
/// probability `extra`. Edges are (parent, child).
inline std::vector<std::pair<int, int>> random_crdag(Rng& rng, int n, double extra) {
  std::vector<std::pair<int, int>> edges;
  for (int x = 1; x < n; ++x) {
    int first = rng.range(0, x - 1);
    edges.emplace_back(first, x);
    for (int p = 0; p < x; ++p)
      if (p != first && rng.chance(extra)) edges.emplace_back(p, x);
  }
  return edges;
}

/// mono[z][x]: a path from z to x (z itself included) stays within one color.
inline std::vector<std::vector<bool>> monochrome_reach(int n,
                                                       const std::vector<std::pair<int, int>>& edges,
                                                       const std::vector<int>& color) {
  std::vector<std::vector<bool>> m(static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n)));
  for (int x = 0; x < n; ++x) m[x][x] = true;
  for (const auto& [u, v] : edges)
    if (color[u] == color[v]) m[u][v] = true;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (m[i][k] && m[k][j]) m[i][j] = true;
  return m;
}

/// The color-connected definition, checked pair by pair.
inline bool color_connected(int n, const std::vector<std::pair<int, int>>& edges,
                            const std::vector<int>& color) {
  auto m = monochrome_reach(n, edges, color);
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y) {
      if (color[x] != color[y]) continue;
      bool ok = false;
      for (int z = 0; z < n && !ok; ++z) ok = m[z][x] && m[z][y];
      if (!ok) return false;
    }
  return true;
}

/// Number of nodes without a parent of their own color.
inline int count_sources(int n, const std::vector<std::pair<int, int>>& edges,
                         const std::vector<int>& color) {
  std::vector<bool> has(static_cast<std::size_t>(n), false);
  for (const auto& [u, v] : edges)
    if (color[u] == color[v]) has[v] = true;
  return static_cast<int>(std::count(has.begin(), has.end(), false));
}

/// Calls f(color) for every total coloring with k colors extending `partial`
/// (-1 = free).
inline void for_each_completion(const std::vector<int>& partial, int k,
                                const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> color = partial;
  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < color.size(); ++i)
    if (color[i] < 0) free.push_back(i);
  for (auto i : free) color[i] = 0;
  for (;;) {
    f(color);
    std::size_t j = 0;
    while (j < free.size() && ++color[free[j]] == k) color[free[j++]] = 0;
    if (j == free.size()) return;
  }
}

/// Pairs joined by a path of length >= 2, via boolean matrix powers.
inline std::vector<std::pair<int, int>> paths_of_length_two_or_more(
    int n, const std::vector<std::pair<int, int>>& edges) {
  using M = std::vector<std::vector<bool>>;
  M a(static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n)));
  for (const auto& [u, v] : edges) a[u][v] = true;
  auto mul = [n](const M& x, const M& y) {
    M r(static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        if (x[i][k])
          for (int j = 0; j < n; ++j)
            if (y[k][j]) r[i][j] = true;
    return r;
  };
  M power = mul(a, a), acc(static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n)));
  for (int len = 2; len <= n; ++len) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (power[i][j]) acc[i][j] = true;
    power = mul(power, a);
  }
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (acc[i][j]) out.emplace_back(i, j);
  return out;
}

/// Enumerates every total transition table with k states over `sigma`
/// symbols, start state 0. For each table whose runs never end an accepted
/// and a rejected string in the same state, calls f(states used by the runs).
template <class F>
void for_each_consistent_table(int k, int sigma, const std::vector<std::vector<int>>& positives,
                               const std::vector<std::vector<int>>& negatives, F&& f) {
  const int cells = k * sigma;
  std::vector<int> table(static_cast<std::size_t>(cells), 0);
  while (true) {
    std::vector<int> end_label(static_cast<std::size_t>(k), -1);
    std::set<std::pair<int, int>> used;
    bool ok = true;
    auto run = [&](const std::vector<int>& w, int label) {
      int q = 0;
      for (int a : w) {
        used.emplace(q, a);
        q = table[static_cast<std::size_t>(q * sigma + a)];
      }
      if (end_label[q] >= 0 && end_label[q] != label) ok = false;
      end_label[q] = label;
    };
    for (const auto& w : positives) run(w, 1);
    for (const auto& w : negatives) run(w, 0);
    if (ok) f(static_cast<int>(used.size()));
    int i = 0;
    while (i < cells && ++table[static_cast<std::size_t>(i)] == k) table[static_cast<std::size_t>(i++)] = 0;
    if (i == cells) return;
  }
}

/// Fewest states of a total automaton consistent with the sample, or -1 above k_max.
inline int min_dfa_states(int sigma, const std::vector<std::vector<int>>& positives,
                          const std::vector<std::vector<int>>& negatives, int k_max) {
  for (int k = 1; k <= k_max; ++k) {
    bool found = false;
    for_each_consistent_table(k, sigma, positives, negatives, [&](int) { found = true; });
    if (found) return k;
  }
  return -1;
}

/// Fewest transitions exercised by the sample over consistent automata with k states.
inline int min_used_transitions(int sigma, const std::vector<std::vector<int>>& positives,
                                const std::vector<std::vector<int>>& negatives, int k) {
  int best = -1;
  for_each_consistent_table(k, sigma, positives, negatives, [&](int used) {
    if (best < 0 || used < best) best = used;
  });
  return best;
}

}  // namespace satkit::oracle
