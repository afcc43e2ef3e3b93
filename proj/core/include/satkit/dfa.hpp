// Smallest DFA consistent with labeled example strings, as a coloring of the
// augmented prefix tree acceptor (APTA).
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "satkit/encode.hpp"

namespace satkit {

using Word = std::vector<int>;

struct Sample {
  int alphabet_size = 0;
  std::vector<Word> positives;
  std::vector<Word> negatives;
  /// Pre-assigned colors for the APTA states of these prefixes. When
  /// non-empty they replace the greedy clique.
  std::vector<std::pair<Word, int>> precolored;

  /// Throws InputError on symbols outside the alphabet or a string that is
  /// both positive and negative.
  void validate() const;
};

/// Builds a sample over the first `alphabet.size()` symbols, mapping each
/// character of the strings to its position in `alphabet`.
Sample sample_from_strings(const std::string& alphabet, const std::vector<std::string>& positives,
                           const std::vector<std::string>& negatives);

/// Abbadingo text: optional `@color <color> <len> <symbols...>` lines, then a
/// header `<strings> <alphabet size>`, then one `<label> <len> <symbols...>`
/// line per string with label 1 (positive) or 0 (negative). Blank lines and
/// lines starting with '#' are ignored.
Sample read_abbadingo(std::istream& in, const std::string& source = "<sample>");
void write_abbadingo(std::ostream& out, const Sample& s);

/// Prefix tree; states are numbered in breadth-first order with children in
/// symbol order, so state 0 is the empty prefix.
struct Apta {
  int alphabet_size = 0;
  /// trans[q][a]: child of q on symbol a, or -1.
  std::vector<std::vector<int>> trans;
  std::vector<char> accepting;
  std::vector<char> rejecting;
  std::vector<Word> prefix;

  int size() const { return static_cast<int>(trans.size()); }
  /// State reached by a word, or -1.
  int find(const Word& w) const;
};

Apta build_apta(const Sample& s);

/// conflict[p][q]: p and q cannot share a color.
struct ConflictGraph {
  std::vector<std::vector<char>> conflict;

  bool operator()(int p, int q) const { return conflict[p][q] != 0; }
  std::vector<std::pair<int, int>> pairs() const;
};

/// Accepting/rejecting pairs, closed under predecessors on equal symbols.
ConflictGraph compute_conflicts(const Apta& a);

/// Scans states in order and keeps each one that conflicts with all kept.
std::vector<int> greedy_clique(const ConflictGraph& cg, const Apta& a);

enum class DfaObjective { States, Transitions };

struct ColoringEncoding {
  CnfFormula cnf;
  SymbolTable symbols;
  /// color[q][c]: APTA state q gets color c.
  std::vector<std::vector<Lit>> color;
  /// accept[c]: color c is accepting.
  std::vector<Lit> accept;
  /// trans[c][a][d]: color c moves to color d on symbol a.
  std::vector<std::vector<std::vector<Lit>>> trans;
};

/// `fixed` pins states to colors. Throws std::invalid_argument when a fixed
/// color is not below k.
ColoringEncoding encode_coloring(const Apta& a, int k,
                                 const std::vector<std::pair<int, int>>& fixed, bool redundant);

/// Possibly partial automaton; trans[q][a] == -1 marks a missing transition.
struct Dfa {
  int alphabet_size = 0;
  int start = 0;
  std::vector<std::vector<int>> trans;
  std::vector<char> accepting;

  int size() const { return static_cast<int>(trans.size()); }
  int transition_count() const;
  bool total() const;
};

/// Adds one fresh rejecting sink with self-loops and routes every missing
/// transition to it; returns total automata unchanged.
Dfa complete_dfa(const Dfa& d);

/// Throws std::invalid_argument for symbols outside the alphabet and
/// std::logic_error on a missing transition.
bool run_dfa(const Dfa& d, const Word& w);

bool consistent_with(const Dfa& d, const Sample& s);

struct DfaOptions {
  bool redundant = false;
  DfaObjective objective = DfaObjective::States;
  std::uint64_t seed = 0;
};

struct DfaResult {
  /// Partial automaton over the used colors; only transitions induced by the
  /// sample are present.
  Dfa dfa;
  int colors = 0;
  /// Color of every APTA state.
  std::vector<int> coloring;
  std::vector<int> clique;
  int solver_calls = 0;
  int vars = 0;
  std::size_t clauses = 0;
};

/// Tries k = max(1, |clique|), k+1, ... until a coloring exists. Under the
/// transitions objective, the number of transitions is then minimized at
/// that k.
DfaResult find_min_dfa(const Sample& s, const DfaOptions& options = {});

/// Exhaustive search over automata with up to k_max states, building
/// transitions only where the sample needs them. Throws std::runtime_error
/// when no automaton with at most k_max states exists.
int brute_force_min_dfa(const Sample& s, int k_max = 4);

/// Fewest transitions used by the sample over automata with at most k states;
/// -1 when none exists.
int brute_force_min_transitions(const Sample& s, int k);

void write_dfa_dot(std::ostream& out, const Dfa& d);

}  // namespace satkit
