#include <gtest/gtest.h>

#include <chrono>
#include <sstream>

#include "oracles.hpp"
#include "satkit/dimacs.hpp"
#include "satkit/error.hpp"
#include "satkit/sat.hpp"

using namespace satkit;

namespace {

Lit P(Var v) { return Lit(v, true); }
Lit N(Var v) { return Lit(v, false); }

void load(Solver& s, const oracle::IntCnf& cnf, int num_vars) {
  while (s.num_vars() < num_vars) s.new_var();
  for (const auto& c : cnf) {
    Clause cl;
    for (int l : c) cl.push_back(Lit::from_dimacs(l));
    s.add_clause(cl);
  }
}

bool model_satisfies(const Assignment& m, const oracle::IntCnf& cnf) {
  for (const auto& c : cnf) {
    bool sat = false;
    for (int l : c) sat = sat || m.value(Lit::from_dimacs(l));
    if (!sat) return false;
  }
  return true;
}

// Pigeon p sits in hole h: variable p * holes + h + 1.
void add_pigeonhole(Solver& s, int pigeons, int holes) {
  auto x = [&](int p, int h) { return static_cast<Var>(p * holes + h + 1); };
  while (s.num_vars() < pigeons * holes) s.new_var();
  for (int p = 0; p < pigeons; ++p) {
    Clause c;
    for (int h = 0; h < holes; ++h) c.push_back(P(x(p, h)));
    s.add_clause(c);
  }
  for (int h = 0; h < holes; ++h)
    for (int p = 0; p < pigeons; ++p)
      for (int q = p + 1; q < pigeons; ++q) s.add_clause({N(x(p, h)), N(x(q, h))});
}

}  // namespace

TEST(LitTest, NegationIsInvolution) {
  Lit l(7, true);
  EXPECT_EQ(~~l, l);
  EXPECT_NE(~l, l);
  EXPECT_EQ((~l).var(), 7);
  EXPECT_FALSE((~l).positive());
  EXPECT_EQ(Lit::from_dimacs(-3).to_dimacs(), -3);
}

TEST(SolverTest, NewVarIsDense) {
  Solver s;
  EXPECT_EQ(s.new_var(), 1);
  s.new_var();
  EXPECT_EQ(s.new_var(), 3);
  Solver t;
  for (int i = 0; i < 10; ++i) t.new_var();
  EXPECT_EQ(t.new_var(), 11);
}

TEST(SolverTest, DirectContradictionIsUnsat) {
  Solver s;
  Var x = s.new_var();
  s.add_clause({P(x)});
  s.add_clause({N(x)});
  EXPECT_EQ(s.solve(), Status::Unsat);
  EXPECT_FALSE(s.okay());
}

TEST(SolverTest, EmptyClauseIsUnsat) {
  Solver s;
  s.new_var();
  s.add_clause(std::span<const Lit>{});
  EXPECT_EQ(s.solve(), Status::Unsat);
}

TEST(SolverTest, TautologyDoesNotChangeSemantics) {
  Solver s;
  Var x = s.new_var();
  s.add_clause({P(x), N(x)});
  EXPECT_EQ(s.solve({P(x)}), Status::Sat);
  EXPECT_EQ(s.solve({N(x)}), Status::Sat);
}

TEST(SolverTest, UnitPropagationExample) {
  Solver s;
  Var x1 = s.new_var(), x2 = s.new_var();
  s.add_clause({P(x1), P(x2)});
  s.add_clause({N(x1)});
  ASSERT_EQ(s.solve(), Status::Sat);
  EXPECT_TRUE(s.model().value(x2));
  EXPECT_FALSE(s.model().value(x1));
}

TEST(SolverTest, AssumptionsAreTemporary) {
  Solver s;
  Var x1 = s.new_var(), x2 = s.new_var();
  s.add_clause({P(x1), P(x2)});
  EXPECT_EQ(s.solve({N(x1), N(x2)}), Status::Unsat);
  EXPECT_TRUE(s.okay());
  ASSERT_EQ(s.solve({N(x1)}), Status::Sat);
  EXPECT_TRUE(s.model().value(x2));
  EXPECT_EQ(s.solve(), Status::Sat);
}

TEST(SolverTest, PigeonholeTwoIntoOne) {
  // Oracle: all 4 assignments of the two variables violate some clause.
  Solver s;
  add_pigeonhole(s, 2, 1);
  oracle::IntCnf cnf{{1}, {2}, {-1, -2}};
  EXPECT_FALSE(oracle::truth_table_sat(cnf, 2));
  EXPECT_EQ(s.solve(), Status::Unsat);
}

TEST(SolverTest, PigeonholeSevenIntoSixNeedsLearning) {
  Solver s;
  add_pigeonhole(s, 7, 6);
  EXPECT_EQ(s.solve(), Status::Unsat);
  EXPECT_GT(s.stats().conflicts, 0u);
}

TEST(SolverTest, UnallocatedVariableIsRejected) {
  Solver s;
  s.new_var();
  EXPECT_THROW(s.add_clause({P(2)}), std::invalid_argument);
  EXPECT_THROW(s.solve({P(5)}), std::invalid_argument);
  CnfFormula f;
  EXPECT_THROW(f.add_clause({P(1)}), std::invalid_argument);
}

TEST(SolverTest, ExpiredDeadlineGivesUnknown) {
  Solver s;
  add_pigeonhole(s, 9, 8);
  s.set_deadline(std::chrono::steady_clock::now());
  EXPECT_EQ(s.solve(), Status::Unknown);
  s.set_deadline(std::nullopt);
}

TEST(SolverTest, IncrementalClausesAfterSolve) {
  Solver s;
  Var a = s.new_var(), b = s.new_var(), c = s.new_var();
  s.add_clause({P(a), P(b), P(c)});
  ASSERT_EQ(s.solve(), Status::Sat);
  s.add_clause({N(a)});
  s.add_clause({N(b)});
  ASSERT_EQ(s.solve(), Status::Sat);
  EXPECT_TRUE(s.model().value(c));
  s.add_clause({N(c)});
  EXPECT_EQ(s.solve(), Status::Unsat);
}

// Verdict agreement against DPLL and model re-verification.
TEST(SolverProperty, AgreesWithDpllOnRandom3Cnf) {
  Rng rng(20240611);
  for (int i = 0; i < 400; ++i) {
    int nv = rng.range(3, 20);
    int nc = rng.range(1, static_cast<int>(nv * 5.5));
    auto cnf = oracle::random_kcnf(rng, nv, nc, 3);
    Solver s(SolverOptions{.seed = static_cast<std::uint64_t>(i)});
    load(s, cnf, nv);
    Status st = s.solve();
    bool expect = oracle::satisfiable(cnf, nv);
    ASSERT_EQ(st == Status::Sat, expect) << "instance " << i;
    if (st == Status::Sat) ASSERT_TRUE(model_satisfies(s.model(), cnf)) << "instance " << i;
  }
}

TEST(SolverProperty, AssumptionMonotonicity) {
  Rng rng(77);
  int unsat_seen = 0;
  for (int i = 0; i < 200; ++i) {
    int nv = rng.range(4, 12);
    auto cnf = oracle::random_kcnf(rng, nv, nv * 3, 3);
    Solver s;
    load(s, cnf, nv);
    std::vector<Lit> a;
    for (int k = 0; k < 3; ++k) a.push_back(Lit(rng.range(1, nv), rng.chance(0.5)));
    if (s.solve(a) != Status::Unsat) continue;
    ++unsat_seen;
    std::vector<Lit> ab = a;
    for (int k = 0; k < 3; ++k) ab.push_back(Lit(rng.range(1, nv), rng.chance(0.5)));
    EXPECT_EQ(s.solve(ab), Status::Unsat);
  }
  EXPECT_GT(unsat_seen, 10);
}

TEST(SolverProperty, DeterministicUnderFixedSeed) {
  Rng rng(5);
  auto cnf = oracle::random_kcnf(rng, 120, 480, 3);
  auto run = [&] {
    Solver s(SolverOptions{.seed = 99});
    load(s, cnf, 120);
    Status st = s.solve();
    std::vector<bool> values;
    if (st == Status::Sat)
      for (Var v = 1; v <= 120; ++v) values.push_back(s.model().value(v));
    return std::make_pair(st, values);
  };
  EXPECT_EQ(run(), run());
}

TEST(SolverProperty, HarderRandomInstancesStaySound) {
  Rng rng(31337);
  for (int i = 0; i < 20; ++i) {
    auto cnf = oracle::random_kcnf(rng, 120, 505, 3);
    Solver s(SolverOptions{.seed = static_cast<std::uint64_t>(i)});
    load(s, cnf, 120);
    if (s.solve() == Status::Sat) EXPECT_TRUE(model_satisfies(s.model(), cnf));
  }
}

TEST(DimacsTest, WriteThenReadPreservesClauses) {
  CnfFormula f;
  for (int i = 0; i < 4; ++i) f.new_var();
  f.add_clause({P(1), N(2)});
  f.add_clause({P(3), P(4), N(1)});
  f.add_clause({P(2), N(2)});  // tautology, dropped
  std::stringstream ss;
  write_dimacs(ss, f);
  EXPECT_EQ(ss.str(), "p cnf 4 2\n1 -2 0\n-1 3 4 0\n");
  CnfFormula g = read_dimacs(ss);
  EXPECT_EQ(g.num_vars(), 4);
  EXPECT_EQ(g.clauses(), f.clauses());
}

TEST(DimacsTest, ParseErrorsCarryLineNumbers) {
  std::istringstream missing("1 2 0\n");
  EXPECT_THROW(read_dimacs(missing), InputError);
  std::istringstream range("c comment\np cnf 2 1\n1 3 0\n");
  try {
    read_dimacs(range, "f.cnf");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_NE(std::string(e.what()).find("f.cnf:3"), std::string::npos);
  }
}
