#include <gtest/gtest.h>

#include <algorithm>
#include <climits>
#include <sstream>

#include "oracles.hpp"
#include "satkit/error.hpp"
#include "satkit/stemma.hpp"

using namespace satkit;

namespace {

Stemma make_stemma(std::vector<std::string> names, std::vector<std::pair<int, int>> edges) {
  Stemma s;
  s.manuscripts = std::move(names);
  s.copied_by = std::move(edges);
  return s;
}

Stemma numbered_stemma(int n, std::vector<std::pair<int, int>> edges) {
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back("m" + std::to_string(i));
  return make_stemma(std::move(names), std::move(edges));
}

/// Partial coloring with -1 for unknown; variants are named "V0".."V{k-1}".
Feature make_feature(const std::vector<int>& partial, int k) {
  Feature f;
  for (int v = 0; v < k; ++v) f.variants.push_back("V" + std::to_string(v));
  for (int c : partial) f.readings.push_back(c < 0 ? std::nullopt : std::optional<int>(c));
  return f;
}

bool extends(const Feature& f, const Coloring& c) {
  for (std::size_t i = 0; i < c.size(); ++i)
    if (f.readings[i] && *f.readings[i] != c[i]) return false;
  return true;
}

constexpr int V = 0, W = 1, U = -1;

}  // namespace

TEST(StemmaCheckTest, MonochromeChainIsConsistent) {
  Stemma s = make_stemma({"r", "a", "b"}, {{0, 1}, {1, 2}});
  auto w = check_consistency(s, make_feature({V, V, V}, 1));
  ASSERT_TRUE(w);
  EXPECT_EQ(w->source_of[V], 0);
}

TEST(StemmaCheckTest, ReadingCannotReappearBelowAnotherReading) {
  Stemma s = make_stemma({"r", "c", "g"}, {{0, 1}, {1, 2}});
  EXPECT_FALSE(check_consistency(s, make_feature({V, W, V}, 2)));
}

TEST(StemmaCheckTest, DiamondWithUnknownMiddleIsConsistent) {
  // r -> {a, b} -> c, r = V, c = W. Oracle: enumerate the 4 colorings of a, b.
  Stemma s = make_stemma({"r", "a", "b", "c"}, {{0, 1}, {0, 2}, {1, 3}, {2, 3}});
  std::vector<std::pair<int, int>> e = s.copied_by;
  int good = 0;
  oracle::for_each_completion({V, U, U, W}, 2, [&](const std::vector<int>& c) {
    good += oracle::color_connected(4, e, c);
  });
  EXPECT_GT(good, 0);
  auto w = check_consistency(s, make_feature({V, U, U, W}, 2));
  ASSERT_TRUE(w);
  EXPECT_TRUE(oracle::color_connected(4, e, w->coloring));
  EXPECT_EQ(w->source_of[V], 0);
}

TEST(StemmaCheckTest, WitnessSourcesReadTheirVariant) {
  Stemma s = make_stemma({"r", "a", "b", "c"}, {{0, 1}, {1, 2}, {1, 3}});
  auto w = check_consistency(s, make_feature({V, U, W, W}, 2));
  ASSERT_TRUE(w);
  for (int v = 0; v < 2; ++v)
    if (w->source_of[v]) EXPECT_EQ(w->coloring[*w->source_of[v]], v);
  EXPECT_EQ(w->coloring[1], W);
}

TEST(StemmaCheckTest, EmptyFeatureUsesOneAnonymousVariant) {
  Stemma s = make_stemma({"r", "a"}, {{0, 1}});
  Feature f;
  f.readings.assign(2, std::nullopt);
  EXPECT_TRUE(check_consistency(s, f));
  EXPECT_EQ(minimize_sources(s, f).k_min, 1);
}

TEST(StemmaCheckTest, MalformedStemmaIsRejected) {
  EXPECT_THROW(check_consistency(make_stemma({"r", "a"}, {{0, 1}, {1, 0}}), make_feature({V, V}, 1)),
               InputError);
  EXPECT_THROW(check_consistency(make_stemma({"r", "s", "a"}, {{0, 2}, {1, 2}}),
                                 make_feature({V, V, V}, 1)),
               InputError);
  EXPECT_THROW(make_stemma({"r", "a", "b"}, {{0, 1}}).validate(), InputError);
  EXPECT_THROW(make_stemma({}, {}).validate(), InputError);
  try {
    make_stemma({"r", "a", "b", "c"}, {{0, 1}, {1, 2}, {2, 3}, {3, 1}}).validate();
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("cycle"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("a -> b -> c -> a"), std::string::npos);
  }
}

TEST(CheckColoringTest, Examples) {
  EXPECT_TRUE(check_coloring(make_stemma({"r"}, {}), {V}));
  // Two V children of a W root: no monochrome common ancestor.
  Stemma fork = make_stemma({"r", "a", "b"}, {{0, 1}, {0, 2}});
  EXPECT_FALSE(check_coloring(fork, {W, V, V}));
  EXPECT_TRUE(check_coloring(fork, {V, V, W}));
  Stemma diamond = make_stemma({"r", "a", "b", "c"}, {{0, 1}, {0, 2}, {1, 3}, {2, 3}});
  EXPECT_TRUE(check_coloring(diamond, {V, V, W, W}));
  EXPECT_TRUE(oracle::color_connected(4, diamond.copied_by, {V, V, W, W}));
  EXPECT_FALSE(check_coloring(diamond, {V, W, W, V}));
}

TEST(MinimizeSourcesTest, Examples) {
  Stemma chain = make_stemma({"r", "a", "b"}, {{0, 1}, {1, 2}});
  auto mono = minimize_sources(chain, make_feature({V, V, V}, 1));
  EXPECT_EQ(mono.k_min, 1);
  EXPECT_EQ(mono.sources, (std::vector<int>{0}));
  // Oracle: both colorings of the middle node give 2 sources.
  int best = INT_MAX;
  oracle::for_each_completion({V, U, W}, 2, [&](const std::vector<int>& c) {
    best = std::min(best, oracle::count_sources(3, chain.copied_by, c));
  });
  EXPECT_EQ(best, 2);
  auto r = minimize_sources(chain, make_feature({V, U, W}, 2));
  EXPECT_EQ(r.k_min, 2);
  EXPECT_EQ(oracle::count_sources(3, chain.copied_by, r.coloring), 2);
  EXPECT_EQ(minimize_sources(chain, make_feature({V, W, V}, 2)).k_min, 3);
}

TEST(IndirectAncestorsTest, Examples) {
  using P = std::vector<std::pair<int, int>>;
  EXPECT_EQ(indirect_ancestors(numbered_stemma(3, {{0, 1}, {1, 2}})), (P{{0, 2}}));
  EXPECT_TRUE(indirect_ancestors(numbered_stemma(2, {{0, 1}})).empty());
  EXPECT_EQ(indirect_ancestors(numbered_stemma(4, {{0, 1}, {1, 2}, {2, 3}})),
            (P{{0, 2}, {0, 3}, {1, 3}}));
}

TEST(IndirectAncestorsTest, MatchesMatrixPowers) {
  Rng rng(404);
  for (int i = 0; i < 100; ++i) {
    int n = rng.range(1, 12);
    auto edges = oracle::random_crdag(rng, n, 0.2);
    EXPECT_EQ(indirect_ancestors(numbered_stemma(n, edges)),
              oracle::paths_of_length_two_or_more(n, edges))
        << "instance " << i;
  }
}

TEST(ReductionTest, SingleVariableClauses) {
  CnfFormula unit;
  Var x = unit.new_var();
  unit.add_clause({Lit(x)});
  auto inst = reduce_sat_to_color_connected(unit);
  auto w = check_consistency(inst.stemma, inst.feature);
  ASSERT_TRUE(w);
  EXPECT_EQ(w->coloring[inst.positive_node[x]], 0);  // black

  CnfFormula contradiction;
  Var y = contradiction.new_var();
  contradiction.add_clause({Lit(y)});
  contradiction.add_clause({~Lit(y)});
  auto bad = reduce_sat_to_color_connected(contradiction);
  EXPECT_GE(bad.negative_node[y], 0);
  EXPECT_FALSE(check_consistency(bad.stemma, bad.feature));
}

TEST(ReductionTest, EmptyClauseIsNotCompletable) {
  CnfFormula f;
  f.new_var();
  f.add_clause(std::span<const Lit>{});
  auto inst = reduce_sat_to_color_connected(f);
  EXPECT_NO_THROW(inst.stemma.validate());
  EXPECT_FALSE(check_consistency(inst.stemma, inst.feature));
}

TEST(ReductionTest, AgreesWithTruthTable) {
  Rng rng(9001);
  int sat = 0;
  for (int i = 0; i < 100; ++i) {
    const int nv = 6;
    auto cnf = oracle::random_kcnf(rng, nv, rng.range(1, 30), 3);
    CnfFormula f;
    for (int v = 0; v < nv; ++v) f.new_var();
    for (const auto& c : cnf) {
      Clause cl;
      for (int l : c) cl.push_back(Lit::from_dimacs(l));
      f.add_clause(cl);
    }
    const bool expected = oracle::truth_table_sat(cnf, nv);
    sat += expected;
    auto inst = reduce_sat_to_color_connected(f);
    auto w = check_consistency(inst.stemma, inst.feature, {.seed = static_cast<std::uint64_t>(i)});
    ASSERT_EQ(w.has_value(), expected) << "instance " << i;
    if (w) {
      // Black variable nodes read as true give a model.
      std::vector<int> value(nv + 1);
      for (int v = 1; v <= nv; ++v) value[v] = w->coloring[inst.positive_node[v]] == 0 ? 1 : -1;
      for (const auto& c : cnf) EXPECT_TRUE(oracle::eval_clause(c, value)) << "instance " << i;
    }
  }
  EXPECT_GT(sat, 10);
  EXPECT_LT(sat, 90);
}

TEST(StemmaProperty, AgreesWithBruteForce) {
  Rng rng(2718);
  for (int i = 0; i < 300; ++i) {
    const int n = rng.range(1, 10);
    const int k = rng.range(1, 3);
    auto edges = oracle::random_crdag(rng, n, 0.15);
    std::vector<int> partial(static_cast<std::size_t>(n));
    for (auto& c : partial) c = rng.chance(0.5) ? rng.range(0, k - 1) : -1;
    partial[static_cast<std::size_t>(rng.range(0, n - 1))] = rng.range(0, k - 1);

    bool any = false;
    int best = INT_MAX;
    oracle::for_each_completion(partial, k, [&](const std::vector<int>& c) {
      any = any || oracle::color_connected(n, edges, c);
      best = std::min(best, oracle::count_sources(n, edges, c));
    });

    Stemma s = numbered_stemma(n, edges);
    Feature f = make_feature(partial, k);
    auto w = check_consistency(s, f, {.seed = static_cast<std::uint64_t>(i)});
    ASSERT_EQ(w.has_value(), any) << "instance " << i;
    if (w) {
      EXPECT_TRUE(extends(f, w->coloring)) << "instance " << i;
      EXPECT_TRUE(check_coloring(s, w->coloring)) << "instance " << i;
      EXPECT_TRUE(oracle::color_connected(n, edges, w->coloring)) << "instance " << i;
    }
    auto r = minimize_sources(s, f);
    ASSERT_EQ(r.k_min, best) << "instance " << i;
    EXPECT_TRUE(extends(f, r.coloring)) << "instance " << i;
    EXPECT_EQ(oracle::count_sources(n, edges, r.coloring), r.k_min) << "instance " << i;
    EXPECT_GE(r.k_min, f.used_variants());
    EXPECT_EQ(r.k_min == f.used_variants(), any) << "instance " << i;
  }
}

TEST(CheckColoringProperty, MatchesDefinition) {
  Rng rng(11);
  for (int i = 0; i < 300; ++i) {
    const int n = rng.range(1, 9);
    auto edges = oracle::random_crdag(rng, n, 0.25);
    Coloring c(static_cast<std::size_t>(n));
    for (auto& x : c) x = rng.range(0, 2);
    EXPECT_EQ(check_coloring(numbered_stemma(n, edges), c), oracle::color_connected(n, edges, c))
        << "instance " << i;
  }
}

TEST(StemmaIoTest, DotRoundTrip) {
  std::istringstream in(
      "// tradition\n"
      "digraph besoin {\n"
      "  node [shape=box];\n"
      "  rankdir = TB;\n"
      "  A -> B; A -> \"C 1\" [label=\"x\"];\n"
      "  B -> D -> E\n"
      "  # trailing comment\n"
      "}\n");
  Stemma s = read_stemma_dot(in, "t.dot");
  EXPECT_EQ(s.manuscripts, (std::vector<std::string>{"A", "B", "C 1", "D", "E"}));
  EXPECT_EQ(s.copied_by.size(), 4u);
  std::ostringstream out;
  write_stemma_dot(out, s, "besoin");
  std::istringstream again(out.str());
  Stemma t = read_stemma_dot(again);
  EXPECT_EQ(t.manuscripts, s.manuscripts);
  EXPECT_EQ(t.copied_by, s.copied_by);
}

TEST(StemmaIoTest, DotErrors) {
  std::istringstream cyclic("digraph {\n A -> B;\n B -> A;\n}\n");
  try {
    read_stemma_dot(cyclic, "bad.dot");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_EQ(e.source(), "bad.dot");
    EXPECT_NE(std::string(e.what()).find("cycle"), std::string::npos);
  }
  std::istringstream undirected("digraph {\n A -> B;\n B -- C;\n}\n");
  try {
    read_stemma_dot(undirected, "u.dot");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_EQ(e.line(), 3);
  }
  std::istringstream no_header("graph { A -- B }");
  EXPECT_THROW(read_stemma_dot(no_header), InputError);
  std::istringstream open("digraph { A -> B;");
  EXPECT_THROW(read_stemma_dot(open), InputError);
}

TEST(StemmaIoTest, FeaturesJson) {
  Stemma s = make_stemma({"A", "B", "C"}, {{0, 1}, {0, 2}});
  std::istringstream in(R"([{"A": "x", "B": "y", "C": null}, {"C": "z"}, {}])");
  auto fs = read_features_json(in, s);
  ASSERT_EQ(fs.size(), 3u);
  EXPECT_EQ(fs[0].variants, (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(fs[0].readings[1], 1);
  EXPECT_FALSE(fs[0].readings[2]);
  EXPECT_EQ(fs[1].used_variants(), 1);
  EXPECT_EQ(fs[2].used_variants(), 0);

  std::istringstream unknown(R"([{"Q": "x"}])");
  EXPECT_THROW(read_features_json(unknown, s), InputError);
  std::istringstream broken("[\n{\"A\": \"x\",\n");
  try {
    read_features_json(broken, s, "f.json");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_GE(e.line(), 2);
  }
  std::istringstream number(R"([{"A": 3}])");
  EXPECT_THROW(read_features_json(number, s), InputError);
}

TEST(StemmaBatchTest, ParallelMatchesSequential) {
  Rng rng(5);
  const int n = 9;
  Stemma s = numbered_stemma(n, oracle::random_crdag(rng, n, 0.2));
  std::vector<Feature> fs;
  for (int i = 0; i < 40; ++i) {
    std::vector<int> partial(n);
    for (auto& c : partial) c = rng.chance(0.6) ? rng.range(0, 2) : -1;
    fs.push_back(make_feature(partial, 3));
  }
  for (auto task : {StemmaTask::Check, StemmaTask::MinSources}) {
    auto one = run_stemma_batch(s, fs, task, 1);
    auto four = run_stemma_batch(s, fs, task, 4);
    ASSERT_EQ(one.size(), fs.size());
    for (std::size_t i = 0; i < fs.size(); ++i) {
      EXPECT_EQ(one[i].consistent, four[i].consistent);
      EXPECT_EQ(one[i].k_min, four[i].k_min);
      EXPECT_EQ(one[i].consistent, check_consistency(s, fs[i]).has_value());
    }
  }
}
