#include <gtest/gtest.h>

#include <random>

#include "msc/baseline.hpp"
#include "oracles.hpp"

using namespace msc;

namespace {

// begin -> chain of `n` words -> end, total weight `w` spread evenly.
void add_chain(WordGraph& g, const std::string& prefix, int n, double w, bool verb = true) {
  int prev = g.begin_id();
  for (int i = 0; i < n; ++i) {
    const int v = g.add_word(prefix + std::to_string(i), verb && i == 0 ? "V" : "N");
    g.add_arc(prev, v, 0.0);
    prev = v;
  }
  g.add_arc(prev, g.end_id(), 0.0);
  std::vector<int> path{g.begin_id()};
  for (int i = 0; i < n; ++i) path.push_back(static_cast<int>(g.vertex_count()) - n + i);
  path.push_back(g.end_id());
  for (std::size_t i = 0; i + 1 < path.size(); ++i)
    g.arcs()[*g.find_arc(path[i], path[i + 1])].weight = w / double(path.size() - 1);
}

}  // namespace

TEST(KShortestPaths, MatchesBruteForceOnRandomGraphs) {
  std::mt19937 rng(3);
  for (int iter = 0; iter < 200; ++iter) {
    oracle::RandomGraphSpec spec;
    spec.dag = iter % 2 == 0;
    spec.max_words = 8;
    spec.arc_prob = 0.35;
    auto inst = oracle::random_instance(rng, spec);
    const auto& g = inst.graph;
    auto all = oracle::all_simple_paths(g);
    std::vector<double> weights;
    for (const auto& p : all) weights.push_back(detail::path_weight(g, p));
    std::sort(weights.begin(), weights.end());
    const int k = 1 + iter % 15;
    const auto got = k_shortest_paths(g, k);
    ASSERT_EQ(got.size(), std::min<std::size_t>(weights.size(), k)) << "iteration " << iter;
    std::set<std::vector<int>> distinct;
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_NEAR(got[i].total_weight, weights[i], 1e-9) << "iteration " << iter << " rank " << i;
      EXPECT_TRUE(distinct.insert(got[i].vertices).second);
      EXPECT_EQ(got[i].vertices.front(), g.begin_id());
      EXPECT_EQ(got[i].vertices.back(), g.end_id());
      std::set<int> vs(got[i].vertices.begin(), got[i].vertices.end());
      EXPECT_EQ(vs.size(), got[i].vertices.size());
    }
  }
}

TEST(KShortestPaths, LargerKExtendsSmallerK) {
  std::mt19937 rng(9);
  for (int iter = 0; iter < 50; ++iter) {
    auto inst = oracle::random_instance(rng, {});
    const auto small = k_shortest_paths(inst.graph, 5);
    const auto large = k_shortest_paths(inst.graph, 20);
    ASSERT_LE(small.size(), large.size());
    for (std::size_t i = 0; i < small.size(); ++i) EXPECT_EQ(small[i].vertices, large[i].vertices);
  }
}

TEST(KShortestPaths, FirstPathIsDijkstraShortest) {
  std::mt19937 rng(10);
  for (int iter = 0; iter < 50; ++iter) {
    auto inst = oracle::random_instance(rng, {});
    const auto& g = inst.graph;
    const auto got = k_shortest_paths(g, 1);
    const auto want = oracle::feasible_sorted(g, std::vector<int>(g.vertex_count(), 0), 0.0, 0, std::nullopt, false);
    ASSERT_EQ(got.empty(), want.empty());
    if (!got.empty()) {
      EXPECT_NEAR(got[0].total_weight, want.front().objective, 1e-12);
    }
  }
}

TEST(KShortestPaths, DisconnectedGraphHasNoPaths) {
  WordGraph g;
  const int a = g.add_word("a", "V");
  g.add_arc(g.begin_id(), a, 1.0);
  EXPECT_TRUE(k_shortest_paths(g, 10).empty());
  EXPECT_THROW(k_shortest_paths(g, 0), std::invalid_argument);
}

TEST(FilippovaCompress, LowestWeightPerWordAmongLongPaths) {
  WordGraph g;
  add_chain(g, "a", 9, 3.0);   // 3.0 / 9 = 0.333
  add_chain(g, "b", 10, 4.0);  // 4.0 / 10 = 0.4
  add_chain(g, "c", 3, 0.1);   // too short
  SolverConfig cfg;
  cfg.nbest = 10;
  const auto s = filippova_compress(g, cfg);
  ASSERT_TRUE(s);
  EXPECT_EQ(s->word_count, 9);
  EXPECT_NEAR(s->objective, 3.0, 1e-12);
  EXPECT_EQ(s->tokens.front(), "a0");
}

TEST(FilippovaCompress, NoneWhenEveryPathIsShort) {
  WordGraph g;
  add_chain(g, "a", 8, 1.0);
  add_chain(g, "b", 5, 1.0);
  EXPECT_FALSE(filippova_compress(g, SolverConfig{}));
  EXPECT_TRUE(filippova_compress(g, SolverConfig{}, 7));
}

TEST(FilippovaCompress, VerbFilter) {
  WordGraph g;
  add_chain(g, "a", 9, 1.0, false);
  add_chain(g, "b", 9, 2.0, true);
  SolverConfig cfg;
  EXPECT_EQ(filippova_compress(g, cfg)->tokens.front(), "b0");
  cfg.require_verb = false;
  EXPECT_EQ(filippova_compress(g, cfg)->tokens.front(), "a0");
}

TEST(FilippovaCompress, OnlyConsidersTheFirstKPaths) {
  WordGraph g;
  add_chain(g, "short", 2, 0.1);
  add_chain(g, "long", 9, 5.0);
  SolverConfig cfg;
  cfg.nbest = 1;
  EXPECT_FALSE(filippova_compress(g, cfg));
  cfg.nbest = 2;
  EXPECT_TRUE(filippova_compress(g, cfg));
}

TEST(FilippovaCompress, AgreesWithBruteForceSelection) {
  std::mt19937 rng(14);
  for (int iter = 0; iter < 100; ++iter) {
    oracle::RandomGraphSpec spec;
    spec.min_words = 6;
    spec.max_words = 9;
    spec.arc_prob = 0.4;
    auto inst = oracle::random_instance(rng, spec);
    const auto& g = inst.graph;
    auto paths = oracle::feasible_sorted(g, std::vector<int>(g.vertex_count(), 0), 0.0, 0, std::nullopt, false);
    if (paths.size() > 50) paths.resize(50);
    std::optional<double> want;
    for (const auto& p : paths)
      if (p.words > 3 && oracle::path_has_verb(g, p.path, {})) {
        const double r = p.objective / p.words;
        if (!want || r < *want) want = r;
      }
    const auto got = filippova_compress(g, SolverConfig{}, 3);
    ASSERT_EQ(got.has_value(), want.has_value()) << "iteration " << iter;
    if (got) {
      EXPECT_NEAR(got->objective / got->word_count, *want, 1e-9);
    }
  }
}
