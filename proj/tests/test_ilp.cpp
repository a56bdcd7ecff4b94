#include <gtest/gtest.h>

#include <random>
#include <regex>

#include "msc/ilp.hpp"
#include "oracles.hpp"

using namespace msc;

namespace {

LabelAssignment no_labels(const WordGraph& g) { return {std::vector<int>(g.vertex_count(), 0), 0, {""}}; }

SolverConfig any_path() {
  SolverConfig cfg;
  cfg.require_verb = false;
  return cfg;
}

// begin -> a -> b -> end
WordGraph chain() {
  WordGraph g;
  const int a = g.add_word("a", "N"), b = g.add_word("b", "V");
  g.add_arc(g.begin_id(), a, 0.5);
  g.add_arc(a, b, 0.25);
  g.add_arc(b, g.end_id(), 0.25);
  return g;
}

// Two disjoint begin->end chains: p1 -> p2 (total 1.0) and q1 -> q2
// (total 2.0).
struct Parallel {
  WordGraph g;
  int p1, p2, q1, q2;
};

Parallel parallel() {
  Parallel p;
  auto& g = p.g;
  p.p1 = g.add_word("p1", "N");
  p.p2 = g.add_word("p2", "V");
  p.q1 = g.add_word("q1", "N");
  p.q2 = g.add_word("q2", "V");
  g.add_arc(g.begin_id(), p.p1, 0.25);
  g.add_arc(p.p1, p.p2, 0.5);
  g.add_arc(p.p2, g.end_id(), 0.25);
  g.add_arc(g.begin_id(), p.q1, 0.5);
  g.add_arc(p.q1, p.q2, 1.0);
  g.add_arc(p.q2, g.end_id(), 0.5);
  return p;
}

bool same_path(const Solution& s, const oracle::Scored& o) { return s.vertices == o.path; }

}  // namespace

TEST(BuildModel, ChainShape) {
  const auto g = chain();
  const auto m = build_model(g, no_labels(g), 1, std::nullopt, 0.0);
  EXPECT_EQ(m.arc_var_count(), 3u);
  EXPECT_EQ(m.vertex_var_count(), 4u);
  EXPECT_EQ(m.label_var_count(), 0u);
  EXPECT_EQ(m.big_m(), 4);
  const auto s = solve_exact(m, any_path());
  ASSERT_TRUE(s);
  EXPECT_EQ(s->word_count, 2);
  EXPECT_DOUBLE_EQ(s->objective, 1.0);
  EXPECT_EQ(s->text(), "a b");
}

TEST(BuildModel, SharedLabelHasOneVariable) {
  auto p = parallel();
  LabelAssignment la = no_labels(p.g);
  la.label_count = 1;
  la.keyword_of_label.push_back("k");
  la.labels[p.p1] = la.labels[p.q1] = 1;
  const auto m = build_model(p.g, la, 1, std::nullopt, 0.5);
  EXPECT_EQ(m.label_var_count(), 1u);
  EXPECT_EQ(m.vertices_of_label()[1], (std::vector<int>{p.p1, p.q1}));
  const auto lp = export_lp(m);
  EXPECT_NE(lp.find(" label_1: + y_2 + y_4 - b_1 >= 0\n"), std::string::npos) << lp;
}

TEST(BuildModel, RejectsBadParameters) {
  const auto g = chain();
  EXPECT_THROW(build_model(g, no_labels(g), 3, std::nullopt, 0.0), ModelError);  // 2 word vertices
  EXPECT_THROW(build_model(g, no_labels(g), 0, std::nullopt, 0.0), ModelError);
  EXPECT_THROW(build_model(g, no_labels(g), 2, 1, 0.0), ModelError);
  EXPECT_THROW(build_model(g, no_labels(g), 1, std::nullopt, -1.0), ModelError);
  auto bad = no_labels(g);
  bad.labels[g.begin_id()] = 1;
  bad.label_count = 1;
  EXPECT_THROW(build_model(g, bad, 1, std::nullopt, 0.0), ModelError);
}

TEST(BuildModel, PminEightExcludesShorterPaths) {
  // Long chain of 9 words plus a 3-word shortcut that is much cheaper.
  WordGraph g;
  std::vector<int> w;
  for (int i = 0; i < 9; ++i) w.push_back(g.add_word("w" + std::to_string(i), i == 4 ? "V" : "N"));
  g.add_arc(g.begin_id(), w[0], 1.0);
  for (int i = 0; i + 1 < 9; ++i) g.add_arc(w[i], w[i + 1], 1.0);
  g.add_arc(w[8], g.end_id(), 1.0);
  g.add_arc(w[1], w[7], 0.01);
  const auto m = build_model(g, no_labels(g), 8, std::nullopt, 0.0);
  const auto s = solve_exact(m, any_path());
  ASSERT_TRUE(s);
  EXPECT_EQ(s->word_count, 9);
  EXPECT_FALSE(solve_exact(build_model(g, no_labels(g), 8, 8, 0.0), any_path()));
  const auto shortcut = solve_exact(build_model(g, no_labels(g), 1, std::nullopt, 0.0), any_path());
  EXPECT_EQ(shortcut->word_count, 4);
}

TEST(SolveExact, CheaperParallelPathWithoutLabels) {
  const auto p = parallel();
  const auto s = solve_exact(build_model(p.g, no_labels(p.g), 1, std::nullopt, 0.0), any_path());
  ASSERT_TRUE(s);
  EXPECT_EQ(s->vertices, (std::vector<int>{0, p.p1, p.p2, 1}));
  EXPECT_DOUBLE_EQ(s->objective, 1.0);
}

TEST(SolveExact, KeywordBonusFlipsTheChoice) {
  const auto p = parallel();
  auto la = no_labels(p.g);
  la.label_count = 2;
  la.keyword_of_label = {"", "k1", "k2"};
  la.labels[p.q1] = 1;
  la.labels[p.q2] = 2;
  const auto s = solve_exact(build_model(p.g, la, 1, std::nullopt, 0.75), any_path());
  ASSERT_TRUE(s);
  EXPECT_EQ(s->vertices, (std::vector<int>{0, p.q1, p.q2, 1}));
  EXPECT_DOUBLE_EQ(s->objective, 0.5);
  EXPECT_EQ(s->labels_used, (std::vector<int>{1, 2}));
}

TEST(SolveExact, LabelCollectedTwiceCountsOnce) {
  auto p = parallel();
  auto la = no_labels(p.g);
  la.label_count = 1;
  la.keyword_of_label = {"", "k"};
  la.labels[p.q1] = la.labels[p.q2] = 1;
  const auto s = solve_exact(build_model(p.g, la, 1, std::nullopt, 0.75), any_path());
  ASSERT_TRUE(s);
  // q path: 2.0 - 0.75 = 1.25 > 1.0.
  EXPECT_EQ(s->vertices, (std::vector<int>{0, p.p1, p.p2, 1}));
}

TEST(SolveExact, VerbFilterAndInfeasibility) {
  WordGraph g;
  const int a = g.add_word("a", "N");
  g.add_arc(g.begin_id(), a, 1.0);
  g.add_arc(a, g.end_id(), 1.0);
  SolverConfig cfg;
  EXPECT_FALSE(solve_exact(build_model(g, no_labels(g), 1, std::nullopt, 0.0), cfg));
  EXPECT_TRUE(enumerate_nbest(build_model(g, no_labels(g), 1, std::nullopt, 0.0), cfg).empty());
  EXPECT_TRUE(solve_exact(build_model(g, no_labels(g), 1, std::nullopt, 0.0), any_path()));
  cfg.verb_tags = VerbTags{"N"};
  EXPECT_TRUE(solve_exact(build_model(g, no_labels(g), 1, std::nullopt, 0.0), cfg));
}

TEST(VerbTags, PrefixAndExactMatching) {
  const VerbTags tags;
  EXPECT_TRUE(tags.matches("V"));
  EXPECT_TRUE(tags.matches("VER:pres"));
  EXPECT_TRUE(tags.matches("AUX"));
  EXPECT_FALSE(tags.matches("AUXV"));
  EXPECT_FALSE(tags.matches("N"));
}

TEST(SolveExact, MatchesBruteForceOnRandomGraphs) {
  std::mt19937 rng(1);
  int feasible = 0;
  for (int iter = 0; iter < 400; ++iter) {
    oracle::RandomGraphSpec spec;
    spec.max_words = 10;
    spec.arc_prob = 0.15 + 0.05 * (iter % 6);
    auto inst = oracle::random_instance(rng, spec);
    const auto& g = inst.graph;
    const int words = static_cast<int>(g.vertex_count()) - 2;
    std::uniform_int_distribution<int> pmin_d(1, std::max(1, std::min(words, 5)));
    const int p_min = pmin_d(rng);
    std::optional<int> p_max;
    if (iter % 3) p_max = p_min + static_cast<int>(rng() % 5);
    const double c = iter % 2 ? oracle::geometric_mean_weight(g) : 0.0;
    const bool verb = iter % 4 == 0;
    SolverConfig cfg;
    cfg.require_verb = verb;
    const auto m = build_model(g, inst.labels, p_min, p_max, c);
    const auto got = solve_exact(m, cfg);
    const auto want = oracle::feasible_sorted(g, inst.labels.labels, c, p_min, p_max, verb);
    ASSERT_EQ(got.has_value(), !want.empty()) << "iteration " << iter;
    if (!got) continue;
    ++feasible;
    EXPECT_NEAR(got->objective, want.front().objective, 1e-9) << "iteration " << iter;
    EXPECT_TRUE(same_path(*got, want.front())) << "iteration " << iter;
    EXPECT_TRUE(verify_solution(m, *got)) << verify_solution(m, *got).violation;
  }
  EXPECT_GT(feasible, 100);
}

TEST(SolveExact, ZeroBonusIsLengthBoundedShortestPath) {
  std::mt19937 rng(8);
  for (int iter = 0; iter < 100; ++iter) {
    auto inst = oracle::random_instance(rng, {});
    const auto& g = inst.graph;
    const auto want = oracle::feasible_sorted(g, std::vector<int>(g.vertex_count(), 0), 0.0, 1, 4, false);
    const auto got = solve_exact(build_model(g, inst.labels, 1, 4, 0.0), any_path());
    ASSERT_EQ(got.has_value(), !want.empty());
    if (got) {
      EXPECT_NEAR(got->objective, want.front().objective, 1e-12);
    }
  }
}

TEST(CompletionBound, NeverExceedsBruteForceCompletions) {
  std::mt19937 rng(21);
  int checked = 0;
  for (int iter = 0; iter < 200; ++iter) {
    oracle::RandomGraphSpec spec;
    spec.arc_prob = 0.3;
    spec.max_labels = 4;
    auto inst = oracle::random_instance(rng, spec);
    const auto& g = inst.graph;
    const int words = static_cast<int>(g.vertex_count()) - 2;
    const int p_min = 1 + static_cast<int>(rng() % std::min(words, 4));
    const std::optional<int> p_max = iter % 2 ? std::optional<int>(p_min + 3) : std::nullopt;
    const double c = 0.2 + 0.3 * (iter % 5);
    const auto m = build_model(g, inst.labels, p_min, p_max, c);
    const CompletionBound bound(m);
    const auto& labels = inst.labels.labels;
    for (const auto& full : oracle::feasible_sorted(g, labels, c, p_min, p_max, false)) {
      const auto& path = full.path;
      // Every proper prefix ending at path[i], i >= 0.
      for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        std::vector<char> used(m.label_count() + 1, 0);
        int prefix_words = 0;
        for (std::size_t k = 0; k <= i; ++k) {
          if (labels[path[k]] > 0) used[labels[path[k]]] = 1;
          prefix_words += g.vertex(path[k]).is_sentinel() ? 0 : 1;
        }
        double suffix = 0.0;
        std::set<int> fresh;
        for (std::size_t k = i; k + 1 < path.size(); ++k) {
          suffix += g.arc(*g.find_arc(path[k], path[k + 1])).weight;
          if (labels[path[k + 1]] > 0 && !used[labels[path[k + 1]]]) fresh.insert(labels[path[k + 1]]);
        }
        const double completion = suffix - c * double(fresh.size());
        EXPECT_LE(bound(path[i], prefix_words, used), completion + 1e-12);
        EXPECT_LE(bound.min_words_to_end(path[i]), full.words - prefix_words);
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 1000);
}

TEST(EnumerateNbest, ThreePathsSortedByObjective) {
  WordGraph g;
  const int a = g.add_word("a", "V"), b = g.add_word("b", "V"), d = g.add_word("d", "V");
  g.add_arc(0, a, 1.0);
  g.add_arc(a, 1, 1.0);
  g.add_arc(0, b, 0.5);
  g.add_arc(b, 1, 0.5);
  g.add_arc(a, d, 0.1);
  g.add_arc(d, 1, 0.1);
  const auto m = build_model(g, no_labels(g), 1, std::nullopt, 0.0);
  const auto all = enumerate_nbest(m, SolverConfig{});
  ASSERT_EQ(all.size(), 3u);
  EXPECT_DOUBLE_EQ(all[0].objective, 1.0);
  EXPECT_DOUBLE_EQ(all[1].objective, 1.2);
  EXPECT_DOUBLE_EQ(all[2].objective, 2.0);
  SolverConfig one;
  one.nbest = 1;
  const auto single = enumerate_nbest(m, one);
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0].vertices, solve_exact(m, one)->vertices);
}

TEST(EnumerateNbest, EqualsIteratedNoGoodCuts) {
  std::mt19937 rng(77);
  for (int iter = 0; iter < 120; ++iter) {
    oracle::RandomGraphSpec spec;
    spec.max_words = 9;
    spec.arc_prob = 0.3;
    auto inst = oracle::random_instance(rng, spec);
    const auto& g = inst.graph;
    const double c = iter % 2 ? oracle::geometric_mean_weight(g) : 0.0;
    const std::optional<int> p_max = iter % 3 ? std::optional<int>(6) : std::nullopt;
    SolverConfig cfg;
    cfg.nbest = 1 + iter % 12;
    cfg.require_verb = iter % 2 == 0;
    const auto direct = enumerate_nbest(build_model(g, inst.labels, 1, p_max, c), cfg);

    // Re-solve with a no-good cut after each solution; solutions without a
    // verb are cut but not kept.
    auto cut_model = build_model(g, inst.labels, 1, p_max, c);
    std::vector<Solution> iterated;
    while (static_cast<int>(iterated.size()) < cfg.nbest) {
      const auto s = solve_exact(cut_model, any_path());
      if (!s) break;
      cut_model.add_cut(no_good_cut(*s));
      if (!cfg.require_verb || has_verb(*s, cfg.verb_tags)) iterated.push_back(*s);
    }
    ASSERT_EQ(direct.size(), iterated.size()) << "iteration " << iter;
    for (std::size_t i = 0; i < direct.size(); ++i) {
      EXPECT_NEAR(direct[i].objective, iterated[i].objective, 1e-9);
      EXPECT_EQ(direct[i].arcs, iterated[i].arcs) << "iteration " << iter << " rank " << i;
      EXPECT_TRUE(verify_solution(cut_model, iterated[i]).violation == "no-good violation" ||
                  iterated[i].arcs.empty());
    }
  }
}

TEST(EnumerateNbest, MatchesBruteForceListsAndIsDistinct) {
  std::mt19937 rng(5);
  for (int iter = 0; iter < 150; ++iter) {
    auto inst = oracle::random_instance(rng, {});
    const auto& g = inst.graph;
    const double c = iter % 2 ? oracle::geometric_mean_weight(g) : 0.0;
    SolverConfig cfg;
    cfg.nbest = 50;
    const auto got = enumerate_nbest(build_model(g, inst.labels, 1, std::nullopt, c), cfg);
    const auto want = oracle::feasible_sorted(g, inst.labels.labels, c, 1, std::nullopt, true);
    ASSERT_EQ(got.size(), std::min<std::size_t>(want.size(), 50));
    std::set<std::vector<std::pair<int, int>>> arcsets;
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_NEAR(got[i].objective, want[i].objective, 1e-9);
      EXPECT_TRUE(same_path(got[i], want[i]));
      EXPECT_TRUE(arcsets.insert(got[i].arcs).second);
      if (i > 0) {
        EXPECT_LE(got[i - 1].objective, got[i].objective + 1e-9);
      }
    }
  }
}

TEST(Limits, NodeLimitReportsIncumbentsAndBound) {
  std::mt19937 rng(4);
  oracle::RandomGraphSpec spec;
  spec.min_words = spec.max_words = 12;
  spec.arc_prob = 0.6;
  auto inst = oracle::random_instance(rng, spec);
  const auto m = build_model(inst.graph, inst.labels, 1, std::nullopt, 0.0);
  SolverConfig cfg = any_path();
  cfg.node_limit = 5;
  try {
    enumerate_nbest(m, cfg);
    FAIL() << "expected the node limit to trigger";
  } catch (const SolverTimeout& t) {
    const auto all = enumerate_nbest(m, any_path());
    ASSERT_FALSE(all.empty());
    EXPECT_LE(t.bound(), all.front().objective + 1e-9);
    for (const auto& s : t.incumbents()) EXPECT_TRUE(verify_solution(m, s));
  }
}

TEST(Verify, AcceptsSolverOutputAndNamesViolations) {
  const auto p = parallel();
  auto la = no_labels(p.g);
  la.label_count = 1;
  la.keyword_of_label = {"", "k"};
  la.labels[p.q1] = 1;
  const auto m = build_model(p.g, la, 1, 2, 0.75);
  const auto s = *solve_exact(m, any_path());
  EXPECT_TRUE(verify_solution(m, s));

  auto repeat = s;
  repeat.vertices.insert(repeat.vertices.begin() + 2, repeat.vertices[1]);
  EXPECT_EQ(verify_solution(m, repeat).violation, "simple-path violation");

  auto objective = s;
  objective.objective += 0.1;
  EXPECT_EQ(verify_solution(m, objective).violation, "objective mismatch");

  auto start = s;
  start.vertices.erase(start.vertices.begin());
  EXPECT_EQ(verify_solution(m, start).violation, "begin-vertex violation");

  auto missing = make_solution(m, {0, p.q1, p.q2, 1});
  missing.arcs.pop_back();
  EXPECT_EQ(verify_solution(m, missing).violation, "flow-conservation violation");

  auto no_arc = s;
  no_arc.arcs[0] = {p.p1, p.q2};
  EXPECT_EQ(verify_solution(m, no_arc).violation, "arc-existence violation");

  auto fake_label = s;
  fake_label.labels_used = {1};
  fake_label.objective -= 0.75;
  EXPECT_EQ(verify_solution(m, fake_label).violation, "label-linking violation");

  auto hidden_label = make_solution(m, {0, p.q1, p.q2, 1});
  hidden_label.labels_used.clear();
  hidden_label.objective += 0.75;
  EXPECT_EQ(verify_solution(m, hidden_label).violation, "label-set mismatch");

  const auto tight = build_model(p.g, la, 1, 1, 0.75);
  EXPECT_EQ(verify_solution(tight, s).violation, "length violation");

  auto words = s;
  words.word_count = 5;
  EXPECT_EQ(verify_solution(m, words).violation, "word-count mismatch");

  auto tokens = s;
  tokens.tokens[0] = "zz";
  EXPECT_EQ(verify_solution(m, tokens).violation, "token mismatch");

  auto cut = m;
  cut.add_cut(no_good_cut(s));
  EXPECT_EQ(verify_solution(cut, s).violation, "no-good violation");
}

TEST(ExportLp, ChainModelSections) {
  const auto g = chain();
  const auto lp = export_lp(build_model(g, no_labels(g), 1, 2, 0.0));
  const auto count = [&](const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = lp.find(needle); pos != std::string::npos; pos = lp.find(needle, pos + 1)) ++n;
    return n;
  };
  EXPECT_EQ(count("Minimize\n"), 1u);
  EXPECT_EQ(count("Subject To\n"), 1u);
  EXPECT_NE(lp.find(" obj: + 0.5 x_0_2 + 0.25 x_2_3 + 0.25 x_3_1\n"), std::string::npos) << lp;
  EXPECT_NE(lp.find(" u_0 = 1\n"), std::string::npos);
  for (int v = 1; v < 4; ++v) EXPECT_NE(lp.find(" 1 <= u_" + std::to_string(v) + " <= 4\n"), std::string::npos);
  EXPECT_NE(lp.find(" pmin: + y_2 + y_3 >= 1\n"), std::string::npos);
  EXPECT_NE(lp.find(" pmax: + y_2 + y_3 <= 2\n"), std::string::npos);
  EXPECT_NE(lp.find(" mtz_2_3: + u_2 - u_3 + 4 x_2_3 <= 3\n"), std::string::npos);
  EXPECT_NE(lp.find(" out_1: + x_1_0 - y_1 = 0\n"), std::string::npos);
  EXPECT_NE(lp.find(" in_0: + x_1_0 - y_0 = 0\n"), std::string::npos);
  EXPECT_NE(lp.find(" begin: y_0 = 1\n"), std::string::npos);
  EXPECT_EQ(count("End\n"), 1u);
}

TEST(ExportLp, ZeroBonusOmitsLabelTerms) {
  auto p = parallel();
  auto la = no_labels(p.g);
  la.label_count = 1;
  la.keyword_of_label = {"", "k"};
  la.labels[p.q1] = 1;
  const auto lp0 = export_lp(build_model(p.g, la, 1, std::nullopt, 0.0));
  const auto obj0 = lp0.substr(lp0.find("obj:"), lp0.find("Subject To") - lp0.find("obj:"));
  EXPECT_EQ(obj0.find("b_"), std::string::npos);
  const auto lp1 = export_lp(build_model(p.g, la, 1, std::nullopt, 0.5));
  const auto obj1 = lp1.substr(lp1.find("obj:"), lp1.find("Subject To") - lp1.find("obj:"));
  EXPECT_NE(obj1.find("- 0.5 b_1"), std::string::npos);
}

TEST(ExportLp, DeterministicWithFullPrecision) {
  std::mt19937 rng(12);
  auto inst = oracle::random_instance(rng, {});
  const auto m = build_model(inst.graph, inst.labels, 1, std::nullopt, oracle::geometric_mean_weight(inst.graph));
  const auto a = export_lp(m);
  EXPECT_EQ(a, export_lp(m));
  // Every coefficient round-trips through %.17g.
  const std::regex coef(R"(\+ ([0-9.e+-]+) x_(\d+)_(\d+))");
  for (auto it = std::sregex_iterator(a.begin(), a.end(), coef); it != std::sregex_iterator(); ++it) {
    const int from = std::stoi((*it)[2]), to = std::stoi((*it)[3]);
    const auto arc = inst.graph.find_arc(from, to);
    if (!arc || (*it)[0].str().find("+ " + std::to_string(m.big_m()) + " ") == 0) continue;
    const double w = std::stod((*it)[1]);
    if (w == double(m.big_m())) continue;
    EXPECT_EQ(w, inst.graph.arc(*arc).weight);
  }
}

TEST(PmaxFromRatio, CeilingOfRatioTimesAverage) {
  EXPECT_EQ(pmax_from_ratio(0.5, 20.0), 10);
  EXPECT_EQ(pmax_from_ratio(0.5, 21.0), 11);
  EXPECT_EQ(pmax_from_ratio(0.7, 10.0), 7);
  EXPECT_EQ(pmax_from_ratio(std::nullopt, 10.0), std::nullopt);
}

TEST(SolutionJson, HasDocumentedFields) {
  const auto g = chain();
  const auto s = *solve_exact(build_model(g, no_labels(g), 1, std::nullopt, 0.0), any_path());
  const auto j = to_json(s);
  for (const char* key : {"tokens", "objective", "labels_used", "word_count"}) EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j["word_count"], 2);
}
