// Writes random compression models as LP files plus the objective found by
// the exact search, for checking against an external MILP solver.
//   lp_fixtures <dir>   ->  <dir>/model_<i>.lp and <dir>/expected.tsv

#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>

#include "msc/ilp.hpp"
#include "oracles.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: lp_fixtures <output-dir>\n";
    return 2;
  }
  const std::filesystem::path dir = argv[1];
  std::filesystem::create_directories(dir);
  std::ofstream manifest(dir / "expected.tsv");
  std::mt19937 rng(99);
  for (int i = 0; i < 12; ++i) {
    oracle::RandomGraphSpec spec;
    spec.min_words = 3;
    spec.max_words = 9;
    spec.arc_prob = 0.35;
    auto inst = oracle::random_instance(rng, spec);
    const int words = static_cast<int>(inst.graph.vertex_count()) - 2;
    const int p_min = 1 + static_cast<int>(rng() % std::min(words, 4));
    const std::optional<int> p_max = i % 2 ? std::optional<int>(p_min + 2) : std::nullopt;
    const double c = i % 3 ? oracle::geometric_mean_weight(inst.graph) : 0.0;
    auto model = msc::build_model(inst.graph, inst.labels, p_min, p_max, c);
    msc::SolverConfig cfg;
    cfg.require_verb = false;
    // Exclude the best path in every fourth model to exercise cut rows.
    if (i % 4 == 3)
      if (const auto first = msc::solve_exact(model, cfg)) model.add_cut(msc::no_good_cut(*first));
    const auto best = msc::solve_exact(model, cfg);
    const std::string name = "model_" + std::to_string(i) + ".lp";
    std::ofstream(dir / name) << msc::export_lp(model);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", best ? best->objective : 0.0);
    manifest << name << '\t' << (best ? buf : "infeasible") << '\n';
  }
  return 0;
}
