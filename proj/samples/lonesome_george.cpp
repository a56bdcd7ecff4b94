// Compresses the bundled four-sentence Portuguese cluster about Lonesome
// George and prints the keywords, the baseline output and one compression
// per length target.
//
//   lonesome_george [cluster.json] [stopwords.txt]

#include <cstdio>
#include <fstream>
#include <iostream>

#include "msc/pipeline.hpp"

#ifndef MSC_SAMPLES_DIR
#define MSC_SAMPLES_DIR "samples"
#endif

int main(int argc, char** argv) {
  const std::string cluster_path = argc > 1 ? argv[1] : MSC_SAMPLES_DIR "/lonesome_george.json";
  const std::string stop_path = argc > 2 ? argv[2] : MSC_SAMPLES_DIR "/pt_stopwords.txt";

  std::ifstream cin(cluster_path), sin(stop_path);
  if (!cin || !sin) {
    std::cerr << "cannot open " << cluster_path << " or " << stop_path << "\n";
    return 2;
  }
  const auto cluster = msc::parse_cluster(cin, msc::InputFormat::json);
  const auto sw = msc::load_stopwords(sin);

  auto g = msc::build_weighted_graph(cluster, sw);
  const auto ks = msc::lda_keywords(cluster, sw, 5);
  const auto labels = msc::assign_labels(g, ks);
  msc::apply_labels(g, labels);
  std::printf("%zu vertices, %zu arcs\nkeywords:", g.vertex_count(), g.arc_count());
  for (const auto& w : ks.words) std::printf(" %s", w.lower.c_str());
  std::printf("\n");

  msc::SolverConfig cfg;
  if (const auto f10 = msc::filippova_compress(g, cfg)) std::printf("F10      %s\n", f10->text().c_str());

  const double c = msc::keyword_bonus(g, {});
  const double avg = msc::average_sentence_length(cluster);
  for (const std::optional<double> ratio : {std::optional<double>(0.5), std::optional<double>(0.7), std::optional<double>()}) {
    const auto p_max = msc::pmax_from_ratio(ratio, avg);
    if (p_max && *p_max < 8) continue;
    const auto model = msc::build_model(g, labels, 8, p_max, c);
    const auto nbest = msc::enumerate_nbest(model, cfg);
    const std::string name = ratio ? std::to_string(int(*ratio * 100)) + "%" : "inf";
    if (nbest.empty()) {
      std::printf("ILP:%-4s (none)\n", name.c_str());
      continue;
    }
    std::printf("ILP:%-4s %s\n", name.c_str(), msc::select_best(nbest).text().c_str());
  }
}
