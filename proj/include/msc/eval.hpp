#ifndef MSC_EVAL_HPP
#define MSC_EVAL_HPP

// ROUGE-N and ROUGE-SU4 with clipped counts and multi-reference pooling,
// compression ratio, and report tables.

#include <algorithm>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "msc/corpus.hpp"

namespace msc {

struct RougeScore {
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
};

// Token normaliser applied before counting (e.g. a stemmer). Identity by
// default.
using Normalizer = std::function<std::string(const std::string&)>;

struct RougeOptions {
  Normalizer normalizer;
  const StopwordList* stopwords = nullptr;
};

namespace detail {

inline std::vector<std::string> prepare(const std::vector<std::string>& tokens, const RougeOptions& opt) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    auto lower = text::fold_case(t);
    if (opt.stopwords && (opt.stopwords->contains(lower) || !text::has_word_char(lower))) continue;
    out.push_back(opt.normalizer ? opt.normalizer(lower) : lower);
  }
  return out;
}

using Bag = std::map<std::string, int>;

inline Bag ngram_bag(const std::vector<std::string>& t, int n) {
  Bag bag;
  if (n < 1 || t.size() < static_cast<std::size_t>(n)) return bag;
  for (std::size_t i = 0; i + n <= t.size(); ++i) {
    std::string key = t[i];
    for (int k = 1; k < n; ++k) key += '\x1f' + t[i + k];
    ++bag[key];
  }
  return bag;
}

// Skip bigrams with at most `max_skip` intervening tokens, plus unigrams.
inline Bag skip_bigram_bag(const std::vector<std::string>& t, int max_skip) {
  Bag bag = ngram_bag(t, 1);
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = i + 1; j < t.size() && j - i <= static_cast<std::size_t>(max_skip) + 1; ++j)
      ++bag[t[i] + '\x1e' + t[j]];
  return bag;
}

inline int total(const Bag& b) {
  int n = 0;
  for (const auto& [k, c] : b) n += c;
  return n;
}

inline int overlap(const Bag& cand, const Bag& ref) {
  int n = 0;
  for (const auto& [k, c] : cand)
    if (auto it = ref.find(k); it != ref.end()) n += std::min(c, it->second);
  return n;
}

// Sums hits and counts over references; the candidate's count is pooled
// once per reference so precision stays in [0, 1].
inline RougeScore pooled_score(const Bag& cand, const std::vector<Bag>& refs) {
  long hits = 0, ref_total = 0, cand_total = 0;
  const int c = total(cand);
  for (const auto& r : refs) {
    hits += overlap(cand, r);
    ref_total += total(r);
    cand_total += c;
  }
  RougeScore s;
  if (hits == 0) return s;
  s.recall = double(hits) / double(ref_total);
  s.precision = double(hits) / double(cand_total);
  s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

}  // namespace detail

inline RougeScore rouge_n(const std::vector<std::string>& candidate,
                          const std::vector<std::vector<std::string>>& references, int n,
                          const RougeOptions& opt = {}) {
  if (n < 1) throw std::invalid_argument("ROUGE-N needs n >= 1");
  if (references.empty()) throw std::invalid_argument("ROUGE needs at least one reference");
  const auto cand = detail::ngram_bag(detail::prepare(candidate, opt), n);
  std::vector<detail::Bag> refs;
  for (const auto& r : references) refs.push_back(detail::ngram_bag(detail::prepare(r, opt), n));
  return detail::pooled_score(cand, refs);
}

inline RougeScore rouge_su4(const std::vector<std::string>& candidate,
                            const std::vector<std::vector<std::string>>& references, const RougeOptions& opt = {}) {
  if (references.empty()) throw std::invalid_argument("ROUGE needs at least one reference");
  const auto cand = detail::skip_bigram_bag(detail::prepare(candidate, opt), 4);
  std::vector<detail::Bag> refs;
  for (const auto& r : references) refs.push_back(detail::skip_bigram_bag(detail::prepare(r, opt), 4));
  return detail::pooled_score(cand, refs);
}

inline std::vector<std::string> surfaces(const Sentence& s) {
  std::vector<std::string> out;
  for (const auto& t : s.tokens) out.push_back(t.surface);
  return out;
}

inline double average_sentence_length(const Cluster& c) {
  if (c.sentences.empty()) throw std::invalid_argument("cluster has no sentences");
  std::size_t n = 0;
  for (const auto& s : c.sentences) n += s.size();
  return double(n) / double(c.sentences.size());
}

inline double compression_ratio(std::size_t output_tokens, const Cluster& c) {
  return double(output_tokens) / average_sentence_length(c);
}

inline double compression_ratio(const std::vector<std::string>& output, const Cluster& c) {
  return compression_ratio(output.size(), c);
}

struct EvaluationRow {
  std::string cluster;
  std::string system;  // e.g. "ILP:80%" or "F10"
  RougeScore rouge1, rouge2, su4;
  double cr = 0.0;
  int length = 0;
};

struct RougeReport {
  std::vector<EvaluationRow> rows;

  struct Summary {
    std::string system;
    RougeScore rouge1, rouge2, su4;
    double cr = 0.0;
    double length = 0.0;
    std::size_t clusters = 0;
  };

  // Macro averages per system, in first-appearance order. Averaged f1 is
  // the harmonic mean of the averaged recall and precision.
  std::vector<Summary> summarize() const {
    std::vector<Summary> out;
    std::map<std::string, std::size_t> index;
    for (const auto& r : rows) {
      auto [it, fresh] = index.emplace(r.system, out.size());
      if (fresh) {
        out.emplace_back();
        out.back().system = r.system;
      }
      auto& s = out[it->second];
      const auto add = [](RougeScore& acc, const RougeScore& x) {
        acc.recall += x.recall;
        acc.precision += x.precision;
      };
      add(s.rouge1, r.rouge1);
      add(s.rouge2, r.rouge2);
      add(s.su4, r.su4);
      s.cr += r.cr;
      s.length += r.length;
      ++s.clusters;
    }
    for (auto& s : out) {
      const double n = double(s.clusters);
      for (auto* sc : {&s.rouge1, &s.rouge2, &s.su4}) {
        sc->recall /= n;
        sc->precision /= n;
        sc->f1 = (sc->recall + sc->precision) > 0 ? 2 * sc->recall * sc->precision / (sc->recall + sc->precision) : 0.0;
      }
      s.cr /= n;
      s.length /= n;
    }
    return out;
  }
};

namespace detail {
inline std::string fixed4(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}
}  // namespace detail

inline std::string rows_tsv(const RougeReport& r) {
  std::string out =
      "cluster\tsystem\tR1_recall\tR1_precision\tR1_f1\tR2_recall\tR2_precision\tR2_f1\tSU4_recall\tSU4_precision\tSU4_"
      "f1\tCR\tlength\n";
  for (const auto& row : r.rows) {
    out += row.cluster + "\t" + row.system;
    for (const auto* s : {&row.rouge1, &row.rouge2, &row.su4})
      out += "\t" + detail::fixed4(s->recall) + "\t" + detail::fixed4(s->precision) + "\t" + detail::fixed4(s->f1);
    out += "\t" + detail::fixed4(row.cr) + "\t" + std::to_string(row.length) + "\n";
  }
  return out;
}

// One row per system: ROUGE-1, ROUGE-2, SU4 (recall and F-measure) and CR.
inline std::string summary_tsv(const RougeReport& r) {
  std::string out = "system\tROUGE-1_recall\tROUGE-1_f1\tROUGE-2_recall\tROUGE-2_f1\tSU4_recall\tSU4_f1\tCR\tavg_length\tclusters\n";
  for (const auto& s : r.summarize()) {
    out += s.system;
    for (const auto* sc : {&s.rouge1, &s.rouge2, &s.su4})
      out += "\t" + detail::fixed4(sc->recall) + "\t" + detail::fixed4(sc->f1);
    out += "\t" + detail::fixed4(s.cr) + "\t" + detail::fixed4(s.length) + "\t" + std::to_string(s.clusters) + "\n";
  }
  return out;
}

inline nlohmann::json to_json(const RougeScore& s) {
  return {{"recall", s.recall}, {"precision", s.precision}, {"f1", s.f1}};
}

inline nlohmann::json to_json(const RougeReport& r) {
  nlohmann::json j;
  j["rows"] = nlohmann::json::array();
  for (const auto& row : r.rows)
    j["rows"].push_back({{"cluster", row.cluster},
                         {"system", row.system},
                         {"rouge1", to_json(row.rouge1)},
                         {"rouge2", to_json(row.rouge2)},
                         {"su4", to_json(row.su4)},
                         {"cr", row.cr},
                         {"length", row.length}});
  j["summary"] = nlohmann::json::array();
  for (const auto& s : r.summarize())
    j["summary"].push_back({{"system", s.system},
                            {"rouge1", to_json(s.rouge1)},
                            {"rouge2", to_json(s.rouge2)},
                            {"su4", to_json(s.su4)},
                            {"cr", s.cr},
                            {"avg_length", s.length},
                            {"clusters", s.clusters}});
  return j;
}

}  // namespace msc

#endif  // MSC_EVAL_HPP
