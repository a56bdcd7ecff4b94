#ifndef MSC_KEYWORDS_HPP
#define MSC_KEYWORDS_HPP

// Cluster keyword extraction (TextRank, single-topic LDA, LSI) and the
// mapping of keywords onto word-graph vertex labels.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "msc/corpus.hpp"
#include "msc/wordgraph.hpp"

namespace msc {

enum class KeywordMethod { lda, lsi, textrank };

inline std::string_view to_string(KeywordMethod m) {
  switch (m) {
    case KeywordMethod::lda: return "lda";
    case KeywordMethod::lsi: return "lsi";
    case KeywordMethod::textrank: return "textrank";
  }
  return "?";
}

inline KeywordMethod parse_keyword_method(std::string_view s) {
  if (s == "lda") return KeywordMethod::lda;
  if (s == "lsi") return KeywordMethod::lsi;
  if (s == "textrank") return KeywordMethod::textrank;
  throw std::invalid_argument("unknown keyword method '" + std::string(s) + "'");
}

struct ScoredWord {
  std::string lower;
  double score = 0.0;
};

struct KeywordSet {
  KeywordMethod method = KeywordMethod::lda;
  std::vector<ScoredWord> words;
  int requested_count = 0;

  bool contains(std::string_view w) const {
    return std::any_of(words.begin(), words.end(), [&](const ScoredWord& s) { return s.lower == w; });
  }
};

struct TextRankParams {
  double damping = 0.85;
  double tolerance = 1e-6;
  int max_iterations = 100;
};

namespace detail {

inline void require_count(int n) {
  if (n < 1) throw std::invalid_argument("keyword count must be >= 1");
}

// Non-stopword lowers of each sentence, in order.
inline std::vector<std::vector<std::string>> content_words(const Cluster& c, const StopwordList& sw) {
  std::vector<std::vector<std::string>> out;
  for (const auto& s : c.sentences) {
    auto& words = out.emplace_back();
    for (const auto& t : s.tokens)
      if (!is_stopword(t, sw)) words.push_back(t.lower);
  }
  return out;
}

// Scores are compared on a 1e-12 grid so that values equal up to rounding
// noise fall through to the lexicographic tie-break.
inline KeywordSet top_n(KeywordMethod method, const std::map<std::string, double>& scores, int n) {
  std::vector<ScoredWord> all;
  for (const auto& [w, s] : scores) all.push_back({w, s});
  const auto grid = [](double x) { return std::llround(x * 1e12); };
  std::stable_sort(all.begin(), all.end(), [&](const ScoredWord& a, const ScoredWord& b) {
    const auto ga = grid(a.score), gb = grid(b.score);
    if (ga != gb) return ga > gb;
    return a.lower < b.lower;
  });
  if (all.size() > static_cast<std::size_t>(n)) all.resize(n);
  return KeywordSet{method, std::move(all), n};
}

}  // namespace detail

// Weighted PageRank over the undirected co-occurrence graph of adjacent
// non-stopwords (window 2). Scores are normalised to sum to 1.
inline KeywordSet textrank_keywords(const Cluster& c, const StopwordList& sw, int n,
                                    const TextRankParams& params = {}) {
  detail::require_count(n);
  const auto sentences = detail::content_words(c, sw);
  std::map<std::string, int> index;
  for (const auto& s : sentences)
    for (const auto& w : s) index.emplace(w, 0);
  if (index.empty()) return KeywordSet{KeywordMethod::textrank, {}, n};
  std::vector<std::string> words;
  for (auto& [w, id] : index) {
    id = static_cast<int>(words.size());
    words.push_back(w);
  }
  const std::size_t V = words.size();
  std::vector<std::map<int, double>> adj(V);
  for (const auto& s : sentences)
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      const int a = index[s[i]], b = index[s[i + 1]];
      if (a == b) continue;
      adj[a][b] += 1.0;
      adj[b][a] += 1.0;
    }
  std::vector<double> strength(V, 0.0);
  for (std::size_t v = 0; v < V; ++v)
    for (const auto& [u, w] : adj[v]) strength[v] += w;

  std::vector<double> score(V, 1.0 / double(V)), next(V);
  const double d = params.damping;
  for (int it = 0; it < params.max_iterations; ++it) {
    for (std::size_t v = 0; v < V; ++v) {
      double acc = 0.0;
      for (const auto& [u, w] : adj[v]) acc += w / strength[u] * score[u];
      next[v] = (1.0 - d) / double(V) + d * acc;
    }
    double delta = 0.0;
    for (std::size_t v = 0; v < V; ++v) delta += std::abs(next[v] - score[v]);
    score.swap(next);
    if (delta < params.tolerance) break;
  }
  double total = 0.0;
  for (double s : score) total += s;
  std::map<std::string, double> scores;
  for (std::size_t v = 0; v < V; ++v) scores[words[v]] = score[v] / total;
  return detail::top_n(KeywordMethod::textrank, scores, n);
}

// With a single topic the posterior topic-word distribution is the
// smoothed empirical frequency (count + beta) / (N + beta V). The seed is
// accepted for interface parity; the closed form needs no sampling.
inline KeywordSet lda_keywords(const Cluster& c, const StopwordList& sw, int n, unsigned seed = 0,
                               double beta = 0.01) {
  (void)seed;
  detail::require_count(n);
  std::map<std::string, double> counts;
  double total = 0.0;
  for (const auto& s : detail::content_words(c, sw))
    for (const auto& w : s) {
      counts[w] += 1.0;
      total += 1.0;
    }
  const double V = double(counts.size());
  for (auto& [w, cnt] : counts) cnt = (cnt + beta) / (total + beta * V);
  return detail::top_n(KeywordMethod::lda, counts, n);
}

struct PowerIterationResult {
  std::vector<double> vector;
  double eigenvalue = 0.0;
  int iterations = 0;
};

// Leading eigenvector of the symmetric PSD matrix A = M M^T, where M is
// the dense row-major rows x cols matrix. Deterministic start (all ones).
inline PowerIterationResult leading_left_singular_vector(const std::vector<double>& M, std::size_t rows,
                                                         std::size_t cols, double tol = 1e-12,
                                                         int max_iter = 10000) {
  PowerIterationResult r;
  r.vector.assign(rows, 1.0 / std::sqrt(double(std::max<std::size_t>(rows, 1))));
  std::vector<double> tmp(cols), next(rows);
  for (r.iterations = 0; r.iterations < max_iter; ++r.iterations) {
    std::fill(tmp.begin(), tmp.end(), 0.0);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) tmp[j] += M[i * cols + j] * r.vector[i];
    for (std::size_t i = 0; i < rows; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < cols; ++j) acc += M[i * cols + j] * tmp[j];
      next[i] = acc;
    }
    double norm = 0.0;
    for (double x : next) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) {
      r.eigenvalue = 0.0;
      std::fill(r.vector.begin(), r.vector.end(), 0.0);
      return r;
    }
    double delta = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
      next[i] /= norm;
      delta = std::max(delta, std::abs(next[i] - r.vector[i]));
    }
    r.vector.swap(next);
    r.eigenvalue = norm;
    if (delta < tol) break;
  }
  return r;
}

// Term-by-sentence count matrix over non-stopwords; terms are scored by
// the absolute loading on the leading left singular vector.
inline KeywordSet lsi_keywords(const Cluster& c, const StopwordList& sw, int n) {
  detail::require_count(n);
  const auto sentences = detail::content_words(c, sw);
  std::map<std::string, std::size_t> index;
  for (const auto& s : sentences)
    for (const auto& w : s) index.emplace(w, 0);
  if (index.empty()) return KeywordSet{KeywordMethod::lsi, {}, n};
  std::vector<std::string> terms;
  for (auto& [w, id] : index) {
    id = terms.size();
    terms.push_back(w);
  }
  const std::size_t rows = terms.size(), cols = sentences.size();
  std::vector<double> M(rows * cols, 0.0);
  for (std::size_t j = 0; j < cols; ++j)
    for (const auto& w : sentences[j]) M[index[w] * cols + j] += 1.0;
  const auto pi = leading_left_singular_vector(M, rows, cols);
  if (pi.eigenvalue == 0.0) return KeywordSet{KeywordMethod::lsi, {}, n};
  std::map<std::string, double> scores;
  for (std::size_t i = 0; i < rows; ++i) scores[terms[i]] = std::abs(pi.vector[i]);
  return detail::top_n(KeywordMethod::lsi, scores, n);
}

inline KeywordSet extract_keywords(KeywordMethod method, const Cluster& c, const StopwordList& sw, int n,
                                   unsigned seed = 0) {
  switch (method) {
    case KeywordMethod::lda: return lda_keywords(c, sw, n, seed);
    case KeywordMethod::lsi: return lsi_keywords(c, sw, n);
    case KeywordMethod::textrank: return textrank_keywords(c, sw, n);
  }
  throw std::invalid_argument("unknown keyword method");
}

struct LabelAssignment {
  // Indexed by vertex id; 0 = no keyword.
  std::vector<int> labels;
  int label_count = 0;
  // Keyword behind each label, index 0 unused.
  std::vector<std::string> keyword_of_label{""};
};

// Keywords are matched on the case-folded surface only, so one keyword may
// label several vertices (e.g. a noun/verb homograph). Keywords with no
// matching vertex are skipped and labels stay contiguous, in rank order.
inline LabelAssignment assign_labels(const WordGraph& g, const KeywordSet& ks) {
  LabelAssignment la;
  la.labels.assign(g.vertex_count(), 0);
  for (const auto& kw : ks.words) {
    bool matched = false;
    for (const auto& v : g.vertices()) {
      if (v.is_sentinel() || v.lower != kw.lower || la.labels[v.id] != 0) continue;
      if (!matched) {
        ++la.label_count;
        la.keyword_of_label.push_back(kw.lower);
        matched = true;
      }
      la.labels[v.id] = la.label_count;
    }
  }
  return la;
}

inline void apply_labels(WordGraph& g, const LabelAssignment& la) {
  for (auto& v : g.vertices()) v.label = la.labels.at(v.id);
}

inline LabelAssignment labels_from_graph(const WordGraph& g) {
  LabelAssignment la;
  la.labels.resize(g.vertex_count());
  for (const auto& v : g.vertices()) {
    la.labels[v.id] = v.label;
    la.label_count = std::max(la.label_count, v.label);
  }
  la.keyword_of_label.resize(la.label_count + 1);
  for (const auto& v : g.vertices())
    if (v.label > 0) la.keyword_of_label[v.label] = v.lower;
  return la;
}

// Fraction of keywords that occur (case-folded) in at least one reference.
inline double keyword_coverage(const KeywordSet& ks, const std::vector<Sentence>& references) {
  if (ks.words.empty()) return 0.0;
  std::set<std::string> ref_words;
  for (const auto& r : references)
    for (const auto& t : r.tokens) ref_words.insert(t.lower);
  std::size_t hit = 0;
  for (const auto& w : ks.words) hit += ref_words.count(w.lower);
  return double(hit) / double(ks.words.size());
}

inline nlohmann::json to_json(const KeywordSet& ks) {
  nlohmann::json j;
  j["method"] = std::string(to_string(ks.method));
  j["requested"] = ks.requested_count;
  j["words"] = nlohmann::json::array();
  for (const auto& w : ks.words) j["words"].push_back({{"w", w.lower}, {"score", w.score}});
  return j;
}

}  // namespace msc

#endif  // MSC_KEYWORDS_HPP
