#ifndef MSC_RERANK_HPP
#define MSC_RERANK_HPP

// Keyword-bonus calibration, length-normalised final selection and an
// n-gram POS language model for grammaticality reranking.

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "msc/ilp.hpp"
#include "msc/text.hpp"
#include "msc/wordgraph.hpp"

namespace msc {

struct BonusPolicy {
  enum class Kind { geometric_mean, arithmetic_mean, median, fixed };
  Kind kind = Kind::geometric_mean;
  double fixed_value = 0.0;
};

inline BonusPolicy parse_bonus_policy(std::string_view s) {
  if (s == "geometric" || s == "geometric_mean") return {BonusPolicy::Kind::geometric_mean};
  if (s == "arithmetic" || s == "arithmetic_mean") return {BonusPolicy::Kind::arithmetic_mean};
  if (s == "median") return {BonusPolicy::Kind::median};
  // "fixed:<value>" or a bare number.
  std::string_view v = s;
  if (v.rfind("fixed:", 0) == 0) v.remove_prefix(6);
  try {
    std::size_t used = 0;
    const double x = std::stod(std::string(v), &used);
    if (used == v.size() && x >= 0.0 && std::isfinite(x)) return {BonusPolicy::Kind::fixed, x};
  } catch (const std::exception&) {
  }
  throw std::invalid_argument("unknown bonus policy '" + std::string(s) + "'");
}

inline double keyword_bonus(const std::vector<double>& weights, const BonusPolicy& p) {
  if (weights.empty()) throw std::invalid_argument("keyword bonus needs at least one arc weight");
  switch (p.kind) {
    case BonusPolicy::Kind::geometric_mean: {
      double log_sum = 0.0;
      for (double w : weights) log_sum += std::log(w);
      return std::exp(log_sum / double(weights.size()));
    }
    case BonusPolicy::Kind::arithmetic_mean:
      return std::accumulate(weights.begin(), weights.end(), 0.0) / double(weights.size());
    case BonusPolicy::Kind::median: {
      auto sorted = weights;
      std::sort(sorted.begin(), sorted.end());
      const std::size_t n = sorted.size();
      return n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    }
    case BonusPolicy::Kind::fixed:
      if (p.fixed_value < 0.0) throw std::invalid_argument("fixed keyword bonus must be >= 0");
      return p.fixed_value;
  }
  return 0.0;
}

inline double keyword_bonus(const WordGraph& g, const BonusPolicy& p) {
  std::vector<double> weights;
  weights.reserve(g.arc_count());
  for (const auto& a : g.arcs()) weights.push_back(a.weight);
  return keyword_bonus(weights, p);
}

// log of exp(objective) / word_count.
inline double log_normalized_score(const Solution& s) { return s.objective - std::log(double(s.word_count)); }

inline bool normalized_before(const Solution& a, const Solution& b) {
  const double la = log_normalized_score(a), lb = log_normalized_score(b);
  if (la != lb) return la < lb;
  if (a.word_count != b.word_count) return a.word_count < b.word_count;
  if (a.tokens != b.tokens) return a.tokens < b.tokens;
  return a.vertices < b.vertices;
}

// Orders solutions by exp(objective) / word_count, evaluated in the log
// domain.
inline std::vector<Solution> rank_normalized(std::vector<Solution> solutions) {
  for (const auto& s : solutions)
    if (s.word_count <= 0) throw std::invalid_argument("solution without words");
  std::stable_sort(solutions.begin(), solutions.end(), normalized_before);
  return solutions;
}

inline Solution select_best(const std::vector<Solution>& solutions) {
  if (solutions.empty()) throw std::invalid_argument("select_best: empty solution list");
  const Solution* best = &solutions.front();
  for (const auto& s : solutions) {
    if (s.word_count <= 0) throw std::invalid_argument("solution without words");
    if (normalized_before(s, *best)) best = &s;
  }
  return *best;
}

// N-gram model over POS tags with "stupid backoff": an unseen n-gram
// scores backoff() times the score of its shortened context. Unigrams use
// add-one estimates with one reserved unknown type so every score is in
// (0, 1].
class PosLm {
 public:
  static constexpr const char* kBos = "<s>";
  static constexpr const char* kEos = "</s>";

  explicit PosLm(int order = 7, double backoff = 0.4) : order_(order), backoff_(backoff) {
    if (order < 1) throw std::invalid_argument("POS-LM order must be >= 1");
    if (!(backoff > 0.0 && backoff <= 1.0)) throw std::invalid_argument("backoff factor must be in (0, 1]");
  }

  int order() const { return order_; }
  double backoff() const { return backoff_; }

  void add_sentence(const std::vector<std::string>& tags) {
    const auto seq = padded(tags);
    for (std::size_t i = 0; i < seq.size(); ++i)
      for (int n = 1; n <= order_ && i + n <= seq.size(); ++n) {
        std::string key;
        for (int k = 0; k < n; ++k) {
          if (k) key.push_back(' ');
          key += seq[i + k];
        }
        ++counts_[key];
      }
    for (std::size_t i = 1; i < seq.size(); ++i) {
      ++predicted_tokens_;
      vocab_.insert(seq[i]);
    }
  }

  bool empty() const { return predicted_tokens_ == 0; }

  // Score of `tag` after `history` (most recent last).
  double score(const std::vector<std::string>& history, const std::string& tag) const {
    const std::size_t max_ctx = std::min<std::size_t>(history.size(), order_ - 1);
    double factor = 1.0;
    for (std::size_t len = max_ctx; len >= 1; --len) {
      std::string ctx;
      for (std::size_t k = history.size() - len; k < history.size(); ++k) {
        if (!ctx.empty()) ctx.push_back(' ');
        ctx += history[k];
      }
      const auto full = count(ctx + " " + tag);
      if (full > 0) return factor * double(full) / double(count(ctx));
      factor *= backoff_;
    }
    const double v = double(vocab_.size()) + 1.0;
    return factor * (double(count(tag)) + 1.0) / (double(predicted_tokens_) + v);
  }

  // Sum of log scores over the tags and the end marker.
  double log_score(const std::vector<std::string>& tags) const {
    const auto seq = padded(tags);
    double total = 0.0;
    std::vector<std::string> history{seq.front()};
    for (std::size_t i = 1; i < seq.size(); ++i) {
      total += std::log(score(history, seq[i]));
      history.push_back(seq[i]);
      if (history.size() >= static_cast<std::size_t>(order_)) history.erase(history.begin());
    }
    return total;
  }

  double per_token_log_score(const std::vector<std::string>& tags) const {
    return log_score(tags) / double(tags.size() + 1);
  }

  // Text form: header lines then "<count>\t<n-gram>" sorted by n-gram.
  void save(std::ostream& out) const {
    out << "#poslm order " << order_ << " backoff " << text_number(backoff_) << " tokens " << predicted_tokens_
        << "\n";
    out << "#vocab";
    for (const auto& v : vocab_) out << ' ' << v;
    out << "\n";
    for (const auto& [k, c] : counts_) out << c << '\t' << k << '\n';
  }

  static PosLm load(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw ParseError("POS-LM: empty model file");
    std::istringstream hs(header);
    std::string tag, w1, w2, w3;
    int order = 0;
    double backoff = 0.0;
    long long tokens = 0;
    if (!(hs >> tag >> w1 >> order >> w2 >> backoff >> w3 >> tokens) || tag != "#poslm")
      throw ParseError("POS-LM: bad header line");
    PosLm lm(order, backoff);
    lm.predicted_tokens_ = tokens;
    std::string line;
    if (!std::getline(in, line) || line.rfind("#vocab", 0) != 0) throw ParseError("POS-LM: missing vocabulary line");
    std::istringstream vs(line.substr(6));
    for (std::string v; vs >> v;) lm.vocab_.insert(v);
    std::size_t line_no = 2;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const auto tab = line.find('\t');
      if (tab == std::string::npos) throw ParseError("POS-LM: line " + std::to_string(line_no) + " lacks a tab");
      lm.counts_[line.substr(tab + 1)] = std::stoll(line.substr(0, tab));
    }
    return lm;
  }

 private:
  static std::string text_number(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
  }

  std::vector<std::string> padded(const std::vector<std::string>& tags) const {
    std::vector<std::string> seq;
    seq.reserve(tags.size() + 2);
    seq.emplace_back(kBos);
    seq.insert(seq.end(), tags.begin(), tags.end());
    seq.emplace_back(kEos);
    return seq;
  }

  long long count(const std::string& key) const {
    auto it = counts_.find(key);
    return it == counts_.end() ? 0 : it->second;
  }

  int order_;
  double backoff_;
  std::map<std::string, long long> counts_;
  std::set<std::string> vocab_;
  long long predicted_tokens_ = 0;
};

// One sentence of whitespace-separated POS tags per line.
inline PosLm poslm_train(std::istream& corpus, int order = 7, double backoff = 0.4) {
  PosLm lm(order, backoff);
  std::string line;
  while (std::getline(corpus, line)) {
    std::istringstream ls(line);
    std::vector<std::string> tags;
    for (std::string t; ls >> t;) tags.push_back(t);
    if (!tags.empty()) lm.add_sentence(tags);
  }
  if (lm.empty()) throw std::invalid_argument("POS-LM training corpus is empty");
  return lm;
}

// Among the first `top` solutions in normalised-score order, the one with
// the highest per-token POS log score; earlier rank wins ties.
inline Solution poslm_rerank(const std::vector<Solution>& solutions, const PosLm& lm, int top = 10) {
  if (solutions.empty()) throw std::invalid_argument("poslm_rerank: empty solution list");
  if (top < 1) throw std::invalid_argument("poslm_rerank: top must be >= 1");
  const auto ranked = rank_normalized(solutions);
  const std::size_t limit = std::min<std::size_t>(ranked.size(), static_cast<std::size_t>(top));
  std::size_t best = 0;
  double best_score = lm.per_token_log_score(ranked[0].pos);
  for (std::size_t i = 1; i < limit; ++i) {
    const double s = lm.per_token_log_score(ranked[i].pos);
    if (s > best_score) {
      best = i;
      best_score = s;
    }
  }
  return ranked[best];
}

}  // namespace msc

#endif  // MSC_RERANK_HPP
