#ifndef MSC_ILP_HPP
#define MSC_ILP_HPP

// Keyword-aware compression model over a labelled word graph:
//
//   minimize  sum_{(i,j) in A} w(i,j) x_ij  -  c sum_{k in K} b_k
//
// subject to flow conservation (one active in-arc and out-arc per used
// vertex, closed by an auxiliary end->begin arc), P_min <= #words <= P_max,
// b_k <= sum_{v in V(k)} y_v, y_begin = 1, MTZ ordering with M = |V|, and
// optional no-good cuts. The model is solved exactly by depth-first
// branch-and-bound over simple begin->end paths and can be exported in
// CPLEX LP format for an external solver.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <deque>
#include <limits>
#include <optional>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "msc/keywords.hpp"
#include "msc/text.hpp"
#include "msc/wordgraph.hpp"

namespace msc {

inline constexpr double kObjectiveTolerance = 1e-9;

class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Verb detection by POS tag. Entries ending in '*' match as prefixes.
class VerbTags {
 public:
  VerbTags() : VerbTags({"V*", "AUX"}) {}
  VerbTags(std::initializer_list<std::string> tags) : tags_(tags) {}
  explicit VerbTags(std::vector<std::string> tags) : tags_(std::move(tags)) {}

  bool matches(std::string_view pos) const {
    for (const auto& t : tags_) {
      if (!t.empty() && t.back() == '*') {
        if (pos.substr(0, t.size() - 1) == std::string_view(t).substr(0, t.size() - 1)) return true;
      } else if (pos == t) {
        return true;
      }
    }
    return false;
  }
  const std::vector<std::string>& tags() const { return tags_; }

 private:
  std::vector<std::string> tags_;
};

struct SolverConfig {
  int nbest = 50;
  bool require_verb = true;
  VerbTags verb_tags;
  // Zero means unlimited.
  std::chrono::milliseconds time_limit{0};
  std::uint64_t node_limit = 0;
};

// Excludes one arc set S: sum_{(i,j) in S} x_ij <= |S| - 1.
struct NoGoodCut {
  std::vector<std::pair<int, int>> arcs;
};

class CompressionModel {
 public:
  // The graph must outlive the model.
  CompressionModel(const WordGraph& g, const LabelAssignment& la, int p_min, std::optional<int> p_max, double c)
      : graph_(&g), labels_(la.labels), label_count_(la.label_count), p_min_(p_min), p_max_(p_max), c_(c) {
    if (labels_.size() != g.vertex_count()) throw ModelError("label assignment does not match the graph");
    if (p_min < 1) throw ModelError("P_min must be >= 1");
    if (p_max && *p_max < p_min) throw ModelError("P_max must be >= P_min");
    if (!(c >= 0.0) || !std::isfinite(c)) throw ModelError("keyword bonus must be finite and >= 0");
    const int words = static_cast<int>(g.vertex_count()) - 2;
    if (p_min > words)
      throw ModelError("P_min = " + std::to_string(p_min) + " exceeds the " + std::to_string(words) +
                       " word vertices of the graph");
    vertices_of_label_.resize(label_count_ + 1);
    for (std::size_t v = 0; v < labels_.size(); ++v) {
      const int k = labels_[v];
      if (k < 0 || k > label_count_) throw ModelError("label out of range on vertex " + std::to_string(v));
      if (k > 0) {
        if (g.vertex(static_cast<int>(v)).is_sentinel()) throw ModelError("sentinel vertices cannot carry labels");
        vertices_of_label_[k].push_back(static_cast<int>(v));
      }
    }
  }

  const WordGraph& graph() const { return *graph_; }
  int label_of(int v) const { return labels_[v]; }
  const std::vector<int>& labels() const { return labels_; }
  int label_count() const { return label_count_; }
  // V(k) for k = 1..label_count(); entry 0 is empty.
  const std::vector<std::vector<int>>& vertices_of_label() const { return vertices_of_label_; }
  int p_min() const { return p_min_; }
  std::optional<int> p_max() const { return p_max_; }
  double bonus() const { return c_; }
  int big_m() const { return static_cast<int>(graph_->vertex_count()); }

  std::size_t arc_var_count() const { return graph_->arc_count(); }
  std::size_t vertex_var_count() const { return graph_->vertex_count(); }
  std::size_t label_var_count() const { return static_cast<std::size_t>(label_count_); }

  const std::vector<NoGoodCut>& cuts() const { return cuts_; }
  void add_cut(NoGoodCut cut) { cuts_.push_back(std::move(cut)); }

 private:
  const WordGraph* graph_;
  std::vector<int> labels_;
  int label_count_;
  std::vector<std::vector<int>> vertices_of_label_;
  int p_min_;
  std::optional<int> p_max_;
  double c_;
  std::vector<NoGoodCut> cuts_;
};

inline CompressionModel build_model(const WordGraph& g, const LabelAssignment& la, int p_min,
                                    std::optional<int> p_max, double c) {
  return CompressionModel(g, la, p_min, p_max, c);
}

// Maximum length from a compression-ratio target: ceil(ratio * average
// source sentence length). std::nullopt ratio means unbounded.
inline std::optional<int> pmax_from_ratio(std::optional<double> ratio, double avg_sentence_len) {
  if (!ratio) return std::nullopt;
  return static_cast<int>(std::ceil(*ratio * avg_sentence_len - 1e-9));
}

struct Solution {
  std::vector<int> vertices;
  std::vector<std::pair<int, int>> arcs;
  double objective = 0.0;
  std::vector<int> labels_used;
  int word_count = 0;
  std::vector<std::string> tokens;
  std::vector<std::string> pos;

  std::string text() const { return text::join(tokens, " "); }
};

// Builds a Solution for a begin..end vertex sequence, computing the
// objective by summing arc weights in path order.
inline Solution make_solution(const CompressionModel& m, const std::vector<int>& path) {
  const auto& g = m.graph();
  Solution s;
  s.vertices = path;
  double cost = 0.0;
  std::set<int> labels;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const auto& v = g.vertex(path[i]);
    if (!v.is_sentinel()) {
      ++s.word_count;
      s.tokens.push_back(v.surface);
      s.pos.push_back(v.pos);
    }
    if (m.label_of(v.id) > 0) labels.insert(m.label_of(v.id));
    if (i + 1 < path.size()) {
      const auto arc = g.find_arc(path[i], path[i + 1]);
      if (!arc) throw std::logic_error("path uses a missing arc");
      cost += g.arc(*arc).weight;
      s.arcs.emplace_back(path[i], path[i + 1]);
    }
  }
  s.labels_used.assign(labels.begin(), labels.end());
  s.objective = cost - m.bonus() * double(s.labels_used.size());
  return s;
}

// Ranking used everywhere solutions are ordered: objective (within
// tolerance), then fewer words, then tokens, then vertex ids.
inline bool ranks_before(const Solution& a, const Solution& b) {
  if (a.objective < b.objective - kObjectiveTolerance) return true;
  if (b.objective < a.objective - kObjectiveTolerance) return false;
  if (a.word_count != b.word_count) return a.word_count < b.word_count;
  if (a.tokens != b.tokens) return a.tokens < b.tokens;
  return a.vertices < b.vertices;
}

inline bool has_verb(const Solution& s, const VerbTags& tags) {
  return std::any_of(s.pos.begin(), s.pos.end(), [&](const std::string& p) { return tags.matches(p); });
}

class SolverTimeout : public std::runtime_error {
 public:
  SolverTimeout(std::vector<Solution> incumbents, double bound)
      : std::runtime_error("solver limit reached before optimality was proven"),
        incumbents_(std::move(incumbents)),
        bound_(bound) {}

  // Best solutions found so far, ranked.
  const std::vector<Solution>& incumbents() const { return incumbents_; }
  // Lower bound on the optimal objective.
  double bound() const { return bound_; }

 private:
  std::vector<Solution> incumbents_;
  double bound_;
};

// Admissible lower bound on the cost of completing a partial path at
// vertex v: min over m of max(Dr(v), t_(m)) - c m, where Dr(v) is the
// cheapest walk to end with at least r more words (r = words still needed
// to reach P_min), and t_(m) is the m-th smallest cost of a walk v -> x ->
// end through some vertex x carrying a not-yet-collected label.
class CompletionBound {
 public:
  static constexpr double kInf = std::numeric_limits<double>::infinity();
  // Above this size the all-pairs detour table is skipped.
  static constexpr std::size_t kMaxDetourVertices = 4000;

  explicit CompletionBound(const CompressionModel& m) : m_(&m) {
    const auto& g = m.graph();
    const std::size_t n = g.vertex_count();
    const int end = g.end_id();
    const int begin = g.begin_id();
    const auto usable = [&](const Arc& a) { return a.to != begin && a.from != end; };

    dist_to_end_ = dijkstra(end, /*reverse=*/true);

    const int rmax = m.p_min();
    at_least_.assign(rmax + 1, std::vector<double>(n, kInf));
    at_least_[0] = dist_to_end_;
    for (int r = 1; r <= rmax; ++r)
      for (std::size_t v = 0; v < n; ++v) {
        double best = kInf;
        for (int ai : g.out_arcs(static_cast<int>(v))) {
          const auto& a = g.arc(ai);
          if (!usable(a) || a.to == end) continue;
          best = std::min(best, a.weight + at_least_[r - 1][a.to]);
        }
        at_least_[r][v] = best;
      }

    min_words_.assign(n, std::numeric_limits<int>::max());
    std::deque<int> q;
    min_words_[end] = 0;
    q.push_back(end);
    while (!q.empty()) {
      const int u = q.front();
      q.pop_front();
      const int through_u = min_words_[u] + (g.vertex(u).is_sentinel() ? 0 : 1);
      for (int ai : g.in_arcs(u)) {
        const auto& a = g.arc(ai);
        if (!usable(a)) continue;
        if (through_u < min_words_[a.from]) {
          min_words_[a.from] = through_u;
          q.push_back(a.from);
        }
      }
    }

    if (m.label_count() > 0 && m.bonus() > 0.0 && n <= kMaxDetourVertices) {
      through_label_.assign(m.label_count() + 1, std::vector<double>(n, kInf));
      for (std::size_t x = 0; x < n; ++x) {
        const int k = m.label_of(static_cast<int>(x));
        if (k == 0 || dist_to_end_[x] == kInf) continue;
        const auto to_x = dijkstra(static_cast<int>(x), /*reverse=*/true);
        for (std::size_t v = 0; v < n; ++v)
          through_label_[k][v] = std::min(through_label_[k][v], to_x[v] + dist_to_end_[x]);
      }
    }
  }

  // `words` counts words on the partial path including v; `label_used`
  // flags labels already collected (including v's).
  double operator()(int v, int words, const std::vector<char>& label_used) const {
    const auto& m = *m_;
    const int need = std::max(0, m.p_min() - words);
    const double base = at_least_[std::min<int>(need, m.p_min())][v];
    if (base == kInf) return kInf;
    const double c = m.bonus();
    if (c == 0.0 || m.label_count() == 0) return base;
    int cap = m.label_count();
    if (m.p_max()) cap = std::min(cap, std::max(0, *m.p_max() - words));
    if (through_label_.empty()) {
      int open = 0;
      for (int k = 1; k <= m.label_count(); ++k) open += label_used[k] ? 0 : 1;
      return base - c * std::min(open, cap);
    }
    thread_local std::vector<double> t;
    t.clear();
    for (int k = 1; k <= m.label_count(); ++k)
      if (!label_used[k] && through_label_[k][v] < kInf) t.push_back(through_label_[k][v]);
    std::sort(t.begin(), t.end());
    double best = base;
    const int mmax = std::min<int>(cap, static_cast<int>(t.size()));
    for (int i = 1; i <= mmax; ++i) best = std::min(best, std::max(base, t[i - 1]) - c * i);
    return best;
  }

  // Fewest words on any path from v to end, v itself excluded.
  int min_words_to_end(int v) const { return min_words_[v]; }
  double dist_to_end(int v) const { return dist_to_end_[v]; }

 private:
  std::vector<double> dijkstra(int source, bool reverse) const {
    const auto& g = m_->graph();
    const int begin = g.begin_id(), end = g.end_id();
    std::vector<double> dist(g.vertex_count(), kInf);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[source] = 0.0;
    pq.emplace(0.0, source);
    while (!pq.empty()) {
      const auto [d, u] = pq.top();
      pq.pop();
      if (d > dist[u]) continue;
      for (int ai : reverse ? g.in_arcs(u) : g.out_arcs(u)) {
        const auto& a = g.arc(ai);
        if (a.to == begin || a.from == end) continue;
        const int nb = reverse ? a.from : a.to;
        if (d + a.weight < dist[nb]) {
          dist[nb] = d + a.weight;
          pq.emplace(dist[nb], nb);
        }
      }
    }
    return dist;
  }

  const CompressionModel* m_;
  std::vector<double> dist_to_end_;
  std::vector<std::vector<double>> at_least_;
  std::vector<int> min_words_;
  std::vector<std::vector<double>> through_label_;
};

namespace detail {

// Depth-first branch-and-bound keeping the `capacity` best complete paths.
// Children are explored in order of increasing bound; a child is pruned
// once its bound exceeds the current capacity-th best objective.
class PathSearch {
 public:
  PathSearch(const CompressionModel& m, const SolverConfig& cfg, std::size_t capacity)
      : m_(m), g_(m.graph()), cfg_(cfg), capacity_(capacity), bound_(m) {
    const std::size_t n = g_.vertex_count();
    visited_.assign(n, 0);
    label_count_.assign(m.label_count() + 1, 0);
    label_used_.assign(m.label_count() + 1, 0);
    verb_.assign(n, 0);
    for (std::size_t v = 0; v < n; ++v) {
      const auto& vx = g_.vertex(static_cast<int>(v));
      verb_[v] = !vx.is_sentinel() && cfg.verb_tags.matches(vx.pos);
    }
    reaches_verb_ = verb_;
    // Backward closure: v reaches a verb vertex if any successor does.
    std::vector<int> stack;
    for (std::size_t v = 0; v < n; ++v)
      if (verb_[v]) stack.push_back(static_cast<int>(v));
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int ai : g_.in_arcs(u)) {
        const int p = g_.arc(ai).from;
        if (!reaches_verb_[p]) {
          reaches_verb_[p] = 1;
          stack.push_back(p);
        }
      }
    }
    for (const auto& cut : m.cuts()) {
      std::vector<int> ids;
      for (const auto& [a, b] : cut.arcs) {
        const auto idx = g_.find_arc(a, b);
        if (!idx) {
          ids.clear();
          ids.push_back(-1);
          break;
        }
        ids.push_back(*idx);
      }
      cut_arcs_.push_back(std::move(ids));
    }
    on_path_arc_.assign(g_.arc_count(), 0);
  }

  // Returns true when the search finished (optimality proven).
  bool run() {
    start_ = std::chrono::steady_clock::now();
    const int begin = g_.begin_id();
    if (!cfg_.require_verb || reaches_verb_[begin]) {
      enter(begin);
      const double root = bound_(begin, 0, label_used_);
      if (root < std::numeric_limits<double>::infinity()) dfs(begin, 0.0, 0, false);
    }
    return !aborted_;
  }

  const std::vector<Solution>& best() const { return best_; }

  double lower_bound() const {
    double b = open_bound_;
    if (!best_.empty()) b = std::min(b, best_.front().objective);
    return b;
  }

 private:
  struct Child {
    double bound;
    int to;
    int arc;
  };

  void enter(int v) {
    visited_[v] = 1;
    path_.push_back(v);
    const int k = m_.label_of(v);
    if (k > 0 && label_count_[k]++ == 0) {
      label_used_[k] = 1;
      ++collected_;
    }
  }

  void leave(int v) {
    visited_[v] = 0;
    path_.pop_back();
    const int k = m_.label_of(v);
    if (k > 0 && --label_count_[k] == 0) {
      label_used_[k] = 0;
      --collected_;
    }
  }

  double threshold() const {
    if (best_.size() < capacity_) return std::numeric_limits<double>::infinity();
    return best_.back().objective + kObjectiveTolerance;
  }

  bool out_of_budget() {
    ++nodes_;
    if (cfg_.node_limit && nodes_ > cfg_.node_limit) return true;
    if (cfg_.time_limit.count() > 0 && (nodes_ & 1023) == 0 &&
        std::chrono::steady_clock::now() - start_ > cfg_.time_limit)
      return true;
    return false;
  }

  bool violates_cut() const {
    for (const auto& ids : cut_arcs_) {
      if (!ids.empty() && ids.front() == -1) continue;
      if (std::all_of(ids.begin(), ids.end(), [&](int a) { return on_path_arc_[a] != 0; })) return true;
    }
    return false;
  }

  void complete(int words, bool verb) {
    if (words < m_.p_min()) return;
    if (m_.p_max() && words > *m_.p_max()) return;
    if (cfg_.require_verb && !verb) return;
    if (violates_cut()) return;
    auto sol = make_solution(m_, path_);
    auto pos = std::lower_bound(best_.begin(), best_.end(), sol, ranks_before);
    if (best_.size() >= capacity_ && pos == best_.end()) return;
    best_.insert(pos, std::move(sol));
    if (best_.size() > capacity_) best_.pop_back();
  }

  void dfs(int v, double cost, int words, bool verb) {
    if (v == g_.end_id()) {
      complete(words, verb);
      return;
    }
    if (aborted_ || out_of_budget()) {
      aborted_ = true;
      open_bound_ = std::min(open_bound_, cost - m_.bonus() * collected_ + bound_(v, words, label_used_));
      return;
    }
    std::vector<Child> children;
    for (int ai : g_.out_arcs(v)) {
      const auto& a = g_.arc(ai);
      const int u = a.to;
      if (visited_[u] || u == g_.begin_id()) continue;
      const bool word = !g_.vertex(u).is_sentinel();
      const int w2 = words + (word ? 1 : 0);
      if (m_.p_max() && w2 + bound_.min_words_to_end(u) > *m_.p_max()) continue;
      if (cfg_.require_verb && !verb && !reaches_verb_[u]) continue;
      const int k = m_.label_of(u);
      const bool fresh = k > 0 && !label_used_[k];
      if (fresh) label_used_[k] = 1;
      // Objective lower bound: weights so far, minus the bonus already
      // earned, plus the completion bound from u.
      const double b = cost + a.weight - m_.bonus() * (collected_ + (fresh ? 1 : 0)) + bound_(u, w2, label_used_);
      if (fresh) label_used_[k] = 0;
      if (b == std::numeric_limits<double>::infinity()) continue;
      children.push_back({b, u, ai});
    }
    std::sort(children.begin(), children.end(), [](const Child& x, const Child& y) {
      return x.bound != y.bound ? x.bound < y.bound : x.to < y.to;
    });
    for (const auto& ch : children) {
      if (aborted_) {
        open_bound_ = std::min(open_bound_, ch.bound);
        continue;
      }
      if (ch.bound > threshold()) break;
      const auto& a = g_.arc(ch.arc);
      enter(ch.to);
      on_path_arc_[ch.arc] = 1;
      dfs(ch.to, cost + a.weight, words + (g_.vertex(ch.to).is_sentinel() ? 0 : 1), verb || verb_[ch.to]);
      on_path_arc_[ch.arc] = 0;
      leave(ch.to);
    }
  }

  const CompressionModel& m_;
  const WordGraph& g_;
  const SolverConfig& cfg_;
  std::size_t capacity_;
  CompletionBound bound_;
  std::vector<char> visited_;
  std::vector<int> label_count_;
  std::vector<char> label_used_;
  std::vector<char> verb_;
  std::vector<char> reaches_verb_;
  std::vector<std::vector<int>> cut_arcs_;
  std::vector<char> on_path_arc_;
  std::vector<int> path_;
  std::vector<Solution> best_;
  std::chrono::steady_clock::time_point start_;
  std::uint64_t nodes_ = 0;
  int collected_ = 0;
  bool aborted_ = false;
  double open_bound_ = std::numeric_limits<double>::infinity();
};

}  // namespace detail

// Optimal simple begin->end path, or std::nullopt when infeasible. Throws
// SolverTimeout (with the incumbent, if any) when a limit is hit.
inline std::optional<Solution> solve_exact(const CompressionModel& m, const SolverConfig& cfg) {
  detail::PathSearch search(m, cfg, 1);
  if (!search.run()) throw SolverTimeout(search.best(), search.lower_bound());
  if (search.best().empty()) return std::nullopt;
  return search.best().front();
}

// The nbest best solutions with pairwise-distinct arc sets, ranked. The
// search keeps a bounded list of incumbents, which yields the same list as
// re-solving nbest times with a no-good cut after each solution and
// discarding (while still cutting) solutions without a verb.
inline std::vector<Solution> enumerate_nbest(const CompressionModel& m, const SolverConfig& cfg) {
  if (cfg.nbest < 1) throw std::invalid_argument("nbest must be >= 1");
  detail::PathSearch search(m, cfg, static_cast<std::size_t>(cfg.nbest));
  if (!search.run()) throw SolverTimeout(search.best(), search.lower_bound());
  return search.best();
}

inline NoGoodCut no_good_cut(const Solution& s) { return NoGoodCut{s.arcs}; }

struct VerificationReport {
  bool ok = true;
  std::string violation;
  std::string detail;

  explicit operator bool() const { return ok; }
};

// Independent re-check of every constraint class against a Solution, plus
// a from-scratch objective recomputation. Reports the first violation.
inline VerificationReport verify_solution(const CompressionModel& m, const Solution& s) {
  const auto& g = m.graph();
  const auto fail = [](std::string what, std::string detail) {
    return VerificationReport{false, std::move(what), std::move(detail)};
  };
  const int n = static_cast<int>(g.vertex_count());
  if (s.vertices.empty() || s.vertices.front() != g.begin_id())
    return fail("begin-vertex violation", "path must start at the begin vertex");
  if (s.vertices.back() != g.end_id()) return fail("end-vertex violation", "path must finish at the end vertex");
  for (int v : s.vertices)
    if (v < 0 || v >= n) return fail("vertex-range violation", "vertex " + std::to_string(v) + " is not in the graph");

  std::vector<int> seen(n, 0);
  for (int v : s.vertices)
    if (seen[v]++) return fail("simple-path violation", "vertex " + std::to_string(v) + " is visited twice");

  // Arc variables: the listed arcs plus the end->begin closure.
  std::vector<int> out_deg(n, 0), in_deg(n, 0);
  for (const auto& [a, b] : s.arcs) {
    if (a < 0 || a >= n || b < 0 || b >= n || !g.find_arc(a, b))
      return fail("arc-existence violation", "arc " + std::to_string(a) + "->" + std::to_string(b) + " is not in the graph");
    ++out_deg[a];
    ++in_deg[b];
  }
  ++out_deg[g.end_id()];
  ++in_deg[g.begin_id()];
  for (int v = 0; v < n; ++v) {
    const int y = seen[v];
    if (out_deg[v] != y || in_deg[v] != y)
      return fail("flow-conservation violation", "vertex " + std::to_string(v) + " has in/out degree " +
                                                     std::to_string(in_deg[v]) + "/" + std::to_string(out_deg[v]) +
                                                     " but y = " + std::to_string(y));
  }
  if (s.arcs.size() + 1 != s.vertices.size())
    return fail("arc-list mismatch", "arc list does not match the vertex sequence");
  for (std::size_t i = 0; i + 1 < s.vertices.size(); ++i)
    if (s.arcs[i] != std::make_pair(s.vertices[i], s.vertices[i + 1]))
      return fail("arc-list mismatch", "arc " + std::to_string(i) + " does not follow the vertex sequence");

  int words = 0;
  for (int v : s.vertices) words += g.vertex(v).is_sentinel() ? 0 : 1;
  if (words < m.p_min()) return fail("length violation", std::to_string(words) + " words < P_min");
  if (m.p_max() && words > *m.p_max()) return fail("length violation", std::to_string(words) + " words > P_max");
  if (words != s.word_count)
    return fail("word-count mismatch", "reported " + std::to_string(s.word_count) + ", actual " + std::to_string(words));

  std::set<int> distinct(s.labels_used.begin(), s.labels_used.end());
  if (distinct.size() != s.labels_used.size()) return fail("label-linking violation", "label listed twice");
  for (int k : s.labels_used) {
    if (k < 1 || k > m.label_count()) return fail("label-linking violation", "label " + std::to_string(k) + " does not exist");
    int covered = 0;
    for (int v : m.vertices_of_label()[k]) covered += seen[v];
    if (covered < 1) return fail("label-linking violation", "label " + std::to_string(k) + " has no vertex on the path");
  }
  // An optimal assignment sets b_k for every label the path covers.
  for (int v : s.vertices)
    if (const int k = m.label_of(v); k > 0 && !distinct.count(k))
      return fail("label-set mismatch", "label " + std::to_string(k) + " is covered but not counted");

  // MTZ with u = position + 1.
  std::vector<int> order(n, 0);
  for (std::size_t i = 0; i < s.vertices.size(); ++i) order[s.vertices[i]] = static_cast<int>(i) + 1;
  const int M = m.big_m();
  for (const auto& [a, b] : s.arcs) {
    if (b == g.begin_id()) continue;
    if (order[a] < 1 || order[a] > M || order[b] < 1 || order[b] > M || order[a] - order[b] + 1 > 0)
      return fail("subtour violation", "MTZ order violated on arc " + std::to_string(a) + "->" + std::to_string(b));
  }

  for (std::size_t ci = 0; ci < m.cuts().size(); ++ci) {
    const auto& cut = m.cuts()[ci];
    const bool all = std::all_of(cut.arcs.begin(), cut.arcs.end(), [&](const std::pair<int, int>& arc) {
      return std::find(s.arcs.begin(), s.arcs.end(), arc) != s.arcs.end();
    });
    if (all && !cut.arcs.empty()) return fail("no-good violation", "solution repeats excluded solution " + std::to_string(ci));
  }

  double cost = 0.0;
  for (const auto& [a, b] : s.arcs) cost += g.arc(*g.find_arc(a, b)).weight;
  const double objective = cost - m.bonus() * double(s.labels_used.size());
  if (std::abs(objective - s.objective) > kObjectiveTolerance)
    return fail("objective mismatch", "reported " + std::to_string(s.objective) + ", recomputed " + std::to_string(objective));

  std::vector<std::string> tokens;
  for (int v : s.vertices)
    if (!g.vertex(v).is_sentinel()) tokens.push_back(g.vertex(v).surface);
  if (tokens != s.tokens) return fail("token mismatch", "tokens do not match the vertex sequence");
  return {};
}

namespace detail {

inline std::string lp_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string xvar(int a, int b) { return "x_" + std::to_string(a) + "_" + std::to_string(b); }

// Appends a linear term list, wrapping long rows.
class LpRow {
 public:
  explicit LpRow(std::string head) : text_(" " + std::move(head) + ":") {}

  void add(double coef, const std::string& var) {
    if (coef == 0.0) return;
    text_ += coef < 0 ? " -" : " +";
    const double mag = std::abs(coef);
    if (mag != 1.0) text_ += " " + lp_number(mag);
    text_ += " " + var;
    if (++terms_ % 8 == 0) text_ += "\n  ";
  }
  std::string finish(std::string_view rhs = {}) {
    return text_ + std::string(rhs) + "\n";
  }

 private:
  std::string text_;
  int terms_ = 0;
};

}  // namespace detail

// CPLEX LP text. Variable names: x_i_j per arc (plus the closure arc
// x_end_begin), y_v per vertex, b_k per label, u_v MTZ order per vertex.
inline std::string export_lp(const CompressionModel& m) {
  const auto& g = m.graph();
  const int n = static_cast<int>(g.vertex_count());
  const int begin = g.begin_id(), end = g.end_id();
  const int M = m.big_m();
  const std::string closure = detail::xvar(end, begin);
  std::string out = "\\ multi-sentence compression model\n";
  out += "\\ vertices " + std::to_string(n) + ", arcs " + std::to_string(g.arc_count()) + ", labels " +
         std::to_string(m.label_count()) + "\n";
  out += "Minimize\n";
  {
    detail::LpRow obj("obj");
    for (const auto& a : g.arcs()) obj.add(a.weight, detail::xvar(a.from, a.to));
    if (m.bonus() > 0.0)
      for (int k = 1; k <= m.label_count(); ++k) obj.add(-m.bonus(), "b_" + std::to_string(k));
    out += obj.finish();
  }
  out += "Subject To\n";
  for (int v = 0; v < n; ++v) {
    detail::LpRow row("out_" + std::to_string(v));
    for (int ai : g.out_arcs(v)) row.add(1.0, detail::xvar(v, g.arc(ai).to));
    if (v == end) row.add(1.0, closure);
    row.add(-1.0, "y_" + std::to_string(v));
    out += row.finish(" = 0");
  }
  for (int v = 0; v < n; ++v) {
    detail::LpRow row("in_" + std::to_string(v));
    for (int ai : g.in_arcs(v)) row.add(1.0, detail::xvar(g.arc(ai).from, v));
    if (v == begin) row.add(1.0, closure);
    row.add(-1.0, "y_" + std::to_string(v));
    out += row.finish(" = 0");
  }
  {
    detail::LpRow lo("pmin");
    for (int v = 0; v < n; ++v)
      if (!g.vertex(v).is_sentinel()) lo.add(1.0, "y_" + std::to_string(v));
    out += lo.finish(" >= " + std::to_string(m.p_min()));
  }
  if (m.p_max()) {
    detail::LpRow hi("pmax");
    for (int v = 0; v < n; ++v)
      if (!g.vertex(v).is_sentinel()) hi.add(1.0, "y_" + std::to_string(v));
    out += hi.finish(" <= " + std::to_string(*m.p_max()));
  }
  for (int k = 1; k <= m.label_count(); ++k) {
    detail::LpRow row("label_" + std::to_string(k));
    for (int v : m.vertices_of_label()[k]) row.add(1.0, "y_" + std::to_string(v));
    row.add(-1.0, "b_" + std::to_string(k));
    out += row.finish(" >= 0");
  }
  out += " begin: y_" + std::to_string(begin) + " = 1\n";
  for (const auto& a : g.arcs()) {
    if (a.to == begin) continue;
    detail::LpRow row("mtz_" + std::to_string(a.from) + "_" + std::to_string(a.to));
    row.add(1.0, "u_" + std::to_string(a.from));
    row.add(-1.0, "u_" + std::to_string(a.to));
    row.add(double(M), detail::xvar(a.from, a.to));
    out += row.finish(" <= " + std::to_string(M - 1));
  }
  for (std::size_t ci = 0; ci < m.cuts().size(); ++ci) {
    const auto& cut = m.cuts()[ci];
    detail::LpRow row("cut_" + std::to_string(ci));
    for (const auto& [a, b] : cut.arcs) row.add(1.0, detail::xvar(a, b));
    out += row.finish(" <= " + std::to_string(static_cast<long>(cut.arcs.size()) - 1));
  }
  out += "Bounds\n";
  out += " u_" + std::to_string(begin) + " = 1\n";
  for (int v = 0; v < n; ++v)
    if (v != begin) out += " 1 <= u_" + std::to_string(v) + " <= " + std::to_string(M) + "\n";
  out += "Binaries\n";
  for (const auto& a : g.arcs()) out += " " + detail::xvar(a.from, a.to) + "\n";
  out += " " + closure + "\n";
  for (int v = 0; v < n; ++v) out += " y_" + std::to_string(v) + "\n";
  for (int k = 1; k <= m.label_count(); ++k) out += " b_" + std::to_string(k) + "\n";
  out += "Generals\n";
  for (int v = 0; v < n; ++v) out += " u_" + std::to_string(v) + "\n";
  out += "End\n";
  return out;
}

inline nlohmann::json to_json(const Solution& s) {
  nlohmann::json j;
  j["tokens"] = s.tokens;
  j["pos"] = s.pos;
  j["objective"] = s.objective;
  j["labels_used"] = s.labels_used;
  j["word_count"] = s.word_count;
  j["vertices"] = s.vertices;
  j["text"] = s.text();
  return j;
}

}  // namespace msc

#endif  // MSC_ILP_HPP
