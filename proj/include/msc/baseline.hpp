#ifndef MSC_BASELINE_HPP
#define MSC_BASELINE_HPP

// Shortest-path compression baseline: the k loopless shortest begin->end
// paths (Yen's deviation scheme), filtered by length and verb presence and
// reranked by weight per word.

#include <algorithm>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <set>
#include <utility>
#include <vector>

#include "msc/ilp.hpp"
#include "msc/wordgraph.hpp"

namespace msc {

struct PathCandidate {
  std::vector<int> vertices;
  double total_weight = 0.0;
  int word_count = 0;
  bool has_verb = false;

  double normalized_score() const { return total_weight / double(word_count); }
};

namespace detail {

inline double path_weight(const WordGraph& g, const std::vector<int>& path) {
  double w = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) w += g.arc(*g.find_arc(path[i], path[i + 1])).weight;
  return w;
}

// Dijkstra from `source` to the end vertex avoiding blocked vertices and
// arcs. Equal distances resolve towards the smaller vertex id.
inline std::optional<std::vector<int>> shortest_to_end(const WordGraph& g, int source,
                                                       const std::vector<char>& blocked_vertex,
                                                       const std::vector<char>& blocked_arc) {
  const int n = static_cast<int>(g.vertex_count());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, inf);
  std::vector<int> pred(n, -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[source] = 0.0;
  pq.emplace(0.0, source);
  while (!pq.empty()) {
    const auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u]) continue;
    if (u == g.end_id()) break;
    for (int ai : g.out_arcs(u)) {
      if (blocked_arc[ai]) continue;
      const auto& a = g.arc(ai);
      if (blocked_vertex[a.to] || a.to == g.begin_id()) continue;
      if (d + a.weight < dist[a.to]) {
        dist[a.to] = d + a.weight;
        pred[a.to] = u;
        pq.emplace(dist[a.to], a.to);
      }
    }
  }
  if (dist[g.end_id()] == inf) return std::nullopt;
  std::vector<int> path;
  for (int v = g.end_id(); v != -1; v = pred[v]) path.push_back(v);
  std::reverse(path.begin(), path.end());
  return path;
}

inline PathCandidate make_candidate(const WordGraph& g, std::vector<int> path, const VerbTags& tags) {
  PathCandidate c;
  c.total_weight = path_weight(g, path);
  for (int v : path) {
    const auto& vx = g.vertex(v);
    if (vx.is_sentinel()) continue;
    ++c.word_count;
    c.has_verb = c.has_verb || tags.matches(vx.pos);
  }
  c.vertices = std::move(path);
  return c;
}

}  // namespace detail

// Up to k loopless begin->end paths in order of total weight (ties by
// vertex-id sequence). Empty when end is unreachable.
inline std::vector<PathCandidate> k_shortest_paths(const WordGraph& g, int k, const VerbTags& tags = {}) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  const std::size_t n = g.vertex_count();
  std::vector<char> no_vertex(n, 0), no_arc(g.arc_count(), 0);
  std::vector<std::vector<int>> found;
  auto first = detail::shortest_to_end(g, g.begin_id(), no_vertex, no_arc);
  if (!first) return {};
  found.push_back(std::move(*first));

  std::set<std::pair<double, std::vector<int>>> pending;
  std::set<std::vector<int>> seen{found.front()};
  while (static_cast<int>(found.size()) < k) {
    const auto prev = found.back();
    for (std::size_t j = 0; j + 1 < prev.size(); ++j) {
      const int spur = prev[j];
      std::vector<char> blocked_vertex(n, 0), blocked_arc(g.arc_count(), 0);
      for (std::size_t r = 0; r < j; ++r) blocked_vertex[prev[r]] = 1;
      for (const auto& p : found) {
        if (p.size() > j + 1 && std::equal(prev.begin(), prev.begin() + j + 1, p.begin()))
          blocked_arc[*g.find_arc(p[j], p[j + 1])] = 1;
      }
      auto tail = detail::shortest_to_end(g, spur, blocked_vertex, blocked_arc);
      if (!tail) continue;
      std::vector<int> path(prev.begin(), prev.begin() + j);
      path.insert(path.end(), tail->begin(), tail->end());
      if (!seen.insert(path).second) continue;
      const double w = detail::path_weight(g, path);
      pending.emplace(w, std::move(path));
    }
    if (pending.empty()) break;
    found.push_back(pending.begin()->second);
    pending.erase(pending.begin());
  }

  std::vector<PathCandidate> out;
  out.reserve(found.size());
  for (auto& p : found) out.push_back(detail::make_candidate(g, std::move(p), tags));
  return out;
}

// Among the cfg.nbest shortest paths keep those with more than `min_words`
// words (and a verb when cfg.require_verb); return the lowest weight per
// word, earlier rank winning ties.
inline std::optional<Solution> filippova_compress(const WordGraph& g, const SolverConfig& cfg, int min_words = 8) {
  const auto candidates = k_shortest_paths(g, cfg.nbest, cfg.verb_tags);
  const PathCandidate* best = nullptr;
  for (const auto& c : candidates) {
    if (c.word_count <= min_words) continue;
    if (cfg.require_verb && !c.has_verb) continue;
    if (!best || c.normalized_score() < best->normalized_score()) best = &c;
  }
  if (!best) return std::nullopt;
  Solution s;
  s.vertices = best->vertices;
  for (std::size_t i = 0; i < s.vertices.size(); ++i) {
    const auto& v = g.vertex(s.vertices[i]);
    if (!v.is_sentinel()) {
      s.tokens.push_back(v.surface);
      s.pos.push_back(v.pos);
    }
    if (i + 1 < s.vertices.size()) s.arcs.emplace_back(s.vertices[i], s.vertices[i + 1]);
  }
  s.word_count = best->word_count;
  s.objective = best->total_weight;
  return s;
}

}  // namespace msc

#endif  // MSC_BASELINE_HPP
