#ifndef MSC_WORDGRAPH_HPP
#define MSC_WORDGRAPH_HPP

// Directed word graph over a cluster of tagged sentences. Every sentence is
// a begin -> ... -> end path; vertices merge identical (lowercase, POS)
// pairs across sentences and arcs carry cohesion-based weights (lower is
// stronger).

#include <algorithm>
#include <cstdio>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "msc/corpus.hpp"

namespace msc {

struct MappedWord {
  int sentence = 0;
  int offset = 0;
  friend bool operator==(const MappedWord&, const MappedWord&) = default;
};

struct Vertex {
  int id = 0;
  std::string lower;
  std::string pos;
  bool is_stopword = false;
  bool is_begin = false;
  bool is_end = false;
  int freq = 0;
  int label = 0;
  // Surface of the first mapped word; used when rendering output.
  std::string surface;
  std::vector<MappedWord> mapped_words;

  bool is_sentinel() const { return is_begin || is_end; }
};

struct Arc {
  int from = 0;
  int to = 0;
  double weight = 1.0;
  std::vector<int> support;
};

class WordGraph {
 public:
  static constexpr int kBegin = 0;
  static constexpr int kEnd = 1;

  WordGraph() {
    Vertex b;
    b.lower = "-begin-";
    b.is_begin = true;
    Vertex e;
    e.lower = "-end-";
    e.is_end = true;
    add_vertex(std::move(b));
    add_vertex(std::move(e));
  }

  int begin_id() const { return kBegin; }
  int end_id() const { return kEnd; }

  int add_vertex(Vertex v) {
    v.id = static_cast<int>(vertices_.size());
    if (!v.is_sentinel()) by_key_[key(v.lower, v.pos)].push_back(v.id);
    vertices_.push_back(std::move(v));
    out_.emplace_back();
    in_.emplace_back();
    return vertices_.back().id;
  }

  // Convenience for hand-built graphs.
  int add_word(std::string lower, std::string pos, bool stopword = false) {
    Vertex v;
    v.surface = lower;
    v.lower = std::move(lower);
    v.pos = std::move(pos);
    v.is_stopword = stopword;
    v.freq = 1;
    return add_vertex(std::move(v));
  }

  // Returns the index of arc (from, to), creating it when absent.
  int add_arc(int from, int to, double weight = 1.0) {
    if (from == to) throw std::logic_error("self-loop on vertex " + std::to_string(from));
    if (auto idx = find_arc(from, to)) return *idx;
    const int idx = static_cast<int>(arcs_.size());
    arcs_.push_back(Arc{from, to, weight, {}});
    out_[from].push_back(idx);
    in_[to].push_back(idx);
    arc_index_.emplace(pair_key(from, to), idx);
    return idx;
  }

  std::optional<int> find_arc(int from, int to) const {
    if (auto it = arc_index_.find(pair_key(from, to)); it != arc_index_.end()) return it->second;
    return std::nullopt;
  }

  std::span<const int> candidates(const std::string& lower, const std::string& pos) const {
    if (auto it = by_key_.find(key(lower, pos)); it != by_key_.end()) return it->second;
    return {};
  }

  const std::vector<Vertex>& vertices() const { return vertices_; }
  std::vector<Vertex>& vertices() { return vertices_; }
  const Vertex& vertex(int id) const { return vertices_.at(id); }
  Vertex& vertex(int id) { return vertices_.at(id); }
  const std::vector<Arc>& arcs() const { return arcs_; }
  std::vector<Arc>& arcs() { return arcs_; }
  const Arc& arc(int idx) const { return arcs_.at(idx); }
  std::span<const int> out_arcs(int v) const { return out_[v]; }
  std::span<const int> in_arcs(int v) const { return in_[v]; }

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t arc_count() const { return arcs_.size(); }

  // Vertex ids of each inserted sentence, in token order (sentinels excluded).
  std::vector<std::vector<int>> sentence_paths;

 private:
  static std::string key(const std::string& lower, const std::string& pos) { return lower + '\x1f' + pos; }
  static long long pair_key(int a, int b) { return (static_cast<long long>(a) << 32) | static_cast<unsigned>(b); }

  std::vector<Vertex> vertices_;
  std::vector<Arc> arcs_;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;
  std::unordered_map<std::string, std::vector<int>> by_key_;
  std::unordered_map<long long, int> arc_index_;
};

namespace detail {

inline bool neighbor_matches(const WordGraph& g, std::span<const int> arc_ids, bool incoming,
                             const Token* context, bool sentinel_context) {
  for (int a : arc_ids) {
    const auto& arc = g.arc(a);
    const auto& n = g.vertex(incoming ? arc.from : arc.to);
    if (sentinel_context) {
      if (incoming ? n.is_begin : n.is_end) return true;
    } else if (!n.is_sentinel() && n.lower == context->lower && n.pos == context->pos) {
      return true;
    }
  }
  return false;
}

}  // namespace detail

// Picks the vertex for token `offset` of `s` among same-key candidates not
// yet used by this sentence: largest immediate-context overlap (one
// neighbour each side, compared against graph neighbours), then larger
// freq, then smaller id. std::nullopt means a new vertex is required.
inline std::optional<int> resolve_candidate(const WordGraph& g, const Sentence& s, std::size_t offset,
                                            std::span<const int> candidates,
                                            const std::vector<char>& used_by_sentence) {
  std::optional<int> best;
  int best_overlap = -1;
  for (int cand : candidates) {
    if (used_by_sentence[cand]) continue;
    const bool at_start = offset == 0;
    const bool at_end = offset + 1 == s.size();
    int overlap = 0;
    if (detail::neighbor_matches(g, g.in_arcs(cand), true, at_start ? nullptr : &s.tokens[offset - 1], at_start))
      ++overlap;
    if (detail::neighbor_matches(g, g.out_arcs(cand), false, at_end ? nullptr : &s.tokens[offset + 1], at_end))
      ++overlap;
    if (!best) {
      best = cand;
      best_overlap = overlap;
      continue;
    }
    const auto& b = g.vertex(*best);
    const auto& c = g.vertex(cand);
    if (overlap > best_overlap || (overlap == best_overlap && (c.freq > b.freq || (c.freq == b.freq && cand < *best)))) {
      best = cand;
      best_overlap = overlap;
    }
  }
  return best;
}

// Inserts sentences one at a time. Within a sentence words are mapped in
// three passes: unambiguous non-stopwords, ambiguous non-stopwords, then
// stopwords (punctuation included).
inline WordGraph build_graph(const Cluster& c, const StopwordList& sw) {
  WordGraph g;
  for (std::size_t si = 0; si < c.sentences.size(); ++si) {
    const auto& s = c.sentences[si];
    const std::size_t n = s.size();
    std::vector<int> mapping(n, -1);
    std::vector<char> used(g.vertex_count(), 0);
    std::vector<char> stop(n, 0);
    std::map<std::pair<std::string, std::string>, int> occurrences;
    for (std::size_t j = 0; j < n; ++j) {
      stop[j] = is_stopword(s.tokens[j], sw);
      ++occurrences[{s.tokens[j].lower, s.tokens[j].pos}];
    }

    const auto assign = [&](std::size_t j, std::optional<int> target) {
      const auto& tok = s.tokens[j];
      int id;
      if (target) {
        id = *target;
      } else {
        Vertex v;
        v.lower = tok.lower;
        v.pos = tok.pos;
        v.surface = tok.surface;
        v.is_stopword = stop[j];
        id = g.add_vertex(std::move(v));
        used.push_back(0);
      }
      auto& v = g.vertex(id);
      v.mapped_words.push_back({static_cast<int>(si), static_cast<int>(j)});
      v.freq = static_cast<int>(v.mapped_words.size());
      used[id] = 1;
      mapping[j] = id;
    };

    for (std::size_t j = 0; j < n; ++j) {
      if (stop[j]) continue;
      const auto& tok = s.tokens[j];
      const auto cands = g.candidates(tok.lower, tok.pos);
      if (cands.empty()) {
        assign(j, std::nullopt);
      } else if (cands.size() == 1 && occurrences[{tok.lower, tok.pos}] == 1 && !used[cands[0]]) {
        assign(j, cands[0]);
      }
    }
    for (int pass = 0; pass < 2; ++pass) {
      const bool want_stop = pass == 1;
      for (std::size_t j = 0; j < n; ++j) {
        if (mapping[j] >= 0 || bool(stop[j]) != want_stop) continue;
        const auto& tok = s.tokens[j];
        assign(j, resolve_candidate(g, s, j, g.candidates(tok.lower, tok.pos), used));
      }
    }

    int prev = g.begin_id();
    for (std::size_t j = 0; j <= n; ++j) {
      const int next = j < n ? mapping[j] : g.end_id();
      auto& arc = g.arcs()[g.add_arc(prev, next)];
      arc.support.push_back(static_cast<int>(si));
      prev = next;
    }
    g.sentence_paths.push_back(std::move(mapping));
  }
  const int nsent = static_cast<int>(c.sentences.size());
  g.vertex(g.begin_id()).freq = nsent;
  g.vertex(g.end_id()).freq = nsent;
  return g;
}

// w(i,j) = cohesion(i,j) / (freq(i) freq(j)),
// cohesion(i,j) = (freq(i) + freq(j)) / sum_s 1 / diff(s,i,j),
// summing over sentences where i occurs strictly before j. The begin
// sentinel sits at offset -1 and the end sentinel at the sentence length.
inline void compute_weights(WordGraph& g, const Cluster& c) {
  const std::size_t nsent = c.sentences.size();
  g.vertex(g.begin_id()).freq = static_cast<int>(nsent);
  g.vertex(g.end_id()).freq = static_cast<int>(nsent);
  std::vector<std::unordered_map<int, int>> offset_of(nsent);
  for (const auto& v : g.vertices())
    for (const auto& m : v.mapped_words) offset_of.at(m.sentence)[v.id] = m.offset;
  for (std::size_t s = 0; s < nsent; ++s) {
    offset_of[s][g.begin_id()] = -1;
    offset_of[s][g.end_id()] = static_cast<int>(c.sentences[s].size());
  }
  for (auto& arc : g.arcs()) {
    double inv_sum = 0.0;
    for (std::size_t s = 0; s < nsent; ++s) {
      const auto& off = offset_of[s];
      const auto fi = off.find(arc.from);
      const auto fj = off.find(arc.to);
      if (fi == off.end() || fj == off.end() || fi->second >= fj->second) continue;
      inv_sum += 1.0 / double(fj->second - fi->second);
    }
    if (inv_sum <= 0.0)
      throw std::logic_error("arc " + std::to_string(arc.from) + "->" + std::to_string(arc.to) +
                             " has no forward-ordered supporting sentence");
    const double fi = g.vertex(arc.from).freq;
    const double fj = g.vertex(arc.to).freq;
    arc.weight = ((fi + fj) / inv_sum) / (fi * fj);
  }
}

inline WordGraph build_weighted_graph(const Cluster& c, const StopwordList& sw) {
  auto g = build_graph(c, sw);
  compute_weights(g, c);
  return g;
}

namespace detail {

inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out.push_back('\\');
    out.push_back(ch);
  }
  return out;
}

inline const char* label_color(int label) {
  static constexpr const char* kPalette[] = {"gold",      "lightblue", "palegreen", "salmon",     "plum",
                                             "orange",    "cyan",      "khaki",     "pink",       "yellowgreen",
                                             "lightgray", "tan"};
  return kPalette[(label - 1) % (sizeof(kPalette) / sizeof(kPalette[0]))];
}

inline std::string format_weight(double w) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", w);
  return buf;
}

}  // namespace detail

// Graphviz rendering; keyword-labelled vertices are filled with a colour
// per label.
inline std::string to_dot(const WordGraph& g) {
  std::string out = "digraph wordgraph {\n  rankdir=LR;\n";
  for (const auto& v : g.vertices()) {
    out += "  v" + std::to_string(v.id) + " [label=\"";
    if (v.is_sentinel()) {
      out += detail::dot_escape(v.lower) + "\", shape=box";
    } else {
      out += detail::dot_escape(v.lower) + "/" + detail::dot_escape(v.pos) + "\"";
      if (v.label > 0)
        out += ", style=filled, fillcolor=" + std::string(detail::label_color(v.label)) +
               ", xlabel=\"k" + std::to_string(v.label) + "\"";
    }
    out += "];\n";
  }
  for (const auto& a : g.arcs())
    out += "  v" + std::to_string(a.from) + " -> v" + std::to_string(a.to) + " [label=\"" +
           detail::format_weight(a.weight) + "\"];\n";
  out += "}\n";
  return out;
}

inline nlohmann::json to_json(const WordGraph& g) {
  nlohmann::json j;
  j["begin"] = g.begin_id();
  j["end"] = g.end_id();
  j["vertices"] = nlohmann::json::array();
  for (const auto& v : g.vertices()) {
    nlohmann::json jv{{"id", v.id}, {"lower", v.lower}, {"pos", v.pos}, {"stopword", v.is_stopword},
                      {"freq", v.freq}, {"label", v.label}, {"surface", v.surface}};
    if (v.is_begin) jv["sentinel"] = "begin";
    if (v.is_end) jv["sentinel"] = "end";
    auto mapped = nlohmann::json::array();
    for (const auto& m : v.mapped_words) mapped.push_back({m.sentence, m.offset});
    jv["mapped"] = std::move(mapped);
    j["vertices"].push_back(std::move(jv));
  }
  j["arcs"] = nlohmann::json::array();
  for (const auto& a : g.arcs())
    j["arcs"].push_back({{"from", a.from}, {"to", a.to}, {"weight", a.weight}, {"support", a.support}});
  return j;
}

// Inverse of to_json. Vertex 0 must be the begin sentinel and vertex 1 the
// end sentinel.
inline WordGraph graph_from_json(const nlohmann::json& j) {
  WordGraph g;
  const auto& vs = j.at("vertices");
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const auto& jv = vs[i];
    if (jv.at("id").get<int>() != static_cast<int>(i)) throw ParseError("graph JSON: vertex ids must be 0..n-1 in order");
    const std::string sentinel = jv.value("sentinel", std::string());
    if ((i == 0) != (sentinel == "begin") || (i == 1) != (sentinel == "end"))
      throw ParseError("graph JSON: vertices 0 and 1 must be the begin and end sentinels");
    Vertex* v;
    if (i < 2) {
      v = &g.vertex(static_cast<int>(i));
    } else {
      Vertex nv;
      nv.lower = jv.at("lower").get<std::string>();
      nv.pos = jv.value("pos", std::string());
      v = &g.vertex(g.add_vertex(std::move(nv)));
    }
    v->is_stopword = jv.value("stopword", false);
    v->freq = jv.value("freq", 1);
    v->label = jv.value("label", 0);
    v->surface = jv.value("surface", v->lower);
    if (jv.contains("mapped"))
      for (const auto& m : jv["mapped"]) v->mapped_words.push_back({m.at(0).get<int>(), m.at(1).get<int>()});
  }
  for (const auto& ja : j.at("arcs")) {
    const int from = ja.at("from").get<int>();
    const int to = ja.at("to").get<int>();
    if (from < 0 || to < 0 || from >= int(g.vertex_count()) || to >= int(g.vertex_count()))
      throw ParseError("graph JSON: arc endpoint out of range");
    auto& arc = g.arcs()[g.add_arc(from, to, ja.at("weight").get<double>())];
    if (ja.contains("support")) arc.support = ja["support"].get<std::vector<int>>();
  }
  return g;
}

}  // namespace msc

#endif  // MSC_WORDGRAPH_HPP
