#ifndef MSC_CORPUS_HPP
#define MSC_CORPUS_HPP

// Clusters of POS-tagged sentences, stopword lists and descriptive
// statistics (token counts, type-token ratio, pairwise cosine similarity).

#include <cmath>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "msc/text.hpp"

namespace msc {

struct Token {
  std::string surface;
  std::string lower;
  std::string pos;

  Token() = default;
  Token(std::string surface_, std::string pos_)
      : surface(std::move(surface_)), lower(text::fold_case(surface)), pos(std::move(pos_)) {
    if (surface.empty()) throw ParseError("token with empty surface");
  }

  friend bool operator==(const Token&, const Token&) = default;
};

struct Sentence {
  std::vector<Token> tokens;

  std::size_t size() const { return tokens.size(); }
  friend bool operator==(const Sentence&, const Sentence&) = default;
};

struct Cluster {
  std::string id;
  std::string language;
  std::vector<Sentence> sentences;
  std::vector<Sentence> references;

  friend bool operator==(const Cluster&, const Cluster&) = default;
};

enum class InputFormat { json, slashed };

inline InputFormat parse_format(std::string_view name) {
  if (name == "json" || name == "jsonl") return InputFormat::json;
  if (name == "slashed") return InputFormat::slashed;
  throw ParseError("unknown input format '" + std::string(name) + "'");
}

class StopwordList {
 public:
  StopwordList() = default;
  explicit StopwordList(std::initializer_list<std::string_view> words) {
    for (auto w : words) add(w);
  }

  void add(std::string_view word) { words_.insert(text::fold_case(word)); }
  bool contains(std::string_view word) const { return words_.count(text::fold_case(word)) > 0; }
  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }
  const std::set<std::string, std::less<>>& words() const { return words_; }

 private:
  std::set<std::string, std::less<>> words_;
};

// Stopwords plus tokens without any letter or digit (punctuation).
inline bool is_stopword(const Token& t, const StopwordList& sw) {
  return !text::has_word_char(t.surface) || sw.contains(t.lower);
}

namespace detail {

inline Sentence sentence_from_json(const nlohmann::json& arr, std::string_view where) {
  if (!arr.is_array()) throw ParseError(std::string(where) + ": sentence must be an array");
  if (arr.empty()) throw ParseError(std::string(where) + ": empty sentence");
  Sentence s;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& t = arr[i];
    if (!t.is_object() || !t.contains("w") || !t.contains("pos") || !t["w"].is_string() ||
        !t["pos"].is_string()) {
      throw ParseError(std::string(where) + ": token " + std::to_string(i) +
                       " must be an object with string fields \"w\" and \"pos\"");
    }
    const auto w = t["w"].get<std::string>();
    if (w.empty()) throw ParseError(std::string(where) + ": token " + std::to_string(i) + " is empty");
    s.tokens.emplace_back(w, t["pos"].get<std::string>());
  }
  return s;
}

inline nlohmann::json sentence_to_json(const Sentence& s) {
  auto arr = nlohmann::json::array();
  for (const auto& t : s.tokens) arr.push_back({{"w", t.surface}, {"pos", t.pos}});
  return arr;
}

inline Cluster cluster_from_json(const nlohmann::json& j, std::string_view where, std::string_view language) {
  if (!j.is_object()) throw ParseError(std::string(where) + ": cluster must be a JSON object");
  Cluster c;
  if (!j.contains("id") || !j["id"].is_string()) throw ParseError(std::string(where) + ": missing string \"id\"");
  c.id = j["id"].get<std::string>();
  c.language = j.value("lang", std::string(language));
  if (!j.contains("sentences") || !j["sentences"].is_array())
    throw ParseError(std::string(where) + ": missing \"sentences\" array");
  const auto& sents = j["sentences"];
  for (std::size_t i = 0; i < sents.size(); ++i)
    c.sentences.push_back(sentence_from_json(sents[i], std::string(where) + " sentence " + std::to_string(i)));
  if (j.contains("references")) {
    const auto& refs = j["references"];
    if (!refs.is_array()) throw ParseError(std::string(where) + ": \"references\" must be an array");
    for (std::size_t i = 0; i < refs.size(); ++i)
      c.references.push_back(sentence_from_json(refs[i], std::string(where) + " reference " + std::to_string(i)));
  }
  return c;
}

inline Sentence parse_slashed_line(std::string_view line, std::size_t line_no) {
  Sentence s;
  const auto where = [&](std::size_t col) {
    return "line " + std::to_string(line_no) + ", offset " + std::to_string(col);
  };
  std::size_t col = 0;
  for (auto item : text::split(line, ' ')) {
    if (item.empty()) throw ParseError(where(col) + ": empty token (tokens are separated by single spaces)");
    const auto slash = item.rfind('/');
    if (slash == std::string_view::npos || slash == 0 || slash + 1 == item.size())
      throw ParseError(where(col) + ": expected surface/POS, got '" + std::string(item) + "'");
    s.tokens.emplace_back(std::string(item.substr(0, slash)), std::string(item.substr(slash + 1)));
    col += item.size() + 1;
  }
  return s;
}

}  // namespace detail

// Parses every cluster in the stream. JSON input holds one object per line
// (or a single object spanning the whole stream); slashed input holds one
// sentence per line with blank lines between clusters.
inline std::vector<Cluster> parse_clusters(std::istream& in, InputFormat format,
                                           std::string_view language = "und") {
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (const auto bad = text::find_invalid_utf8(data))
    throw ParseError("invalid UTF-8 at byte offset " + std::to_string(*bad));

  std::vector<Cluster> clusters;
  if (format == InputFormat::json) {
    const auto trimmed = text::trim(data);
    if (trimmed.empty()) return clusters;
    // Whole-stream object first; fall back to one object per line.
    auto whole = nlohmann::json::parse(trimmed, nullptr, false);
    if (!whole.is_discarded() && whole.is_object()) {
      clusters.push_back(detail::cluster_from_json(whole, "cluster", language));
      return clusters;
    }
    std::size_t line_no = 0;
    for (auto line : text::split(data, '\n')) {
      ++line_no;
      line = text::trim(line);
      if (line.empty()) continue;
      const std::string where = "line " + std::to_string(line_no);
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(where + ", offset " + std::to_string(e.byte) + ": malformed JSON");
      }
      clusters.push_back(detail::cluster_from_json(j, where, language));
    }
    return clusters;
  }

  Cluster current;
  const auto flush = [&] {
    if (current.sentences.empty()) return;
    current.id = std::to_string(clusters.size() + 1);
    current.language = std::string(language);
    clusters.push_back(std::move(current));
    current = Cluster{};
  };
  std::size_t line_no = 0;
  for (auto line : text::split(data, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (text::trim(line).empty()) {
      flush();
      continue;
    }
    current.sentences.push_back(detail::parse_slashed_line(line, line_no));
  }
  flush();
  return clusters;
}

inline Cluster parse_cluster(std::istream& in, InputFormat format, std::string_view language = "und") {
  auto all = parse_clusters(in, format, language);
  if (all.size() != 1)
    throw ParseError("expected exactly one cluster, found " + std::to_string(all.size()));
  return std::move(all.front());
}

inline Cluster parse_cluster(std::string_view data, InputFormat format, std::string_view language = "und") {
  std::istringstream in{std::string(data)};
  return parse_cluster(in, format, language);
}

inline nlohmann::json to_json(const Cluster& c) {
  nlohmann::json j;
  j["id"] = c.id;
  j["lang"] = c.language;
  j["sentences"] = nlohmann::json::array();
  for (const auto& s : c.sentences) j["sentences"].push_back(detail::sentence_to_json(s));
  j["references"] = nlohmann::json::array();
  for (const auto& s : c.references) j["references"].push_back(detail::sentence_to_json(s));
  return j;
}

inline std::string to_slashed(const Sentence& s) {
  std::string out;
  for (std::size_t i = 0; i < s.tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += s.tokens[i].surface;
    out.push_back('/');
    out += s.tokens[i].pos;
  }
  return out;
}

// References are not representable in the slashed format and are dropped.
inline std::string to_slashed(const Cluster& c) {
  std::string out;
  for (const auto& s : c.sentences) {
    out += to_slashed(s);
    out.push_back('\n');
  }
  return out;
}

inline void check_unique_ids(const std::vector<Cluster>& clusters) {
  std::set<std::string> seen;
  for (const auto& c : clusters)
    if (!seen.insert(c.id).second) throw ParseError("duplicate cluster id '" + c.id + "'");
}

inline StopwordList load_stopwords(std::istream& in) {
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (const auto bad = text::find_invalid_utf8(data))
    throw ParseError("stopword list: invalid UTF-8 at byte offset " + std::to_string(*bad));
  StopwordList sw;
  for (auto line : text::split(data, '\n')) {
    line = text::trim(line);
    if (line.empty() || line.front() == '#') continue;
    sw.add(line);
  }
  return sw;
}

inline StopwordList load_stopwords(std::string_view data) {
  std::istringstream in{std::string(data)};
  return load_stopwords(in);
}

struct ClusterStats {
  std::size_t sentence_count = 0;
  std::size_t token_count = 0;
  std::size_t vocab_size = 0;
  double avg_sentence_len = 0.0;
  double ttr = 0.0;
  double avg_cosine = 0.0;
};

inline double cosine_similarity(const std::map<std::string, int>& u, const std::map<std::string, int>& v) {
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (const auto& [w, n] : u) {
    nu += double(n) * n;
    if (auto it = v.find(w); it != v.end()) dot += double(n) * it->second;
  }
  for (const auto& [w, n] : v) nv += double(n) * n;
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return dot / (std::sqrt(nu) * std::sqrt(nv));
}

// Raw term-frequency vectors over case-folded surfaces, all tokens
// included. A single sentence has no pairs; its avg_cosine is 1.
inline ClusterStats sentence_stats(const std::vector<Sentence>& sentences) {
  ClusterStats st;
  st.sentence_count = sentences.size();
  std::set<std::string> vocab;
  std::vector<std::map<std::string, int>> tf(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    for (const auto& t : sentences[i].tokens) {
      ++tf[i][t.lower];
      vocab.insert(t.lower);
      ++st.token_count;
    }
  }
  st.vocab_size = vocab.size();
  if (st.sentence_count) st.avg_sentence_len = double(st.token_count) / double(st.sentence_count);
  if (st.token_count) st.ttr = double(st.vocab_size) / double(st.token_count);
  if (sentences.size() < 2) {
    st.avg_cosine = sentences.empty() ? 0.0 : 1.0;
    return st;
  }
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < tf.size(); ++i)
    for (std::size_t j = i + 1; j < tf.size(); ++j, ++pairs) sum += cosine_similarity(tf[i], tf[j]);
  st.avg_cosine = sum / double(pairs);
  return st;
}

inline ClusterStats cluster_stats(const Cluster& c) { return sentence_stats(c.sentences); }

// Corpus-level view: per-cluster rows, their macro average, and pooled
// ("micro") counts where vocabulary is the union over the whole corpus.
struct CorpusStats {
  std::vector<std::pair<std::string, ClusterStats>> per_cluster;
  ClusterStats macro;
  std::size_t pooled_tokens = 0;
  std::size_t pooled_vocab = 0;
  double pooled_ttr = 0.0;
};

inline CorpusStats corpus_stats(const std::vector<Cluster>& clusters, bool references = false) {
  CorpusStats cs;
  std::set<std::string> vocab;
  for (const auto& c : clusters) {
    const auto& sents = references ? c.references : c.sentences;
    cs.per_cluster.emplace_back(c.id, sentence_stats(sents));
    for (const auto& s : sents)
      for (const auto& t : s.tokens) {
        vocab.insert(t.lower);
        ++cs.pooled_tokens;
      }
  }
  cs.pooled_vocab = vocab.size();
  if (cs.pooled_tokens) cs.pooled_ttr = double(cs.pooled_vocab) / double(cs.pooled_tokens);
  if (!cs.per_cluster.empty()) {
    const double n = double(cs.per_cluster.size());
    for (const auto& [id, st] : cs.per_cluster) {
      cs.macro.sentence_count += st.sentence_count;
      cs.macro.token_count += st.token_count;
      cs.macro.vocab_size += st.vocab_size;
      cs.macro.avg_sentence_len += st.avg_sentence_len / n;
      cs.macro.ttr += st.ttr / n;
      cs.macro.avg_cosine += st.avg_cosine / n;
    }
  }
  return cs;
}

}  // namespace msc

#endif  // MSC_CORPUS_HPP
