#ifndef MSC_PIPELINE_HPP
#define MSC_PIPELINE_HPP

// End-to-end orchestration: read clusters, build graphs, extract keywords,
// solve for each compression-ratio target, rerank, verify and write one
// output file per cluster; evaluate output directories against references.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "msc/baseline.hpp"
#include "msc/corpus.hpp"
#include "msc/eval.hpp"
#include "msc/ilp.hpp"
#include "msc/keywords.hpp"
#include "msc/rerank.hpp"
#include "msc/wordgraph.hpp"

namespace msc {

namespace fs = std::filesystem;

inline constexpr const char* kStopwordDirEnv = "MSC_STOPWORD_DIR";

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitClusterFailures = 1;
inline constexpr int kExitFatal = 2;

class FatalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A maximum-length target: ratio of the average source sentence length,
// or unbounded.
struct CrTarget {
  std::optional<double> ratio;

  std::string name() const {
    if (!ratio) return "inf";
    return std::to_string(static_cast<int>(std::lround(*ratio * 100))) + "%";
  }
};

inline CrTarget parse_cr_target(std::string_view s) {
  s = text::trim(s);
  if (s == "inf" || s == "infinity" || s == "none") return {};
  std::string v(s);
  bool percent = false;
  if (!v.empty() && v.back() == '%') {
    percent = true;
    v.pop_back();
  }
  double x = 0.0;
  try {
    std::size_t used = 0;
    x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad compression-ratio target '" + std::string(s) + "'");
  }
  if (percent || x > 1.0) x /= 100.0;
  if (!(x > 0.0)) throw std::invalid_argument("compression-ratio target must be positive");
  return {x};
}

struct PipelineConfig {
  std::vector<fs::path> inputs;
  InputFormat format = InputFormat::json;
  std::string language = "und";
  std::optional<fs::path> stopwords;
  KeywordMethod keyword_method = KeywordMethod::lda;
  int keyword_count = 10;
  BonusPolicy bonus;
  std::vector<CrTarget> cr_targets{CrTarget{}};
  int p_min = 8;
  SolverConfig solver;
  std::optional<fs::path> poslm;
  int lm_top = 10;
  bool baseline = false;
  int baseline_min_words = 8;
  fs::path output_dir = "out";
  unsigned seed = 0;
  int jobs = 1;
};

inline void validate(const PipelineConfig& cfg) {
  if (cfg.inputs.empty()) throw FatalError("no input files given");
  for (const auto& p : cfg.inputs)
    if (!fs::exists(p)) throw FatalError("input file not found: " + p.string());
  if (cfg.stopwords && !fs::exists(*cfg.stopwords)) throw FatalError("stopword file not found: " + cfg.stopwords->string());
  if (cfg.poslm && !fs::exists(*cfg.poslm)) throw FatalError("POS-LM file not found: " + cfg.poslm->string());
  if (cfg.cr_targets.empty()) throw FatalError("at least one compression-ratio target is required");
  if (cfg.keyword_count < 1) throw FatalError("keyword count must be >= 1");
  if (cfg.p_min < 1) throw FatalError("p-min must be >= 1");
  if (cfg.solver.nbest < 1) throw FatalError("nbest must be >= 1");
  if (cfg.jobs < 1) throw FatalError("jobs must be >= 1");
}

inline std::vector<Cluster> read_clusters(const std::vector<fs::path>& inputs, InputFormat format,
                                          const std::string& language) {
  std::vector<Cluster> all;
  for (const auto& p : inputs) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw FatalError("cannot read " + p.string());
    try {
      auto clusters = parse_clusters(in, format, language);
      if (format == InputFormat::slashed && inputs.size() > 1)
        for (auto& c : clusters) c.id = p.stem().string() + ":" + c.id;
      for (auto& c : clusters) all.push_back(std::move(c));
    } catch (const ParseError& e) {
      throw FatalError(p.string() + ": " + e.what());
    }
  }
  try {
    check_unique_ids(all);
  } catch (const ParseError& e) {
    throw FatalError(e.what());
  }
  return all;
}

inline StopwordList read_stopword_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw FatalError("cannot read stopword file " + p.string());
  try {
    return load_stopwords(in);
  } catch (const ParseError& e) {
    throw FatalError(p.string() + ": " + e.what());
  }
}

// Explicit file, else $MSC_STOPWORD_DIR/<lang>.txt, else empty.
inline StopwordList resolve_stopwords(const std::optional<fs::path>& explicit_path, const std::string& language) {
  if (explicit_path) return read_stopword_file(*explicit_path);
  if (const char* dir = std::getenv(kStopwordDirEnv)) {
    const fs::path p = fs::path(dir) / (language + ".txt");
    if (fs::exists(p)) return read_stopword_file(p);
  }
  return {};
}

inline std::string safe_file_name(const std::string& id) {
  std::string out;
  for (char ch : id) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') || ch == '-' ||
                    ch == '_' || ch == '.';
    out.push_back(ok ? ch : '_');
  }
  if (out.empty() || out[0] == '.') out.insert(out.begin(), '_');
  return out;
}

inline void write_atomically(const fs::path& target, const std::string& content) {
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FatalError("cannot write " + tmp.string());
    out << content;
    if (!out) throw FatalError("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

struct TargetResult {
  std::string target;
  std::optional<double> ratio;
  std::optional<int> p_max;
  std::string status;  // ok | none | timeout | error
  std::optional<Solution> solution;
  std::size_t candidates = 0;
  std::string message;
};

struct ClusterOutcome {
  std::string id;
  std::string language;
  std::string method;
  bool failed = false;
  std::string error;
  std::optional<KeywordSet> keywords;
  double bonus = 0.0;
  std::vector<TargetResult> results;
};

inline ClusterOutcome make_outcome(const Cluster& c, std::string method) {
  ClusterOutcome o;
  o.id = c.id;
  o.language = c.language;
  o.method = std::move(method);
  return o;
}

inline TargetResult make_target(std::string name, std::optional<double> ratio = {}, std::optional<int> p_max = {}) {
  TargetResult r;
  r.target = std::move(name);
  r.ratio = ratio;
  r.p_max = p_max;
  return r;
}

inline nlohmann::json to_json(const ClusterOutcome& o) {
  nlohmann::json j;
  j["cluster"] = o.id;
  j["lang"] = o.language;
  j["method"] = o.method;
  if (o.failed) j["error"] = o.error;
  if (o.keywords) j["keywords"] = to_json(*o.keywords);
  j["bonus"] = o.bonus;
  j["results"] = nlohmann::json::array();
  for (const auto& r : o.results) {
    nlohmann::json jr;
    jr["target"] = r.target;
    jr["ratio"] = r.ratio ? nlohmann::json(*r.ratio) : nlohmann::json(nullptr);
    jr["p_max"] = r.p_max ? nlohmann::json(*r.p_max) : nlohmann::json(nullptr);
    jr["status"] = r.status;
    jr["candidates"] = r.candidates;
    if (!r.message.empty()) jr["message"] = r.message;
    jr["solution"] = r.solution ? to_json(*r.solution) : nlohmann::json(nullptr);
    jr["text"] = r.solution ? r.solution->text() : std::string();
    j["results"].push_back(std::move(jr));
  }
  return j;
}

namespace detail {

inline std::mutex& log_mutex() {
  static std::mutex m;
  return m;
}

inline void log_line(const std::string& msg) {
  std::lock_guard lock(log_mutex());
  std::cerr << msg << '\n';
}

inline void require_verified(const CompressionModel& m, const Solution& s) {
  if (const auto report = verify_solution(m, s); !report)
    throw std::logic_error("solution failed verification: " + report.violation + " (" + report.detail + ")");
}

inline ClusterOutcome compress_baseline(const Cluster& c, const StopwordList& sw, const PipelineConfig& cfg) {
  auto o = make_outcome(c, "f10");
  const auto g = build_weighted_graph(c, sw);
  const LabelAssignment none{std::vector<int>(g.vertex_count(), 0), 0, {""}};
  auto r = make_target("F10");
  r.solution = filippova_compress(g, cfg.solver, cfg.baseline_min_words);
  r.status = r.solution ? "ok" : "none";
  if (r.solution) require_verified(CompressionModel(g, none, 1, std::nullopt, 0.0), *r.solution);
  o.results.push_back(std::move(r));
  return o;
}

inline ClusterOutcome compress_ilp(const Cluster& c, const StopwordList& sw, const PipelineConfig& cfg,
                                   const PosLm* lm) {
  auto o = make_outcome(c, "ilp");
  auto g = build_weighted_graph(c, sw);
  o.keywords = extract_keywords(cfg.keyword_method, c, sw, cfg.keyword_count, cfg.seed);
  const auto labels = assign_labels(g, *o.keywords);
  apply_labels(g, labels);
  o.bonus = keyword_bonus(g, cfg.bonus);
  const double avg_len = average_sentence_length(c);
  const int words = static_cast<int>(g.vertex_count()) - 2;
  for (const auto& target : cfg.cr_targets) {
    auto r = make_target(target.name() + (lm ? "+LM" : ""), target.ratio, pmax_from_ratio(target.ratio, avg_len));
    if (cfg.p_min > words || (r.p_max && *r.p_max < cfg.p_min)) {
      r.status = "none";
      r.message = "length bounds are infeasible for this graph";
      o.results.push_back(std::move(r));
      continue;
    }
    const auto model = build_model(g, labels, cfg.p_min, r.p_max, o.bonus);
    std::vector<Solution> nbest;
    try {
      nbest = enumerate_nbest(model, cfg.solver);
      r.status = "ok";
    } catch (const SolverTimeout& t) {
      nbest = t.incumbents();
      r.status = "timeout";
      r.message = "solver limit reached; best bound " + std::to_string(t.bound());
    }
    r.candidates = nbest.size();
    if (nbest.empty()) {
      if (r.status == "ok") r.status = "none";
    } else {
      r.solution = lm ? poslm_rerank(nbest, *lm, cfg.lm_top) : select_best(nbest);
      require_verified(model, *r.solution);
    }
    o.results.push_back(std::move(r));
  }
  return o;
}

}  // namespace detail

inline ClusterOutcome compress_cluster(const Cluster& c, const StopwordList& sw, const PipelineConfig& cfg,
                                       const PosLm* lm = nullptr) {
  if (c.sentences.size() < 2) throw std::invalid_argument("cluster needs at least 2 sentences");
  return cfg.baseline ? detail::compress_baseline(c, sw, cfg) : detail::compress_ilp(c, sw, cfg, lm);
}

struct CompressRun {
  int exit_code = kExitOk;
  std::vector<ClusterOutcome> outcomes;
};

// Writes <output>/<cluster>.json per cluster and compressions.tsv. Cluster
// failures are logged and recorded; only unusable inputs are fatal.
inline CompressRun run_compress(const PipelineConfig& cfg) {
  validate(cfg);
  const auto clusters = read_clusters(cfg.inputs, cfg.format, cfg.language);
  std::map<std::string, StopwordList> stopwords;
  for (const auto& c : clusters)
    if (!stopwords.count(c.language)) stopwords.emplace(c.language, resolve_stopwords(cfg.stopwords, c.language));
  std::optional<PosLm> lm;
  if (cfg.poslm) {
    std::ifstream in(*cfg.poslm);
    try {
      lm = PosLm::load(in);
    } catch (const std::exception& e) {
      throw FatalError(cfg.poslm->string() + ": " + e.what());
    }
  }
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) throw FatalError("cannot create output directory " + cfg.output_dir.string() + ": " + ec.message());

  CompressRun run;
  run.outcomes.resize(clusters.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < clusters.size(); i = next++) {
      const auto& c = clusters[i];
      ClusterOutcome o;
      try {
        o = compress_cluster(c, stopwords.at(c.language), cfg, lm ? &*lm : nullptr);
      } catch (const std::exception& e) {
        o = make_outcome(c, cfg.baseline ? "f10" : "ilp");
        o.failed = true;
        o.error = e.what();
        detail::log_line("cluster " + c.id + ": " + e.what());
      }
      for (const auto& r : o.results)
        if (r.status == "timeout") detail::log_line("cluster " + c.id + " [" + r.target + "]: " + r.message);
      write_atomically(cfg.output_dir / (safe_file_name(c.id) + ".json"), to_json(o).dump(2) + "\n");
      run.outcomes[i] = std::move(o);
    }
  };
  const int jobs = std::min<int>(cfg.jobs, std::max<std::size_t>(clusters.size(), 1));
  {
    std::vector<std::jthread> pool;
    for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
  }

  std::string tsv = "cluster\ttarget\tstatus\ttext\n";
  for (const auto& o : run.outcomes) {
    if (o.failed) {
      run.exit_code = kExitClusterFailures;
      tsv += o.id + "\t-\terror\t\n";
      continue;
    }
    for (const auto& r : o.results) {
      if (r.status == "timeout") run.exit_code = kExitClusterFailures;
      tsv += o.id + "\t" + r.target + "\t" + r.status + "\t" + (r.solution ? r.solution->text() : "") + "\n";
    }
  }
  write_atomically(cfg.output_dir / "compressions.tsv", tsv);
  return run;
}

struct EvaluateConfig {
  fs::path outputs_dir;
  std::vector<fs::path> corpus;
  InputFormat format = InputFormat::json;
  std::string language = "und";
  // Stopwords removed before counting when set.
  std::optional<fs::path> stopwords;
  bool remove_stopwords = false;
  // Truncate tokens to this many code points (crude stemming); 0 = off.
  int prefix_stem = 0;
  std::optional<fs::path> report_dir;
};

inline Normalizer prefix_stemmer(int n) {
  return [n](const std::string& s) {
    std::string out;
    std::size_t pos = 0;
    for (int i = 0; i < n && pos < s.size(); ++i) {
      const std::size_t at = pos;
      if (!text::decode_one(s, pos)) pos = at + 1;
      out.append(s, at, pos - at);
    }
    return out;
  };
}

inline std::vector<nlohmann::json> read_outputs(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw FatalError("output directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<nlohmann::json> out;
  for (const auto& f : files) {
    std::ifstream in(f);
    try {
      auto j = nlohmann::json::parse(in);
      if (j.is_object() && j.contains("cluster") && j.contains("results")) out.push_back(std::move(j));
    } catch (const nlohmann::json::exception& e) {
      throw FatalError(f.string() + ": " + e.what());
    }
  }
  return out;
}

// Scores every output record against the references of its cluster. The
// output ids and corpus ids must match exactly.
inline RougeReport run_evaluate(const std::vector<nlohmann::json>& outputs, const std::vector<Cluster>& corpus,
                                const RougeOptions& opt) {
  std::map<std::string, const Cluster*> by_id;
  for (const auto& c : corpus) by_id[c.id] = &c;
  std::set<std::string> output_ids;
  for (const auto& o : outputs) output_ids.insert(o.at("cluster").get<std::string>());
  std::vector<std::string> missing, unknown;
  for (const auto& [id, c] : by_id)
    if (!output_ids.count(id)) missing.push_back(id);
  for (const auto& id : output_ids)
    if (!by_id.count(id)) unknown.push_back(id);
  if (!missing.empty() || !unknown.empty()) {
    std::string msg = "cluster id mismatch";
    if (!missing.empty()) msg += "; missing outputs for: " + text::join(missing, ", ");
    if (!unknown.empty()) msg += "; outputs for unknown clusters: " + text::join(unknown, ", ");
    throw FatalError(msg);
  }

  RougeReport report;
  for (const auto& c : corpus) {
    if (c.references.empty()) throw FatalError("cluster " + c.id + " has no references");
    std::vector<std::vector<std::string>> refs;
    for (const auto& r : c.references) refs.push_back(surfaces(r));
    for (const auto& o : outputs) {
      if (o.at("cluster").get<std::string>() != c.id) continue;
      const std::string method = o.value("method", std::string("ilp"));
      for (const auto& r : o.at("results")) {
        EvaluationRow row;
        row.cluster = c.id;
        const std::string target = r.value("target", std::string("?"));
        row.system = method == "f10" ? "F10" : "ILP:" + target;
        std::vector<std::string> tokens;
        if (r.contains("solution") && !r["solution"].is_null())
          tokens = r["solution"].at("tokens").get<std::vector<std::string>>();
        row.length = static_cast<int>(tokens.size());
        row.cr = compression_ratio(tokens, c);
        row.rouge1 = rouge_n(tokens, refs, 1, opt);
        row.rouge2 = rouge_n(tokens, refs, 2, opt);
        row.su4 = rouge_su4(tokens, refs, opt);
        report.rows.push_back(std::move(row));
      }
    }
  }
  return report;
}

inline RougeReport run_evaluate(const EvaluateConfig& cfg) {
  const auto outputs = read_outputs(cfg.outputs_dir);
  for (const auto& p : cfg.corpus)
    if (!fs::exists(p)) throw FatalError("corpus file not found: " + p.string());
  const auto corpus = read_clusters(cfg.corpus, cfg.format, cfg.language);
  StopwordList sw;
  RougeOptions opt;
  if (cfg.remove_stopwords) {
    sw = resolve_stopwords(cfg.stopwords, corpus.empty() ? cfg.language : corpus.front().language);
    opt.stopwords = &sw;
  }
  if (cfg.prefix_stem > 0) opt.normalizer = prefix_stemmer(cfg.prefix_stem);
  auto report = run_evaluate(outputs, corpus, opt);
  const fs::path dir = cfg.report_dir.value_or(cfg.outputs_dir);
  fs::create_directories(dir);
  write_atomically(dir / "rouge_rows.tsv", rows_tsv(report));
  write_atomically(dir / "rouge_summary.tsv", summary_tsv(report));
  write_atomically(dir / "rouge_report.json", to_json(report).dump(2) + "\n");
  return report;
}

}  // namespace msc

#endif  // MSC_PIPELINE_HPP
