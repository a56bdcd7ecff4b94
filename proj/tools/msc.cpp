// Command-line front end: corpus statistics, graph and keyword dumps,
// compression, the shortest-path baseline, LP export, evaluation and POS
// language-model training.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "msc/pipeline.hpp"

namespace {

using namespace msc;

struct InputOptions {
  std::vector<std::string> inputs;
  std::string format = "json";
  std::string language = "und";
  std::string stopwords;
};

void add_input_options(CLI::App* app, InputOptions& o) {
  app->add_option("-i,--input", o.inputs, "Cluster files (JSON/JSONL or slashed)")->required()->check(CLI::ExistingFile);
  app->add_option("--format", o.format, "Input format: json or slashed")->capture_default_str();
  app->add_option("--lang", o.language, "Language code for inputs without one")->capture_default_str();
  app->add_option("--stopwords", o.stopwords, "Stopword list (one word per line)");
}

std::vector<Cluster> load(const InputOptions& o) {
  std::vector<fs::path> paths(o.inputs.begin(), o.inputs.end());
  return read_clusters(paths, parse_format(o.format), o.language);
}

std::optional<fs::path> opt_path(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return fs::path(s);
}

const Cluster& pick(const std::vector<Cluster>& clusters, const std::string& id) {
  if (clusters.empty()) throw FatalError("no clusters in input");
  if (id.empty()) return clusters.front();
  for (const auto& c : clusters)
    if (c.id == id) return c;
  throw FatalError("no cluster with id '" + id + "'");
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  write_atomically(path, content);
}

std::string stats_tsv(const std::vector<Cluster>& clusters, bool references) {
  const auto stats = corpus_stats(clusters, references);
  const auto row = [](const std::string& name, const ClusterStats& s) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "\t%zu\t%zu\t%zu\t%.4f\t%.4f\t%.4f\n", s.sentence_count, s.token_count,
                  s.vocab_size, s.avg_sentence_len, s.ttr, s.avg_cosine);
    return name + buf;
  };
  std::string out = "cluster\tsentences\ttokens\tvocab\tavg_len\tttr\tavg_cosine\n";
  for (std::size_t i = 0; i < clusters.size(); ++i) out += row(clusters[i].id, stats.per_cluster[i].second);
  out += row("#macro", stats.macro);
  char buf[128];
  std::snprintf(buf, sizeof buf, "#pooled\t-\t%zu\t%zu\t-\t%.4f\t-\n", stats.pooled_tokens, stats.pooled_vocab,
                stats.pooled_ttr);
  return out + buf;
}

struct CompressOptions {
  InputOptions in;
  std::string keywords = "lda";
  int keyword_count = 10;
  std::string bonus = "geometric";
  std::vector<std::string> targets{"inf"};
  int p_min = 8;
  int nbest = 50;
  bool no_verb = false;
  std::vector<std::string> verb_tags{"V*", "AUX"};
  std::string poslm;
  int lm_top = 10;
  int min_words = 8;
  std::string output = "out";
  unsigned seed = 0;
  int jobs = 1;
  long time_limit_ms = 0;
  std::uint64_t node_limit = 0;
};

void add_compress_options(CLI::App* app, CompressOptions& o, bool baseline) {
  add_input_options(app, o.in);
  if (!baseline) {
    app->add_option("--keywords", o.keywords, "Keyword extractor: textrank, lda or lsi")->capture_default_str();
    app->add_option("--keyword-count", o.keyword_count, "Number of keywords")->capture_default_str();
    app->add_option("--bonus", o.bonus, "Keyword bonus: geometric, arithmetic, median or fixed:<value>")
        ->capture_default_str();
    app->add_option("--cr", o.targets, "Compression-ratio targets, e.g. 50% 0.7 inf")->capture_default_str();
    app->add_option("--p-min", o.p_min, "Minimum number of words")->capture_default_str();
    app->add_option("--poslm", o.poslm, "POS language model for reranking the top candidates");
    app->add_option("--lm-top", o.lm_top, "Candidates considered by the POS-LM reranker")->capture_default_str();
    app->add_option("--time-limit-ms", o.time_limit_ms, "Solver time limit per target (0 = none)")
        ->capture_default_str();
    app->add_option("--node-limit", o.node_limit, "Solver node limit per target (0 = none)")->capture_default_str();
    app->add_option("--seed", o.seed, "Seed for randomised components")->capture_default_str();
  } else {
    app->add_option("--min-words", o.min_words, "Keep paths with more than this many words")->capture_default_str();
  }
  app->add_option("--nbest", o.nbest, "Number of candidates")->capture_default_str();
  app->add_flag("--no-verb-filter", o.no_verb, "Accept candidates without a verb");
  app->add_option("--verb-tags", o.verb_tags, "POS tags counted as verbs ('*' suffix = prefix)")
      ->capture_default_str();
  app->add_option("-o,--output", o.output, "Output directory")->capture_default_str();
  app->add_option("-j,--jobs", o.jobs, "Worker threads")->capture_default_str();
}

PipelineConfig to_config(const CompressOptions& o, bool baseline) {
  PipelineConfig cfg;
  cfg.inputs.assign(o.in.inputs.begin(), o.in.inputs.end());
  cfg.format = parse_format(o.in.format);
  cfg.language = o.in.language;
  cfg.stopwords = opt_path(o.in.stopwords);
  cfg.keyword_method = parse_keyword_method(o.keywords);
  cfg.keyword_count = o.keyword_count;
  cfg.bonus = parse_bonus_policy(o.bonus);
  cfg.cr_targets.clear();
  for (const auto& t : o.targets)
    for (auto part : text::split(t, ','))
      if (!text::trim(part).empty()) cfg.cr_targets.push_back(parse_cr_target(part));
  cfg.p_min = o.p_min;
  cfg.solver.nbest = o.nbest;
  cfg.solver.require_verb = !o.no_verb;
  cfg.solver.verb_tags = VerbTags(o.verb_tags);
  cfg.solver.time_limit = std::chrono::milliseconds(o.time_limit_ms);
  cfg.solver.node_limit = o.node_limit;
  cfg.poslm = opt_path(o.poslm);
  cfg.lm_top = o.lm_top;
  cfg.baseline = baseline;
  cfg.baseline_min_words = o.min_words;
  cfg.output_dir = o.output;
  cfg.seed = o.seed;
  cfg.jobs = o.jobs;
  return cfg;
}

int report_run(const CompressRun& run, const fs::path& out) {
  std::size_t ok = 0, none = 0, failed = 0;
  for (const auto& o : run.outcomes) {
    if (o.failed) {
      ++failed;
      continue;
    }
    for (const auto& r : o.results) (r.solution ? ok : none)++;
  }
  std::cerr << run.outcomes.size() << " clusters: " << ok << " compressions, " << none << " without solution, "
            << failed << " failed; results in " << out.string() << "\n";
  return run.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-sentence compression over word graphs"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Configuration file: key = value lines under [compress] or [baseline]");
  app.fallthrough();

  InputOptions stats_in;
  bool stats_refs = false;
  auto* stats = app.add_subcommand("stats", "Per-cluster and corpus statistics (TSV)");
  add_input_options(stats, stats_in);
  stats->add_flag("--references", stats_refs, "Compute statistics over the reference compressions");

  InputOptions graph_in;
  std::string graph_cluster, graph_fmt = "dot", graph_out, graph_keywords;
  int graph_n = 10;
  auto* graph = app.add_subcommand("graph", "Dump the weighted word graph of a cluster");
  add_input_options(graph, graph_in);
  graph->add_option("--cluster", graph_cluster, "Cluster id (default: first)");
  graph->add_option("--as", graph_fmt, "Output format: dot or json")->capture_default_str();
  graph->add_option("--keywords", graph_keywords, "Colour keyword vertices using this extractor");
  graph->add_option("--keyword-count", graph_n, "Number of keywords")->capture_default_str();
  graph->add_option("-o,--output", graph_out, "Output file (default: stdout)");

  InputOptions kw_in;
  std::string kw_method = "lda";
  int kw_n = 10;
  unsigned kw_seed = 0;
  auto* kw = app.add_subcommand("keywords", "Extract keywords per cluster (JSON lines)");
  add_input_options(kw, kw_in);
  kw->add_option("--method", kw_method, "textrank, lda or lsi")->capture_default_str();
  kw->add_option("-n,--count", kw_n, "Number of keywords")->capture_default_str();
  kw->add_option("--seed", kw_seed, "Seed")->capture_default_str();

  CompressOptions comp_opts;
  auto* comp = app.add_subcommand("compress", "Compress clusters with the keyword-aware model");
  add_compress_options(comp, comp_opts, false);

  CompressOptions base_opts;
  auto* base = app.add_subcommand("baseline", "Compress clusters with the k-shortest-paths baseline");
  add_compress_options(base, base_opts, true);

  InputOptions lp_in;
  std::string lp_cluster, lp_target = "inf", lp_out, lp_method = "lda", lp_bonus = "geometric";
  int lp_pmin = 8, lp_n = 10;
  auto* lp = app.add_subcommand("export-lp", "Write the model of one cluster in CPLEX LP format");
  add_input_options(lp, lp_in);
  lp->add_option("--cluster", lp_cluster, "Cluster id (default: first)");
  lp->add_option("--cr", lp_target, "Compression-ratio target")->capture_default_str();
  lp->add_option("--p-min", lp_pmin, "Minimum number of words")->capture_default_str();
  lp->add_option("--keywords", lp_method, "Keyword extractor")->capture_default_str();
  lp->add_option("--keyword-count", lp_n, "Number of keywords")->capture_default_str();
  lp->add_option("--bonus", lp_bonus, "Keyword bonus policy")->capture_default_str();
  lp->add_option("-o,--output", lp_out, "Output file (default: stdout)");

  EvaluateConfig ev;
  std::string ev_outputs, ev_format = "json", ev_stop, ev_report;
  std::vector<std::string> ev_corpus;
  auto* eval = app.add_subcommand("evaluate", "Score an output directory against reference compressions");
  eval->add_option("outputs", ev_outputs, "Directory written by compress or baseline")->required();
  eval->add_option("-c,--corpus", ev_corpus, "Corpus files with references")->required()->check(CLI::ExistingFile);
  eval->add_option("--format", ev_format, "Corpus format")->capture_default_str();
  eval->add_option("--lang", ev.language, "Language code")->capture_default_str();
  eval->add_option("--stopwords", ev_stop, "Stopword list for --remove-stopwords");
  eval->add_flag("--remove-stopwords", ev.remove_stopwords, "Drop stopwords before counting n-grams");
  eval->add_option("--prefix-stem", ev.prefix_stem, "Truncate tokens to N characters before counting")
      ->capture_default_str();
  eval->add_option("--report-dir", ev_report, "Where to write the report files (default: outputs)");

  std::vector<std::string> lm_inputs;
  std::string lm_format = "tags", lm_out;
  int lm_order = 7;
  double lm_backoff = 0.4;
  auto* train = app.add_subcommand("train-poslm", "Train a POS n-gram model");
  train->add_option("-i,--input", lm_inputs, "Training files")->required()->check(CLI::ExistingFile);
  train->add_option("--format", lm_format, "tags (one tag sequence per line), json or slashed")
      ->capture_default_str();
  train->add_option("--order", lm_order, "N-gram order")->capture_default_str();
  train->add_option("--backoff", lm_backoff, "Backoff factor")->capture_default_str();
  train->add_option("-o,--output", lm_out, "Model file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitFatal;
  }

  try {
    if (*stats) {
      std::cout << stats_tsv(load(stats_in), stats_refs);
    } else if (*graph) {
      const auto clusters = load(graph_in);
      const auto& c = pick(clusters, graph_cluster);
      const auto sw = resolve_stopwords(opt_path(graph_in.stopwords), c.language);
      auto g = build_weighted_graph(c, sw);
      if (!graph_keywords.empty())
        apply_labels(g, assign_labels(g, extract_keywords(parse_keyword_method(graph_keywords), c, sw, graph_n)));
      if (graph_fmt == "dot")
        write_output(graph_out, to_dot(g));
      else if (graph_fmt == "json")
        write_output(graph_out, to_json(g).dump(2) + "\n");
      else
        throw FatalError("unknown graph format '" + graph_fmt + "'");
    } else if (*kw) {
      const auto method = parse_keyword_method(kw_method);
      for (const auto& c : load(kw_in)) {
        const auto sw = resolve_stopwords(opt_path(kw_in.stopwords), c.language);
        auto j = to_json(extract_keywords(method, c, sw, kw_n, kw_seed));
        j["cluster"] = c.id;
        std::cout << j.dump() << "\n";
      }
    } else if (*comp || *base) {
      const bool is_base = static_cast<bool>(*base);
      const auto cfg = to_config(is_base ? base_opts : comp_opts, is_base);
      return report_run(run_compress(cfg), cfg.output_dir);
    } else if (*lp) {
      const auto clusters = load(lp_in);
      const auto& c = pick(clusters, lp_cluster);
      const auto sw = resolve_stopwords(opt_path(lp_in.stopwords), c.language);
      auto g = build_weighted_graph(c, sw);
      const auto labels = assign_labels(g, extract_keywords(parse_keyword_method(lp_method), c, sw, lp_n));
      apply_labels(g, labels);
      const auto target = parse_cr_target(lp_target);
      const auto model = build_model(g, labels, lp_pmin, pmax_from_ratio(target.ratio, average_sentence_length(c)),
                                     keyword_bonus(g, parse_bonus_policy(lp_bonus)));
      write_output(lp_out, export_lp(model));
    } else if (*eval) {
      ev.outputs_dir = ev_outputs;
      ev.corpus.assign(ev_corpus.begin(), ev_corpus.end());
      ev.format = parse_format(ev_format);
      ev.stopwords = opt_path(ev_stop);
      if (!ev_report.empty()) ev.report_dir = ev_report;
      std::cout << summary_tsv(run_evaluate(ev));
    } else if (*train) {
      PosLm lm(lm_order, lm_backoff);
      for (const auto& p : lm_inputs) {
        std::ifstream in(p);
        if (lm_format == "tags") {
          for (std::string line; std::getline(in, line);) {
            std::vector<std::string> tags;
            for (auto t : text::split(line, ' '))
              if (!text::trim(t).empty()) tags.emplace_back(text::trim(t));
            if (!tags.empty()) lm.add_sentence(tags);
          }
        } else {
          for (const auto& c : read_clusters({p}, parse_format(lm_format), "und"))
            for (const auto& s : c.sentences) {
              std::vector<std::string> tags;
              for (const auto& t : s.tokens) tags.push_back(t.pos);
              lm.add_sentence(tags);
            }
        }
      }
      if (lm.empty()) throw FatalError("POS-LM training data is empty");
      std::ostringstream os;
      lm.save(os);
      write_atomically(lm_out, os.str());
    }
  } catch (const FatalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFatal;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFatal;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFatal;
  }
  return kExitOk;
}
