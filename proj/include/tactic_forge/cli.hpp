#pragma once

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "tactic_forge/corpus.hpp"
#include "tactic_forge/eval.hpp"
#include "tactic_forge/recorder.hpp"
#include "tactic_forge/rule_kernel.hpp"

namespace tactic_forge::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitCorpus = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("TACTIC_FORGE_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw UsageError("TACTIC_FORGE_SEED is not an unsigned integer");
    }
  }
  return 0;
}

inline PredictorKind predictor_or_throw(const std::string& name) {
  auto p = parse_predictor(name);
  if (!p) throw UsageError("unknown predictor '" + name + "'");
  return *p;
}

inline Window window_or_throw(const std::string& text) {
  auto w = parse_window(text);
  if (!w) throw UsageError("bad window '" + text + "' (expected file, all or last:N)");
  return *w;
}

/// "metric[@window]", e.g. "tfidf@last:1000".
inline SearchConfig parse_config(const std::string& text, const SearchBudget& budget) {
  SearchConfig c;
  auto at = text.find('@');
  c.predictor = predictor_or_throw(text.substr(0, at));
  c.window = at == std::string::npos ? Window::all() : window_or_throw(text.substr(at + 1));
  c.name = std::string(predictor_name(c.predictor)) + "@" + c.window.name();
  c.budget = budget;
  return c;
}

/// Writes to the named file, or to `fallback` when the name is empty.
class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (path.empty()) {
      stream_ = &fallback;
      return;
    }
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw IoError("cannot write " + path);
    stream_ = file_.get();
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

struct LshFlags {
  std::size_t trees = 16, depth = 32, cap = 1024;
  std::string rerank = "jaccard";

  void attach(CLI::App* cmd) {
    cmd->add_option("--lsh-trees", trees, "LSH forest tree count")->check(CLI::PositiveNumber);
    cmd->add_option("--lsh-depth", depth, "MinHash signature length")->check(CLI::PositiveNumber);
    cmd->add_option("--lsh-cap", cap, "candidate pool cap")->check(CLI::PositiveNumber);
    cmd->add_option("--lsh-rerank", rerank, "candidate rerank metric")->check(CLI::IsMember({"jaccard", "tfidf"}));
  }
  LshForestConfig config(std::uint64_t seed) const { return {trees, depth, cap, mix64(seed ^ 0x15f0ULL)}; }
  bool weighted() const { return rerank == "tfidf"; }
};

inline SearchBudget budget_from(std::optional<std::size_t> expansions, std::optional<double> seconds, std::size_t k) {
  SearchBudget b;
  b.max_expansions = expansions;
  b.wall_clock_seconds = seconds;
  b.k = k;
  if (!b.max_expansions && !b.wall_clock_seconds) b.max_expansions = 10000;
  return b;
}

inline std::unique_ptr<ProofEnv> make_env(const std::string& kernel_path, const Corpus& corpus) {
  if (!kernel_path.empty()) return std::make_unique<RuleKernel>(RuleKernel::load(kernel_path));
  return std::make_unique<ReplayKernel>(replay_kernel_from(corpus));
}

}  // namespace detail

/// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"tactic-forge: tactic prediction and proof search over recorded proofs", "tactic-forge"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed_flag;
  std::size_t threads = 1;
  app.add_option("--seed", seed_flag, "seed for randomized paths (default: $TACTIC_FORGE_SEED or 0)");
  app.add_option("--threads", threads, "worker threads for file-parallel evaluation")->check(CLI::PositiveNumber);

  // ingest
  std::vector<std::string> ingest_paths;
  std::string export_path;
  auto* ingest_cmd = app.add_subcommand("ingest", "validate a JSONL corpus");
  ingest_cmd->add_option("corpus", ingest_paths, "JSONL corpus files")->required();
  ingest_cmd->add_option("--export", export_path, "write the normalized corpus here");

  // eval-knn
  std::vector<std::string> knn_paths;
  std::string knn_metric = "jaccard", knn_window = "all", knn_out;
  std::size_t knn_kmax = 30;
  bool knn_intra = false;
  detail::LshFlags knn_lsh;
  auto* knn_cmd = app.add_subcommand("eval-knn", "offline prediction evaluation (cumulative top-k curve)");
  knn_cmd->add_option("corpus", knn_paths, "JSONL corpus files")->required();
  knn_cmd->add_option("--metric", knn_metric, "cosine|euclid|jaccard|tfidf|lshf|random|reverse")
      ->check(CLI::IsMember({"cosine", "euclid", "jaccard", "tfidf", "lshf", "random", "reverse"}));
  knn_cmd->add_option("--kmax", knn_kmax, "largest k on the curve")->check(CLI::PositiveNumber);
  knn_cmd->add_flag("--intra-lemma", knn_intra, "allow learning from earlier pairs of the same lemma");
  knn_cmd->add_option("--window", knn_window, "file | last:N | all");
  knn_cmd->add_option("--out", knn_out, "CSV output (default stdout)");
  knn_lsh.attach(knn_cmd);

  // search
  std::vector<std::string> search_paths;
  std::string search_file, search_lemma, search_predictor = "tfidf", search_window = "all", search_kernel;
  std::optional<std::size_t> search_exp;
  std::optional<double> search_sec;
  std::size_t search_k = 16;
  detail::LshFlags search_lsh;
  auto* search_cmd = app.add_subcommand("search", "search a proof for one lemma");
  search_cmd->add_option("corpus", search_paths, "JSONL corpus files")->required();
  search_cmd->add_option("--file", search_file, "file containing the lemma")->required();
  search_cmd->add_option("--lemma", search_lemma, "lemma name")->required();
  search_cmd->add_option("--predictor", search_predictor, "predictor used to rank tactics")
      ->check(CLI::IsMember({"cosine", "euclid", "jaccard", "tfidf", "lshf", "random", "reverse"}));
  search_cmd->add_option("--window", search_window, "file | last:N | all");
  search_cmd->add_option("--budget-expansions", search_exp, "maximum node expansions");
  search_cmd->add_option("--budget-seconds", search_sec, "wall-clock limit");
  search_cmd->add_option("--k", search_k, "predictions tried per node")->check(CLI::PositiveNumber);
  search_cmd->add_option("--kernel", search_kernel, "rule kernel JSON (default: replay recorded pairs)");
  search_lsh.attach(search_cmd);

  // eval-search
  std::vector<std::string> es_paths, es_configs;
  std::optional<std::size_t> es_exp;
  std::optional<double> es_sec;
  std::size_t es_k = 16;
  std::string es_kernel, es_out, es_lemmas_out, es_hist_out, es_orig_hist_out;
  detail::LshFlags es_lsh;
  auto* es_cmd = app.add_subcommand("eval-search", "proof-search evaluation over a whole corpus");
  es_cmd->add_option("corpus", es_paths, "JSONL corpus files")->required();
  es_cmd->add_option("--config", es_configs, "metric[@window], repeatable (default tfidf@all)");
  es_cmd->add_option("--budget-expansions", es_exp, "maximum node expansions per search");
  es_cmd->add_option("--budget-seconds", es_sec, "wall-clock limit per search");
  es_cmd->add_option("--k", es_k, "predictions tried per node")->check(CLI::PositiveNumber);
  es_cmd->add_option("--kernel", es_kernel, "rule kernel JSON (default: replay recorded pairs)");
  es_cmd->add_option("--out", es_out, "per-development CSV (default stdout)");
  es_cmd->add_option("--lemmas-out", es_lemmas_out, "per-lemma CSV");
  es_cmd->add_option("--hist-out", es_hist_out, "found-proof length histogram CSV");
  es_cmd->add_option("--orig-hist-out", es_orig_hist_out, "original proof length histogram CSV");
  es_lsh.attach(es_cmd);

  // record
  std::vector<std::string> rec_paths;
  std::string rec_kernel, rec_out;
  auto* rec_cmd = app.add_subcommand("record", "run instrumented scripts on a rule kernel and emit pair records");
  rec_cmd->add_option("scripts", rec_paths, "JSONL files with headers and script records")->required();
  rec_cmd->add_option("--kernel", rec_kernel, "rule kernel JSON")->required();
  rec_cmd->add_option("--out", rec_out, "output JSONL (default stdout)");

  // stats
  std::vector<std::string> stats_paths;
  std::string stats_out, stats_hist_out;
  auto* stats_cmd = app.add_subcommand("stats", "proof length quartiles and histogram");
  stats_cmd->add_option("corpus", stats_paths, "JSONL corpus files")->required();
  stats_cmd->add_option("--out", stats_out, "per-development CSV (default stdout)");
  stats_cmd->add_option("--hist-out", stats_hist_out, "length histogram CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    const std::uint64_t seed = detail::resolve_seed(seed_flag);

    if (*ingest_cmd) {
      Corpus corpus = ingest(ingest_paths);
      err << "ok: " << corpus.files.size() << " files, " << corpus.lemma_count() << " lemmas, " << corpus.pair_count()
          << " pairs\n";
      if (!export_path.empty()) {
        detail::Output o(export_path, out);
        export_corpus(corpus, *o);
      }
      return kExitOk;
    }

    if (*knn_cmd) {
      PredictionEvalConfig config;
      config.predictor = detail::predictor_or_throw(knn_metric);
      config.k_max = knn_kmax;
      config.intra_lemma = knn_intra;
      config.window = detail::window_or_throw(knn_window);
      config.seed = seed;
      config.lsh = knn_lsh.config(seed);
      config.lsh_weighted_rerank = knn_lsh.weighted();
      config.threads = threads;
      Corpus corpus = ingest(knn_paths);
      CumulativeCurve curve = eval_predictions(corpus, config);
      detail::Output o(knn_out, out);
      write_curve_csv(curve, *o);
      err << "pairs " << curve.pairs << ", top-1 " << fixed6(curve.proportion.front()) << ", theoretical max "
          << fixed6(curve.theoretical_max) << '\n';
      return kExitOk;
    }

    if (*search_cmd) {
      Corpus corpus = ingest(search_paths);
      corpus.validate_dependencies();
      const CorpusFile* file = corpus.find(search_file);
      if (!file) throw CorpusError("no file '" + search_file + "'");
      std::size_t fi = static_cast<std::size_t>(file - corpus.files.data());
      auto lemma_it = std::find_if(file->lemmas.begin(), file->lemmas.end(),
                                   [&](const Lemma& l) { return l.name == search_lemma; });
      if (lemma_it == file->lemmas.end()) throw CorpusError("no lemma '" + search_lemma + "' in " + search_file);
      auto statement = lemma_it->statement();
      if (!statement) throw CorpusError("lemma '" + search_lemma + "' has no statement");

      PredictorKind kind = detail::predictor_or_throw(search_predictor);
      Window window = detail::window_or_throw(search_window);
      CorpusFeatures features = corpus_features(corpus);
      TacticLearner learner(kind == PredictorKind::Lshf, search_lsh.config(seed), search_lsh.weighted());
      tactic_forge::detail::seed_from_dependencies(learner, corpus, features, fi);
      for (std::size_t li = 0; &file->lemmas[li] != &*lemma_it; ++li)
        for (std::size_t pi = 0; pi < file->lemmas[li].pairs.size(); ++pi)
          learner.insert(file->name, file->lemmas[li].name, features[fi][li][pi], file->lemmas[li].pairs[pi].tactic);

      auto env = detail::make_env(search_kernel, corpus);
      DbView view = learner.view(window.filter_for(file->name));
      std::size_t ordinal = 0;
      Predictor predictor = [&](const FeatureSet& q, std::size_t k) {
        return learner.predict(kind, view, q, k, tactic_forge::detail::query_seed(seed, fi, ordinal++));
      };
      GoalStack root{{*statement}};
      SearchResult result = diagonal_search(*env, root, predictor, detail::budget_from(search_exp, search_sec, search_k));
      out << "outcome: " << outcome_name(result.outcome) << '\n';
      if (result.found()) {
        out << "script:";
        for (const auto& t : result.script) out << ' ' << t << '.';
        out << '\n';
      }
      out << "expansions: " << result.stats.expansions << "\napplications: " << result.stats.applications
          << "\nmax_depth: " << result.stats.max_depth << '\n';
      return kExitOk;
    }

    if (*es_cmd) {
      SearchBudget budget = detail::budget_from(es_exp, es_sec, es_k);
      std::vector<SearchConfig> configs;
      if (es_configs.empty()) es_configs.push_back("tfidf@all");
      for (const auto& c : es_configs) configs.push_back(detail::parse_config(c, budget));
      Corpus corpus = ingest(es_paths);
      auto env = detail::make_env(es_kernel, corpus);
      SearchEvalOptions options;
      options.seed = seed;
      options.lsh = es_lsh.config(seed);
      options.lsh_weighted_rerank = es_lsh.weighted();
      options.threads = threads;
      SearchReport report = eval_search(corpus, configs, *env, options);
      {
        detail::Output o(es_out, out);
        write_search_report_csv(report, *o);
      }
      if (!es_lemmas_out.empty()) {
        detail::Output o(es_lemmas_out, out);
        write_lemma_records_csv(report, *o);
      }
      if (!es_hist_out.empty()) {
        detail::Output o(es_hist_out, out);
        write_histogram_csv(report.found_histogram, *o);
      }
      if (!es_orig_hist_out.empty()) {
        detail::Output o(es_orig_hist_out, out);
        write_histogram_csv(report.original_histogram, *o);
      }
      err << report.lemmas.size() << " lemmas searched, union success " << fixed6(report.total.union_success) << '\n';
      return kExitOk;
    }

    if (*rec_cmd) {
      RuleKernel kernel = RuleKernel::load(rec_kernel);
      Corpus scripts = ingest(rec_paths);
      detail::Output o(rec_out, out);
      JsonlSink sink(*o);
      std::size_t solved = 0, failed = 0;
      for (const auto& f : scripts.files) {
        *o << header_json(f).dump() << '\n';
        RecordingSession session(f.name, sink);
        for (const auto& l : f.lemmas) {
          if (!l.script || !l.root) {
            err << "warning: " << f.name << ':' << l.name << " has no script or goal; skipped\n";
            ++failed;
            continue;
          }
          *o << script_json(f.name, l).dump() << '\n';
          ProofOutcome outcome = record_lemma(kernel, session, l.name, *l.root, *l.script);
          if (outcome.is_solved()) {
            session.flush();
            ++solved;
          } else {
            err << "warning: " << f.name << ':' << l.name << " not proved by its script ("
                << (outcome.is_failure() ? failure_name(outcome.reason) : "open goals remain") << "); pairs dropped\n";
            session.discard();
            ++failed;
          }
        }
      }
      err << "recorded " << solved << " lemmas, " << failed << " failed\n";
      return kExitOk;
    }

    if (*stats_cmd) {
      Corpus corpus = ingest(stats_paths);
      LengthStats stats = length_stats(corpus);
      {
        detail::Output o(stats_out, out);
        write_length_stats_csv(stats, *o);
      }
      if (!stats_hist_out.empty()) {
        detail::Output o(stats_hist_out, out);
        write_histogram_csv(stats.histogram, *o);
      }
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const CorpusError& e) {
    err << "corpus error:\n" << e.what() << '\n';
    return kExitCorpus;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << '\n';
    return kExitCorpus;
  } catch (const KernelError& e) {
    err << "kernel error: " << e.what() << '\n';
    return kExitCorpus;
  } catch (const ScriptParseError& e) {
    err << "script error: " << e.what() << '\n';
    return kExitCorpus;
  }
  return kExitUsage;
}

}  // namespace tactic_forge::cli
