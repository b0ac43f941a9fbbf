#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <exception>
#include <functional>
#include <mutex>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_set>
#include <vector>

#include "tactic_forge/corpus.hpp"
#include "tactic_forge/lsh_forest.hpp"
#include "tactic_forge/predictors.hpp"
#include "tactic_forge/replay_kernel.hpp"
#include "tactic_forge/search.hpp"

namespace tactic_forge {

enum class PredictorKind { Cosine, Euclid, Jaccard, Tfidf, Lshf, Random, Reverse };

inline std::optional<PredictorKind> parse_predictor(std::string_view name) {
  if (name == "cosine") return PredictorKind::Cosine;
  if (name == "euclid") return PredictorKind::Euclid;
  if (name == "jaccard") return PredictorKind::Jaccard;
  if (name == "tfidf") return PredictorKind::Tfidf;
  if (name == "lshf") return PredictorKind::Lshf;
  if (name == "random") return PredictorKind::Random;
  if (name == "reverse") return PredictorKind::Reverse;
  return std::nullopt;
}

inline std::string_view predictor_name(PredictorKind k) {
  switch (k) {
    case PredictorKind::Cosine: return "cosine";
    case PredictorKind::Euclid: return "euclid";
    case PredictorKind::Jaccard: return "jaccard";
    case PredictorKind::Tfidf: return "tfidf";
    case PredictorKind::Lshf: return "lshf";
    case PredictorKind::Random: return "random";
    case PredictorKind::Reverse: return "reverse";
  }
  return "?";
}

/// Database window: current file only, the last N entries, or everything.
struct Window {
  enum class Kind { File, LastN, All };
  Kind kind = Kind::All;
  std::size_t n = 0;

  static Window file() { return {Kind::File, 0}; }
  static Window last(std::size_t n) { return {Kind::LastN, n}; }
  static Window all() { return {Kind::All, 0}; }

  DbFilter filter_for(const std::string& current_file) const {
    switch (kind) {
      case Kind::File: return DbFilter::file_only(current_file);
      case Kind::LastN: return DbFilter::last(n);
      case Kind::All: break;
    }
    return DbFilter::all();
  }

  std::string name() const {
    switch (kind) {
      case Kind::File: return "file";
      case Kind::LastN: return "last:" + std::to_string(n);
      case Kind::All: break;
    }
    return "all";
  }
};

/// Parses "file", "all" or "last:N".
inline std::optional<Window> parse_window(std::string_view text) {
  if (text == "file") return Window::file();
  if (text == "all") return Window::all();
  if (text.starts_with("last:")) {
    std::string_view digits = text.substr(5);
    std::size_t n = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (ec == std::errc() && ptr == digits.data() + digits.size() && !digits.empty()) return Window::last(n);
  }
  return std::nullopt;
}

/// A growing tactic database with an optional LSH forest kept in step.
class TacticLearner {
 public:
  explicit TacticLearner(bool with_forest = false, LshForestConfig lsh = {}, bool weighted_rerank = false)
      : weighted_rerank_(weighted_rerank) {
    if (with_forest) forest_.emplace(lsh);
  }

  Seq insert(const std::string& file, const std::string& lemma, const FeatureSet& features, std::string_view tactic) {
    Seq seq = db_.insert(file, lemma, features, tactic);
    if (forest_ && !features.empty()) forest_->insert(seq, features, db_.entries().back().tactic);
    return seq;
  }

  const TacticDatabase& db() const { return db_; }
  DbView view(DbFilter filter) const { return db_.view(std::move(filter)); }

  std::vector<Prediction> predict(PredictorKind kind, const DbView& view, const FeatureSet& query, std::size_t k,
                                  std::uint64_t seed) const {
    switch (kind) {
      case PredictorKind::Cosine: return knn_predict(view, query, k, Metric::Cosine);
      case PredictorKind::Euclid: return knn_predict(view, query, k, Metric::Euclid);
      case PredictorKind::Jaccard: return knn_predict(view, query, k, Metric::Jaccard);
      case PredictorKind::Tfidf: return knn_predict(view, query, k, Metric::WeightedJaccard);
      case PredictorKind::Random: return random_predict(view, k, seed);
      case PredictorKind::Reverse: return reverse_predict(view, k);
      case PredictorKind::Lshf: break;
    }
    if (!forest_) throw std::logic_error("TacticLearner: LSHF prediction needs a forest");
    if (query.empty()) return knn_predict(view, query, k, weighted_rerank_ ? Metric::WeightedJaccard : Metric::Jaccard);
    LshQueryOptions options;
    std::size_t begin = view.window_begin(), end = view.window_end();
    options.filter = [&](Seq seq) {
      auto index = static_cast<std::size_t>(seq);
      return index >= begin && index < end && view.accepts(db_.at(index));
    };
    if (weighted_rerank_) options.weight = [this](FeatureId id) { return db_.tfidf(id); };
    return forest_->query(query, k, options);
  }

 private:
  TacticDatabase db_;
  std::optional<LshForest> forest_;
  bool weighted_rerank_;
};

/// Features of every pair, indexed [file][lemma][pair].
using CorpusFeatures = std::vector<std::vector<std::vector<FeatureSet>>>;

inline CorpusFeatures corpus_features(const Corpus& corpus) {
  CorpusFeatures out;
  for (const auto& f : corpus.files) {
    auto& file_out = out.emplace_back();
    for (const auto& l : f.lemmas) {
      auto& lemma_out = file_out.emplace_back();
      for (const auto& p : l.pairs) lemma_out.push_back(state_features(p.state));
    }
  }
  return out;
}

namespace detail {

inline std::size_t file_index(const Corpus& corpus, const CorpusFile* f) {
  return static_cast<std::size_t>(f - corpus.files.data());
}

/// Loads every pair of the file's transitive dependencies.
inline void seed_from_dependencies(TacticLearner& learner, const Corpus& corpus, const CorpusFeatures& features,
                                   std::size_t file) {
  for (const CorpusFile* dep : corpus.dependency_cone(corpus.files[file].name)) {
    std::size_t d = file_index(corpus, dep);
    for (std::size_t l = 0; l < dep->lemmas.size(); ++l)
      for (std::size_t p = 0; p < dep->lemmas[l].pairs.size(); ++p) {
        const PairRecord& pair = dep->lemmas[l].pairs[p];
        learner.insert(dep->name, pair.lemma, features[d][l][p], pair.tactic);
      }
  }
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers.
template <class Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  for (std::size_t t = 0; t < threads; ++t) {
    workers.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  if (error) std::rethrow_exception(error);
}

inline bool view_has_tactic(const DbView& view, const std::string& tactic) {
  bool found = false;
  view.for_each([&](const TacticEntry& e) { found = found || e.tactic == tactic; });
  return found;
}

inline std::uint64_t query_seed(std::uint64_t seed, std::size_t file, std::size_t ordinal) {
  return mix64(seed ^ mix64((static_cast<std::uint64_t>(file) << 32) ^ ordinal));
}

}  // namespace detail

struct PredictionEvalConfig {
  PredictorKind predictor = PredictorKind::Jaccard;
  std::size_t k_max = 30;
  bool intra_lemma = true;
  Window window = Window::all();
  std::uint64_t seed = 0;
  LshForestConfig lsh;
  bool lsh_weighted_rerank = false;
  std::size_t threads = 1;
};

/// Fraction of pairs whose true tactic is within the top k, for k = 1..k_max.
struct CumulativeCurve {
  std::vector<double> proportion;
  std::size_t pairs = 0;
  std::size_t predictable = 0;  // true tactic present in the query view
  double theoretical_max = 0.0;
};

/// Replays the corpus file by file. Each file starts from its dependencies'
/// pairs only; each pair is predicted from earlier pairs and inserted after.
inline CumulativeCurve eval_predictions(const Corpus& corpus, const PredictionEvalConfig& config) {
  if (config.k_max == 0) throw std::invalid_argument("eval_predictions: k_max must be >= 1");
  corpus.validate_dependencies();
  CorpusFeatures features = corpus_features(corpus);

  struct Tally {
    std::vector<std::size_t> hits_at_rank;
    std::size_t pairs = 0, predictable = 0;
  };
  std::vector<Tally> tallies(corpus.files.size());

  detail::parallel_for(corpus.files.size(), config.threads, [&](std::size_t fi) {
    const CorpusFile& file = corpus.files[fi];
    Tally& tally = tallies[fi];
    tally.hits_at_rank.assign(config.k_max, 0);
    TacticLearner learner(config.predictor == PredictorKind::Lshf, config.lsh, config.lsh_weighted_rerank);
    detail::seed_from_dependencies(learner, corpus, features, fi);
    std::size_t ordinal = 0;
    for (std::size_t li = 0; li < file.lemmas.size(); ++li) {
      const Lemma& lemma = file.lemmas[li];
      for (std::size_t pi = 0; pi < lemma.pairs.size(); ++pi) {
        const PairRecord& pair = lemma.pairs[pi];
        DbFilter filter = config.window.filter_for(file.name);
        if (!config.intra_lemma) filter = filter.excluding(lemma.name);
        DbView view = learner.view(filter);
        std::vector<Prediction> preds = learner.predict(config.predictor, view, features[fi][li][pi], config.k_max,
                                                        detail::query_seed(config.seed, fi, ordinal++));
        for (std::size_t r = 0; r < preds.size(); ++r) {
          if (preds[r].tactic == pair.tactic) {
            ++tally.hits_at_rank[r];
            break;
          }
        }
        ++tally.pairs;
        if (detail::view_has_tactic(view, pair.tactic)) ++tally.predictable;
        learner.insert(file.name, lemma.name, features[fi][li][pi], pair.tactic);
      }
    }
  });

  CumulativeCurve curve;
  std::vector<std::size_t> hits(config.k_max, 0);
  for (const Tally& t : tallies) {
    curve.pairs += t.pairs;
    curve.predictable += t.predictable;
    for (std::size_t r = 0; r < config.k_max; ++r) hits[r] += t.hits_at_rank[r];
  }
  std::size_t cumulative = 0;
  for (std::size_t r = 0; r < config.k_max; ++r) {
    cumulative += hits[r];
    curve.proportion.push_back(curve.pairs ? static_cast<double>(cumulative) / static_cast<double>(curve.pairs) : 0.0);
  }
  curve.theoretical_max = curve.pairs ? static_cast<double>(curve.predictable) / static_cast<double>(curve.pairs) : 0.0;
  return curve;
}

/// Fraction of pairs whose true tactic is present in the view they are predicted from.
inline double theoretical_max(const Corpus& corpus, const PredictionEvalConfig& config) {
  corpus.validate_dependencies();
  std::size_t pairs = 0, predictable = 0;
  for (std::size_t fi = 0; fi < corpus.files.size(); ++fi) {
    const CorpusFile& file = corpus.files[fi];
    TacticDatabase db;
    for (const CorpusFile* dep : corpus.dependency_cone(file.name))
      for (const auto& l : dep->lemmas)
        for (const auto& p : l.pairs) db.insert(dep->name, p.lemma, {}, p.tactic);
    for (const auto& lemma : file.lemmas) {
      for (const auto& p : lemma.pairs) {
        DbFilter filter = config.window.filter_for(file.name);
        if (!config.intra_lemma) filter = filter.excluding(lemma.name);
        ++pairs;
        if (detail::view_has_tactic(db.view(filter), p.tactic)) ++predictable;
        db.insert(file.name, lemma.name, {}, p.tactic);
      }
    }
  }
  return pairs ? static_cast<double>(predictable) / static_cast<double>(pairs) : 0.0;
}

/// Nearest-rank quantile of a non-empty sample.
inline std::size_t nearest_rank(std::vector<std::size_t> values, double p) {
  if (values.empty()) return 0;
  std::sort(values.begin(), values.end());
  auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(values.size())));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

struct LengthRow {
  std::string development;
  std::size_t lemmas = 0;
  std::size_t q2 = 0, q3 = 0, max = 0;
};

struct LengthStats {
  std::vector<LengthRow> rows;                  // one per development, first-seen order
  LengthRow total;
  std::map<std::size_t, std::size_t> histogram;  // length -> lemma count
};

namespace detail {

inline LengthRow length_row(std::string name, const std::vector<std::size_t>& lengths) {
  LengthRow row{std::move(name), lengths.size(), 0, 0, 0};
  if (!lengths.empty()) {
    row.q2 = nearest_rank(lengths, 0.5);
    row.q3 = nearest_rank(lengths, 0.75);
    row.max = *std::max_element(lengths.begin(), lengths.end());
  }
  return row;
}

}  // namespace detail

/// Proof length = number of recorded pairs. Lemmas without pairs are skipped.
inline LengthStats length_stats(const Corpus& corpus) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::size_t>> by_dev;
  std::vector<std::size_t> all;
  LengthStats stats;
  for (const auto& f : corpus.files) {
    std::string dev = development_of(f.name);
    for (const auto& l : f.lemmas) {
      if (l.pairs.empty()) continue;
      if (!by_dev.count(dev)) order.push_back(dev);
      by_dev[dev].push_back(l.pairs.size());
      all.push_back(l.pairs.size());
      ++stats.histogram[l.pairs.size()];
    }
  }
  for (const auto& dev : order) stats.rows.push_back(detail::length_row(dev, by_dev[dev]));
  stats.total = detail::length_row("total", all);
  return stats;
}

struct SearchConfig {
  std::string name;
  PredictorKind predictor = PredictorKind::Tfidf;
  Window window = Window::all();
  SearchBudget budget = SearchBudget::expansions(10000);
};

struct LemmaSearchRecord {
  std::string file;
  std::string lemma;
  std::size_t original_length = 0;
  struct Attempt {
    bool success = false;
    std::size_t found_length = 0;
    double seconds = 0.0;
    std::size_t expansions = 0;
    std::vector<std::string> script;
  };
  std::vector<Attempt> attempts;  // one per configuration

  bool any_success() const {
    return std::any_of(attempts.begin(), attempts.end(), [](const Attempt& a) { return a.success; });
  }
  /// Shortest proof found by any configuration; 0 if none.
  std::size_t best_length() const {
    std::size_t best = 0;
    for (const auto& a : attempts)
      if (a.success && (best == 0 || a.found_length < best)) best = a.found_length;
    return best;
  }
};

struct DevelopmentRow {
  LengthRow lengths;
  std::vector<double> success;  // per configuration
  double union_success = 0.0;
};

struct SearchReport {
  std::vector<std::string> config_names;
  std::vector<LemmaSearchRecord> lemmas;
  std::vector<DevelopmentRow> rows;
  DevelopmentRow total;
  std::map<std::size_t, std::size_t> found_histogram;     // shortest found length -> count
  std::map<std::size_t, std::size_t> original_histogram;  // original length -> count
};

struct SearchEvalOptions {
  std::uint64_t seed = 0;
  LshForestConfig lsh;
  bool lsh_weighted_rerank = false;
  std::size_t threads = 1;
  std::function<void(const LemmaSearchRecord&)> progress;
};

/// ProofEnv that replays every pair carrying its produced goals.
inline ReplayKernel replay_kernel_from(const Corpus& corpus) {
  ReplayKernel kernel;
  for (const auto& f : corpus.files)
    for (const auto& l : f.lemmas)
      for (const auto& p : l.pairs)
        if (p.children) kernel.add_edge(p.state, p.tactic, *p.children);
  return kernel;
}

namespace detail {

inline DevelopmentRow development_row(std::string name, const std::vector<const LemmaSearchRecord*>& recs,
                                      std::size_t configs) {
  std::vector<std::size_t> lengths;
  for (const auto* r : recs) lengths.push_back(r->original_length);
  DevelopmentRow row{length_row(std::move(name), lengths), std::vector<double>(configs, 0.0), 0.0};
  if (recs.empty()) return row;
  double n = static_cast<double>(recs.size());
  std::size_t any = 0;
  for (std::size_t c = 0; c < configs; ++c) {
    std::size_t ok = 0;
    for (const auto* r : recs) ok += r->attempts[c].success;
    row.success[c] = static_cast<double>(ok) / n;
  }
  for (const auto* r : recs) any += r->any_success();
  row.union_success = static_cast<double>(any) / n;
  return row;
}

}  // namespace detail

/// For each lemma in file order, searches for a proof under every
/// configuration using the database as it stood before the lemma, then adds
/// the lemma's recorded pairs whether or not a proof was found.
inline SearchReport eval_search(const Corpus& corpus, const std::vector<SearchConfig>& configs, const ProofEnv& env,
                                const SearchEvalOptions& options = {}) {
  corpus.validate_dependencies();
  CorpusFeatures features = corpus_features(corpus);
  bool needs_forest = std::any_of(configs.begin(), configs.end(),
                                  [](const SearchConfig& c) { return c.predictor == PredictorKind::Lshf; });

  std::vector<std::vector<LemmaSearchRecord>> per_file(corpus.files.size());
  detail::parallel_for(corpus.files.size(), options.threads, [&](std::size_t fi) {
    const CorpusFile& file = corpus.files[fi];
    TacticLearner learner(needs_forest, options.lsh, options.lsh_weighted_rerank);
    detail::seed_from_dependencies(learner, corpus, features, fi);
    std::size_t ordinal = 0;
    for (std::size_t li = 0; li < file.lemmas.size(); ++li) {
      const Lemma& lemma = file.lemmas[li];
      std::optional<ProofState> statement = lemma.statement();
      if (statement) {
        LemmaSearchRecord rec{file.name, lemma.name, lemma.pairs.size(), {}};
        GoalStack root{{*statement}};
        for (const SearchConfig& config : configs) {
          DbView view = learner.view(config.window.filter_for(file.name));
          Predictor predictor = [&](const FeatureSet& q, std::size_t k) {
            return learner.predict(config.predictor, view, q, k, detail::query_seed(options.seed, fi, ordinal++));
          };
          SearchResult result = diagonal_search(env, root, predictor, config.budget);
          LemmaSearchRecord::Attempt attempt{false, 0, result.stats.elapsed_seconds, result.stats.expansions, {}};
          if (result.found() && replay(env, root, result.script).outcome.is_solved()) {
            attempt.success = true;
            attempt.found_length = result.script.size();
            attempt.script = std::move(result.script);
          }
          rec.attempts.push_back(std::move(attempt));
        }
        if (options.progress) options.progress(rec);
        per_file[fi].push_back(std::move(rec));
      }
      for (std::size_t pi = 0; pi < lemma.pairs.size(); ++pi)
        learner.insert(file.name, lemma.name, features[fi][li][pi], lemma.pairs[pi].tactic);
    }
  });

  SearchReport report;
  for (const auto& c : configs) report.config_names.push_back(c.name);
  for (auto& recs : per_file)
    for (auto& r : recs) report.lemmas.push_back(std::move(r));

  std::vector<std::string> order;
  std::map<std::string, std::vector<const LemmaSearchRecord*>> by_dev;
  std::vector<const LemmaSearchRecord*> all;
  for (const auto& r : report.lemmas) {
    std::string dev = development_of(r.file);
    if (!by_dev.count(dev)) order.push_back(dev);
    by_dev[dev].push_back(&r);
    all.push_back(&r);
    ++report.original_histogram[r.original_length];
    if (r.any_success()) ++report.found_histogram[r.best_length()];
  }
  for (const auto& dev : order) report.rows.push_back(detail::development_row(dev, by_dev[dev], configs.size()));
  report.total = detail::development_row("total", all, configs.size());
  return report;
}

// ---- CSV emitters (fixed column order, six decimals) ----

inline std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

inline void write_curve_csv(const CumulativeCurve& curve, std::ostream& out) {
  out << "k,proportion\n";
  for (std::size_t k = 0; k < curve.proportion.size(); ++k) out << (k + 1) << ',' << fixed6(curve.proportion[k]) << '\n';
}

inline void write_histogram_csv(const std::map<std::size_t, std::size_t>& hist, std::ostream& out) {
  out << "length,count\n";
  for (const auto& [len, count] : hist) out << len << ',' << count << '\n';
}

inline void write_search_report_csv(const SearchReport& report, std::ostream& out) {
  out << "development,lemmas,q2,q3,max";
  for (const auto& name : report.config_names) out << ',' << name;
  out << ",union\n";
  auto row = [&](const DevelopmentRow& r) {
    out << r.lengths.development << ',' << r.lengths.lemmas << ',' << r.lengths.q2 << ',' << r.lengths.q3 << ','
        << r.lengths.max;
    for (double s : r.success) out << ',' << fixed6(s);
    out << ',' << fixed6(r.union_success) << '\n';
  };
  for (const auto& r : report.rows) row(r);
  row(report.total);
}

inline void write_lemma_records_csv(const SearchReport& report, std::ostream& out) {
  out << "file,lemma,original_length,config,success,found_length,expansions\n";
  for (const auto& r : report.lemmas)
    for (std::size_t c = 0; c < r.attempts.size(); ++c)
      out << r.file << ',' << r.lemma << ',' << r.original_length << ',' << report.config_names[c] << ','
          << (r.attempts[c].success ? 1 : 0) << ',' << r.attempts[c].found_length << ',' << r.attempts[c].expansions
          << '\n';
}

inline void write_length_stats_csv(const LengthStats& stats, std::ostream& out) {
  out << "development,lemmas,q2,q3,max\n";
  auto row = [&](const LengthRow& r) { out << r.development << ',' << r.lemmas << ',' << r.q2 << ',' << r.q3 << ',' << r.max << '\n'; };
  for (const auto& r : stats.rows) row(r);
  row(stats.total);
}

}  // namespace tactic_forge
