#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tactic_forge/similarity.hpp"
#include "tactic_forge/tactic_db.hpp"

namespace tactic_forge {

/// Higher score is better for every predictor.
struct Prediction {
  double score = 0.0;
  std::string tactic;
  Seq source_seq = 0;

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

enum class Metric { Cosine, Euclid, Jaccard, WeightedJaccard };

inline std::string_view metric_name(Metric m) {
  switch (m) {
    case Metric::Cosine: return "cosine";
    case Metric::Euclid: return "euclid";
    case Metric::Jaccard: return "jaccard";
    case Metric::WeightedJaccard: return "tfidf";
  }
  return "?";
}

/// Similarity in "higher is better" orientation; euclid maps through 1/(1+d).
inline double similarity(Metric m, const FeatureSet& query, const FeatureSet& entry, const TacticDatabase& db) {
  switch (m) {
    case Metric::Cosine: return cosine(query, entry);
    case Metric::Euclid: return 1.0 / (1.0 + euclid(query, entry));
    case Metric::Jaccard: return jaccard(query, entry);
    case Metric::WeightedJaccard: return weighted_jaccard(query, entry, db);
  }
  return 0.0;
}

/// Strict ordering of a returned list: score desc, then seq desc, then tactic text.
inline bool prediction_before(const Prediction& x, const Prediction& y) {
  if (x.score != y.score) return x.score > y.score;
  if (x.source_seq != y.source_seq) return x.source_seq > y.source_seq;
  return x.tactic < y.tactic;
}

/// Collects the best-scoring candidate per tactic and emits the top k.
class PredictionCollector {
 public:
  void offer(double score, std::string_view tactic, Seq seq) {
    auto it = best_.find(std::string(tactic));
    if (it == best_.end()) {
      best_.emplace(std::string(tactic), Prediction{score, std::string(tactic), seq});
      return;
    }
    Prediction candidate{score, it->second.tactic, seq};
    if (prediction_before(candidate, it->second)) it->second = std::move(candidate);
  }

  std::vector<Prediction> top(std::size_t k) && {
    std::vector<Prediction> out;
    out.reserve(best_.size());
    for (auto& [_, p] : best_) out.push_back(std::move(p));
    k = std::min(k, out.size());
    std::partial_sort(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(k), out.end(), prediction_before);
    out.resize(k);
    return out;
  }

 private:
  std::unordered_map<std::string, Prediction> best_;
};

/// Exhaustive k-NN over every entry of the view.
inline std::vector<Prediction> knn_predict(const DbView& view, const FeatureSet& query, std::size_t k, Metric metric) {
  if (k == 0) throw std::invalid_argument("knn_predict: k must be >= 1");
  PredictionCollector collector;
  const TacticDatabase& db = view.source();
  view.for_each([&](const TacticEntry& e) { collector.offer(similarity(metric, query, e.features, db), e.tactic, e.seq); });
  return std::move(collector).top(k);
}

/// Distinct tactics, most recently added first.
inline std::vector<Prediction> reverse_predict(const DbView& view, std::size_t k) {
  if (k == 0) throw std::invalid_argument("reverse_predict: k must be >= 1");
  std::vector<const TacticEntry*> entries = view.entries();
  std::vector<Prediction> out;
  std::unordered_map<std::string_view, bool> seen;
  for (auto it = entries.rbegin(); it != entries.rend() && out.size() < k; ++it) {
    if (!seen.emplace((*it)->tactic, true).second) continue;
    double rank = static_cast<double>(out.size());
    out.push_back({1.0 / (1.0 + rank), (*it)->tactic, (*it)->seq});
  }
  return out;
}

/// k distinct tactics sampled without replacement; deterministic for a seed.
inline std::vector<Prediction> random_predict(const DbView& view, std::size_t k, std::uint64_t seed) {
  if (k == 0) throw std::invalid_argument("random_predict: k must be >= 1");
  std::vector<const TacticEntry*> distinct;
  std::unordered_map<std::string_view, std::size_t> index;
  view.for_each([&](const TacticEntry& e) {
    auto [it, inserted] = index.emplace(e.tactic, distinct.size());
    if (inserted) {
      distinct.push_back(&e);
    } else {
      distinct[it->second] = &e;  // keep the latest occurrence as source
    }
  });
  std::mt19937_64 rng(seed);
  std::shuffle(distinct.begin(), distinct.end(), rng);
  distinct.resize(std::min(k, distinct.size()));
  std::vector<Prediction> out;
  for (std::size_t r = 0; r < distinct.size(); ++r)
    out.push_back({1.0 / (1.0 + static_cast<double>(r)), distinct[r]->tactic, distinct[r]->seq});
  return out;
}

/// What proof search consumes: features of the focused goal and a list size.
using Predictor = std::function<std::vector<Prediction>(const FeatureSet&, std::size_t)>;

}  // namespace tactic_forge
