#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>

#include "tactic_forge/features.hpp"
#include "tactic_forge/tactic_db.hpp"

namespace tactic_forge {

inline std::size_t intersection_size(const FeatureSet& a, const FeatureSet& b) {
  std::size_t n = 0;
  auto i = a.begin(), j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

inline double cosine(const FeatureSet& a, const FeatureSet& b) {
  if (a.empty() || b.empty()) return 0.0;
  return static_cast<double>(intersection_size(a, b)) /
         std::sqrt(static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

/// Distance, lower is closer.
inline double euclid(const FeatureSet& a, const FeatureSet& b) {
  std::size_t inter = intersection_size(a, b);
  std::size_t uni = a.size() + b.size() - inter;
  return std::sqrt(static_cast<double>(uni - inter));
}

inline double jaccard(const FeatureSet& a, const FeatureSet& b) {
  std::size_t inter = intersection_size(a, b);
  std::size_t uni = a.size() + b.size() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

/// Jaccard with per-feature weights. Both sums run in ascending feature-id order.
template <class WeightFn>
  requires std::invocable<WeightFn&, FeatureId>
double weighted_jaccard(const FeatureSet& a, const FeatureSet& b, WeightFn&& weight) {
  double inter = 0.0, uni = 0.0;
  auto i = a.begin(), j = b.begin();
  while (i != a.end() || j != b.end()) {
    if (j == b.end() || (i != a.end() && *i < *j)) {
      uni += weight(*i++);
    } else if (i == a.end() || *j < *i) {
      uni += weight(*j++);
    } else {
      double w = weight(*i);
      inter += w;
      uni += w;
      ++i;
      ++j;
    }
  }
  return uni == 0.0 ? 0.0 : inter / uni;
}

inline double weighted_jaccard(const FeatureSet& a, const FeatureSet& b, const TacticDatabase& db) {
  return weighted_jaccard(a, b, [&db](FeatureId id) { return db.tfidf(id); });
}

}  // namespace tactic_forge
