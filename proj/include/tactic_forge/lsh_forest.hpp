#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tactic_forge/predictors.hpp"

namespace tactic_forge {

class EmptySet : public std::invalid_argument {
 public:
  EmptySet() : std::invalid_argument("MinHash is undefined on an empty feature set") {}
};

inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// D seeded MinHash functions over feature ids.
class HashFamily {
 public:
  HashFamily(std::uint64_t seed, std::size_t depth) : seed_(seed) {
    seeds_.reserve(depth);
    std::uint64_t state = seed;
    for (std::size_t i = 0; i < depth; ++i) {
      state += 0x9e3779b97f4a7c15ULL;
      seeds_.push_back(mix64(state));
    }
  }

  std::size_t depth() const { return seeds_.size(); }
  std::uint64_t seed() const { return seed_; }

  std::uint64_t hash(std::size_t i, FeatureId x) const {
    return mix64((static_cast<std::uint64_t>(x) * 0x9e3779b97f4a7c15ULL) ^ seeds_[i]);
  }

 private:
  std::uint64_t seed_;
  std::vector<std::uint64_t> seeds_;
};

using MinHashSignature = std::vector<std::uint64_t>;

inline MinHashSignature signature(const FeatureSet& features, const HashFamily& family) {
  if (features.empty()) throw EmptySet();
  MinHashSignature sig(family.depth(), ~std::uint64_t{0});
  for (FeatureId x : features)
    for (std::size_t i = 0; i < sig.size(); ++i) sig[i] = std::min(sig[i], family.hash(i, x));
  return sig;
}

struct LshForestConfig {
  std::size_t trees = 16;
  std::size_t depth = 32;
  std::size_t pool_cap = 1024;
  std::uint64_t seed = 0x5eed;
};

struct LshQueryStats {
  std::size_t scored = 0;      // candidates scored exactly
  std::size_t deepest = 0;     // longest prefix matched in any tree
};

struct LshQueryOptions {
  std::function<bool(Seq)> filter;              // candidates failing this are skipped
  std::function<double(FeatureId)> weight;      // rerank with weighted Jaccard when set
  LshQueryStats* stats = nullptr;
};

/// MinHash prefix-tree forest approximating Jaccard neighbours.
///
/// Each item gets a D-coordinate signature, each coordinate reduced to an
/// 8-bit bucket. Tree t orders items lexicographically by the buckets read in
/// a tree-specific axis order, so all items sharing a length-d prefix with a
/// query form one contiguous run. Queries start at the deepest shared prefix
/// in every tree and widen one level at a time, in lockstep across trees,
/// until pool_cap candidates are gathered. Candidates are then rescored with
/// exact (weighted) Jaccard.
///
/// Not synchronized: one writer, readers must not overlap with insert().
class LshForest {
 public:
  explicit LshForest(LshForestConfig config = {})
      : config_(config), family_(config.seed, config.depth), store_(std::make_unique<Store>()) {
    if (config_.trees == 0 || config_.depth == 0 || config_.pool_cap == 0)
      throw std::invalid_argument("LshForest: trees, depth and pool_cap must be positive");
    std::mt19937_64 rng(mix64(config_.seed ^ 0xf0e5ULL));
    for (std::size_t t = 0; t < config_.trees; ++t) {
      std::vector<std::uint16_t> order(config_.depth);
      std::iota(order.begin(), order.end(), std::uint16_t{0});
      if (t > 0) std::shuffle(order.begin(), order.end(), rng);
      store_->orders.push_back(std::move(order));
    }
    for (std::size_t t = 0; t < config_.trees; ++t) trees_.emplace_back(TreeOrder{store_.get(), t});
  }

  const LshForestConfig& config() const { return config_; }
  const HashFamily& family() const { return family_; }
  std::size_t size() const { return store_->items.size(); }

  void insert(Seq seq, const FeatureSet& features, std::string_view tactic) {
    if (features.empty()) throw EmptySet();
    if (!seqs_.insert(seq).second) throw std::invalid_argument("LshForest: duplicate seq");
    auto index = static_cast<std::uint32_t>(store_->items.size());
    store_->items.push_back({seq, features, std::string(tactic), buckets_of(features)});
    for (auto& tree : trees_) tree.insert(index);
  }

  std::vector<Prediction> query(const FeatureSet& features, std::size_t k, const LshQueryOptions& options = {}) const {
    if (k == 0) throw std::invalid_argument("LshForest::query: k must be >= 1");
    LshQueryStats local;
    LshQueryStats& stats = options.stats ? *options.stats : local;
    stats = {};
    if (features.empty() || store_->items.empty()) return {};

    QueryKey key{buckets_of(features)};
    const std::size_t tree_count = trees_.size();
    std::vector<Cursor> cursors(tree_count);
    for (std::size_t t = 0; t < tree_count; ++t) {
      const Tree& tree = trees_[t];
      auto it = tree.lower_bound(key);
      std::size_t d = 0;
      if (it != tree.end()) d = std::max(d, prefix_match(t, *it, key));
      if (it != tree.begin()) d = std::max(d, prefix_match(t, *std::prev(it), key));
      cursors[t] = {it, it, d};
      stats.deepest = std::max(stats.deepest, d);
    }

    std::vector<std::uint32_t> pool;
    std::unordered_set<std::uint32_t> taken;
    auto take = [&](std::uint32_t index) {
      if (pool.size() >= config_.pool_cap || !taken.insert(index).second) return;
      if (options.filter && !options.filter(store_->items[index].seq)) return;
      pool.push_back(index);
    };

    for (std::size_t level = stats.deepest + 1; level-- > 0 && pool.size() < config_.pool_cap;) {
      for (std::size_t t = 0; t < tree_count && pool.size() < config_.pool_cap; ++t) {
        Cursor& c = cursors[t];
        if (c.depth < level) continue;
        const Tree& tree = trees_[t];
        while (c.lo != tree.begin() && pool.size() < config_.pool_cap) {
          auto prev = std::prev(c.lo);
          if (prefix_match(t, *prev, key) < level) break;
          c.lo = prev;
          take(*prev);
        }
        while (c.hi != tree.end() && pool.size() < config_.pool_cap) {
          if (prefix_match(t, *c.hi, key) < level) break;
          take(*c.hi);
          ++c.hi;
        }
      }
    }

    stats.scored = pool.size();
    PredictionCollector collector;
    for (std::uint32_t index : pool) {
      const Item& item = store_->items[index];
      double score = options.weight ? weighted_jaccard(features, item.features, options.weight)
                                    : jaccard(features, item.features);
      collector.offer(score, item.tactic, item.seq);
    }
    return std::move(collector).top(k);
  }

 private:
  struct Item {
    Seq seq;
    FeatureSet features;
    std::string tactic;
    std::vector<std::uint8_t> buckets;
  };

  struct Store {
    std::vector<Item> items;
    std::vector<std::vector<std::uint16_t>> orders;
  };

  struct QueryKey {
    std::vector<std::uint8_t> buckets;
  };

  struct TreeOrder {
    using is_transparent = void;
    const Store* store;
    std::size_t tree;

    int compare(const std::vector<std::uint8_t>& x, const std::vector<std::uint8_t>& y) const {
      for (std::uint16_t axis : store->orders[tree]) {
        if (x[axis] != y[axis]) return x[axis] < y[axis] ? -1 : 1;
      }
      return 0;
    }
    bool operator()(std::uint32_t a, std::uint32_t b) const {
      int c = compare(store->items[a].buckets, store->items[b].buckets);
      return c != 0 ? c < 0 : a < b;
    }
    bool operator()(std::uint32_t a, const QueryKey& q) const { return compare(store->items[a].buckets, q.buckets) < 0; }
    bool operator()(const QueryKey& q, std::uint32_t a) const { return compare(q.buckets, store->items[a].buckets) <= 0; }
  };

  using Tree = std::set<std::uint32_t, TreeOrder>;

  struct Cursor {
    Tree::const_iterator lo, hi;
    std::size_t depth = 0;
  };

  std::vector<std::uint8_t> buckets_of(const FeatureSet& features) const {
    MinHashSignature sig = signature(features, family_);
    std::vector<std::uint8_t> out(sig.size());
    for (std::size_t i = 0; i < sig.size(); ++i) out[i] = static_cast<std::uint8_t>(mix64(sig[i] ^ 0xb0c4e7ULL));
    return out;
  }

  std::size_t prefix_match(std::size_t tree, std::uint32_t index, const QueryKey& key) const {
    const auto& order = store_->orders[tree];
    const auto& b = store_->items[index].buckets;
    std::size_t d = 0;
    while (d < order.size() && b[order[d]] == key.buckets[order[d]]) ++d;
    return d;
  }

  LshForestConfig config_;
  HashFamily family_;
  std::unique_ptr<Store> store_;
  std::vector<Tree> trees_;
  std::unordered_set<Seq> seqs_;
};

}  // namespace tactic_forge
