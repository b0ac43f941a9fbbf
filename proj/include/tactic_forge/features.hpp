#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <mutex>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tactic_forge/term.hpp"

namespace tactic_forge {

using FeatureId = std::uint32_t;

/// One-shingle (a node label) or two-shingle (ancestor label, descendant label).
struct Feature {
  enum class Kind : std::uint8_t { Unigram, Bigram };

  Kind kind = Kind::Unigram;
  std::string a;
  std::string b;

  static Feature unigram(std::string a) { return {Kind::Unigram, std::move(a), {}}; }
  static Feature bigram(std::string a, std::string b) { return {Kind::Bigram, std::move(a), std::move(b)}; }

  std::string text() const { return kind == Kind::Unigram ? a : a + "_" + b; }
  friend bool operator==(const Feature&, const Feature&) = default;
};

/// Process-wide bijection between features and dense ids. Safe for concurrent use.
class FeatureInterner {
 public:
  FeatureId intern(const Feature& f) {
    std::string key = key_of(f);
    {
      std::shared_lock lock(mutex_);
      if (auto it = ids_.find(key); it != ids_.end()) return it->second;
    }
    std::unique_lock lock(mutex_);
    auto [it, inserted] = ids_.try_emplace(std::move(key), static_cast<FeatureId>(features_.size()));
    if (inserted) features_.push_back(f);
    return it->second;
  }

  Feature lookup(FeatureId id) const {
    std::shared_lock lock(mutex_);
    return features_.at(id);
  }

  std::size_t size() const {
    std::shared_lock lock(mutex_);
    return features_.size();
  }

 private:
  // Labels never contain whitespace, so a space separator keeps keys injective.
  static std::string key_of(const Feature& f) {
    return f.kind == Feature::Kind::Unigram ? "u " + f.a : "b " + f.a + " " + f.b;
  }

  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, FeatureId> ids_;
  std::vector<Feature> features_;
};

inline FeatureInterner& global_interner() {
  static FeatureInterner interner;
  return interner;
}

/// Sorted set of interned feature ids.
class FeatureSet {
 public:
  FeatureSet() = default;
  FeatureSet(std::initializer_list<FeatureId> ids) : ids_(ids) { normalize(); }
  explicit FeatureSet(std::vector<FeatureId> ids) : ids_(std::move(ids)) { normalize(); }

  void insert(FeatureId id) {
    auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
    if (it == ids_.end() || *it != id) ids_.insert(it, id);
  }

  void merge(const FeatureSet& other) {
    std::vector<FeatureId> out;
    out.reserve(ids_.size() + other.ids_.size());
    std::set_union(ids_.begin(), ids_.end(), other.ids_.begin(), other.ids_.end(), std::back_inserter(out));
    ids_ = std::move(out);
  }

  bool contains(FeatureId id) const { return std::binary_search(ids_.begin(), ids_.end(), id); }
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  std::span<const FeatureId> ids() const { return ids_; }
  auto begin() const { return ids_.begin(); }
  auto end() const { return ids_.end(); }

  friend bool operator==(const FeatureSet&, const FeatureSet&) = default;

 private:
  void normalize() {
    std::sort(ids_.begin(), ids_.end());
    ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
  }

  std::vector<FeatureId> ids_;
};

/// Hypothesis types plus goal. Hypothesis names are not part of the state.
struct ProofState {
  std::vector<Term> hypotheses;
  Term goal;

  friend bool operator==(const ProofState&, const ProofState&) = default;
};

/// Canonical single-line text of a state; used as a dictionary key.
inline std::string state_key(const ProofState& s) {
  std::string out;
  for (const Term& h : s.hypotheses) {
    out += print_term(h);
    out += ", ";
  }
  out += "|- ";
  out += print_term(s.goal);
  return out;
}

namespace detail {

inline void collect_shingles(const Term& t, const std::string* parent, const std::string* grandparent,
                             FeatureInterner& interner, std::vector<FeatureId>& out) {
  out.push_back(interner.intern(Feature::unigram(t.label)));
  if (parent && *parent != t.label) out.push_back(interner.intern(Feature::bigram(*parent, t.label)));
  if (grandparent && *grandparent != t.label)
    out.push_back(interner.intern(Feature::bigram(*grandparent, t.label)));
  for (const Term& c : t.children) collect_shingles(c, &t.label, parent, interner, out);
}

}  // namespace detail

/// Node labels plus ordered ancestor/descendant label pairs at distance 1 or 2
/// whose labels differ.
inline FeatureSet shingles(const Term& t, FeatureInterner& interner = global_interner()) {
  std::vector<FeatureId> ids;
  detail::collect_shingles(t, nullptr, nullptr, interner, ids);
  return FeatureSet(std::move(ids));
}

inline FeatureSet state_features(const ProofState& s, FeatureInterner& interner = global_interner()) {
  std::vector<FeatureId> ids;
  for (const Term& h : s.hypotheses) detail::collect_shingles(h, nullptr, nullptr, interner, ids);
  detail::collect_shingles(s.goal, nullptr, nullptr, interner, ids);
  return FeatureSet(std::move(ids));
}

inline std::vector<std::string> feature_texts(const FeatureSet& fs, const FeatureInterner& interner = global_interner()) {
  std::vector<std::string> out;
  out.reserve(fs.size());
  for (FeatureId id : fs) out.push_back(interner.lookup(id).text());
  return out;
}

}  // namespace tactic_forge
