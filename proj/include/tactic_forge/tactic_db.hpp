#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tactic_forge/features.hpp"

namespace tactic_forge {

using Seq = std::uint64_t;

/// Collapses whitespace runs to one space and trims.
inline std::string normalize_tactic(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += c;
  }
  return out;
}

struct TacticEntry {
  std::string file;
  std::string lemma;
  Seq seq = 0;
  FeatureSet features;
  std::string tactic;
};

/// Which entries of a database a query may see.
struct DbFilter {
  enum class Scope { All, FileOnly, LastN };

  Scope scope = Scope::All;
  std::string file;
  std::size_t last_n = 0;
  std::optional<std::string> exclude_lemma;

  static DbFilter all() { return {}; }
  static DbFilter file_only(std::string f) { return {Scope::FileOnly, std::move(f), 0, std::nullopt}; }
  static DbFilter last(std::size_t n) { return {Scope::LastN, {}, n, std::nullopt}; }

  DbFilter excluding(std::string lemma) const {
    DbFilter f = *this;
    f.exclude_lemma = std::move(lemma);
    return f;
  }
};

class TacticDatabase;

/// Snapshot of a database restricted by a filter. Entries inserted after the
/// view was taken are never visible through it.
class DbView {
 public:
  DbView(const TacticDatabase& db, DbFilter filter, std::size_t bound)
      : db_(&db), filter_(std::move(filter)), bound_(bound) {}

  const TacticDatabase& source() const { return *db_; }
  const DbFilter& filter() const { return filter_; }

  /// Calls fn(const TacticEntry&) for each visible entry in seq order.
  template <class Fn>
  void for_each(Fn&& fn) const;

  bool accepts(const TacticEntry& e) const {
    if (filter_.exclude_lemma && e.lemma == *filter_.exclude_lemma) return false;
    return filter_.scope != DbFilter::Scope::FileOnly || e.file == filter_.file;
  }

  /// Index of the first entry inside the window (before lemma/file filtering).
  std::size_t window_begin() const {
    if (filter_.scope == DbFilter::Scope::LastN && filter_.last_n < bound_) return bound_ - filter_.last_n;
    return 0;
  }
  std::size_t window_end() const { return bound_; }

  std::vector<const TacticEntry*> entries() const {
    std::vector<const TacticEntry*> out;
    for_each([&](const TacticEntry& e) { out.push_back(&e); });
    return out;
  }

 private:
  const TacticDatabase* db_;
  DbFilter filter_;
  std::size_t bound_;
};

/// Append-only store of (state features, tactic) pairs with per-feature
/// document frequencies.
class TacticDatabase {
 public:
  Seq insert(std::string file, std::string lemma, FeatureSet features, std::string_view tactic) {
    Seq seq = next_seq_++;
    for (FeatureId id : features) {
      if (id >= counts_.size()) counts_.resize(static_cast<std::size_t>(id) + 1, 0);
      ++counts_[id];
    }
    entries_.push_back({std::move(file), std::move(lemma), seq, std::move(features), normalize_tactic(tactic)});
    return seq;
  }

  std::size_t size() const { return entries_.size(); }
  const std::vector<TacticEntry>& entries() const { return entries_; }
  const TacticEntry& at(std::size_t index) const { return entries_.at(index); }

  std::uint32_t feature_count(FeatureId id) const { return id < counts_.size() ? counts_[id] : 0; }

  /// log(N / max(1, count)); 0 for an empty database.
  double tfidf(FeatureId id) const {
    if (entries_.empty()) return 0.0;
    double count = std::max<std::uint32_t>(1, feature_count(id));
    return std::log(static_cast<double>(entries_.size()) / count);
  }

  DbView view(DbFilter filter = {}) const { return DbView(*this, std::move(filter), entries_.size()); }

 private:
  std::vector<TacticEntry> entries_;
  std::vector<std::uint32_t> counts_;
  Seq next_seq_ = 0;
};

template <class Fn>
void DbView::for_each(Fn&& fn) const {
  const auto& all = db_->entries();
  for (std::size_t i = window_begin(); i < bound_; ++i) {
    if (accepts(all[i])) fn(all[i]);
  }
}

}  // namespace tactic_forge
