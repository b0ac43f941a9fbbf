#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "tactic_forge/tactic_db.hpp"
#include "test_util.hpp"

using namespace tactic_forge;

namespace {
std::vector<Seq> seqs(const DbView& v) {
  std::vector<Seq> out;
  v.for_each([&](const TacticEntry& e) { out.push_back(e.seq); });
  return out;
}
}  // namespace

TEST(TacticDatabase, FirstInsert) {
  TacticDatabase db;
  EXPECT_EQ(db.insert("f", "L", FeatureSet{1}, "auto"), 0u);
  EXPECT_EQ(db.size(), 1u);
}

TEST(TacticDatabase, CountsSharedFeatures) {
  TacticDatabase db;
  db.insert("f", "L", FeatureSet{7, 8}, "auto");
  db.insert("f", "L", FeatureSet{7}, "intros");
  EXPECT_EQ(db.feature_count(7), 2u);
  EXPECT_EQ(db.feature_count(8), 1u);
  EXPECT_EQ(db.feature_count(99), 0u);
}

TEST(TacticDatabase, EmptyFeatureSetIsLegal) {
  TacticDatabase db;
  db.insert("f", "L", FeatureSet{4}, "auto");
  db.insert("f", "L", FeatureSet{}, "auto");
  EXPECT_EQ(db.size(), 2u);
  EXPECT_EQ(db.feature_count(4), 1u);
}

TEST(TacticDatabase, NormalizesTacticText) {
  TacticDatabase db;
  db.insert("f", "L", {}, "  rewrite \t  plus_zero \n");
  EXPECT_EQ(db.at(0).tactic, "rewrite plus_zero");
}

TEST(DbView, LastN) {
  TacticDatabase db;
  for (int i = 0; i < 3; ++i) db.insert("f", "L", {}, "t");
  EXPECT_EQ(seqs(db.view(DbFilter::last(2))), (std::vector<Seq>{1, 2}));
  EXPECT_EQ(seqs(db.view(DbFilter::last(10))), (std::vector<Seq>{0, 1, 2}));
  EXPECT_TRUE(seqs(db.view(DbFilter::last(0))).empty());
}

TEST(DbView, FileOnly) {
  TacticDatabase db;
  db.insert("f", "A", {}, "t");
  db.insert("g", "B", {}, "t");
  db.insert("f", "C", {}, "t");
  EXPECT_EQ(seqs(db.view(DbFilter::file_only("f"))), (std::vector<Seq>{0, 2}));
}

TEST(DbView, ExcludeLemma) {
  TacticDatabase db;
  db.insert("f", "L", {}, "a");
  db.insert("f", "L", {}, "b");
  EXPECT_TRUE(seqs(db.view(DbFilter::all().excluding("L"))).empty());
}

TEST(DbView, IsASnapshot) {
  TacticDatabase db;
  db.insert("f", "L", {}, "a");
  DbView v = db.view();
  db.insert("f", "L", {}, "b");
  EXPECT_EQ(seqs(v), std::vector<Seq>{0});
}

TEST(Tfidf, Values) {
  TacticDatabase db;
  for (int i = 0; i < 8; ++i) db.insert("f", "L", i < 2 ? FeatureSet{1, 2} : FeatureSet{1}, "t");
  EXPECT_DOUBLE_EQ(db.tfidf(1), 0.0);
  EXPECT_NEAR(db.tfidf(2), 1.3862943611198906, 1e-12);
  EXPECT_NEAR(db.tfidf(3), 2.0794415416798357, 1e-12);
  EXPECT_DOUBLE_EQ(TacticDatabase{}.tfidf(1), 0.0);
}

TEST(TacticDatabase, RandomizedRecountAndViewProperties) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    TacticDatabase db;
    std::size_t n = 1 + rng() % 60;
    for (std::size_t i = 0; i < n; ++i)
      db.insert(rng() % 2 ? "f" : "g", "L" + std::to_string(rng() % 4), tactic_forge::testing::random_set(rng, 30, 0, 8), "t");

    std::map<FeatureId, std::uint32_t> recount;
    for (const auto& e : db.entries())
      for (FeatureId id : e.features) ++recount[id];
    for (FeatureId id = 0; id < 30; ++id) {
      EXPECT_EQ(db.feature_count(id), recount[id]);
      EXPECT_LE(db.feature_count(id), db.size());
      EXPECT_GE(db.tfidf(id), 0.0);
    }

    for (const DbFilter& f : {DbFilter::all(), DbFilter::file_only("f"), DbFilter::last(5), DbFilter::all().excluding("L1")}) {
      auto s = seqs(db.view(f));
      for (std::size_t i = 1; i < s.size(); ++i) EXPECT_LT(s[i - 1], s[i]);
    }
    for (std::size_t a = 0; a < 10; ++a) {
      auto small = seqs(db.view(DbFilter::last(a)));
      auto large = seqs(db.view(DbFilter::last(a + 3)));
      for (Seq s : small) EXPECT_NE(std::find(large.begin(), large.end(), s), large.end());
    }
  }
}
