#include <gtest/gtest.h>

#include <random>
#include <set>

#include "tactic_forge/lsh_forest.hpp"
#include "test_util.hpp"

using namespace tactic_forge;
using tactic_forge::testing::random_set;

TEST(Signature, EqualSetsEqualSignatures) {
  HashFamily fam(7, 32);
  EXPECT_EQ(signature({3, 1, 2}, fam), signature({1, 2, 3}, fam));
}

TEST(Signature, Singleton) {
  HashFamily fam(7, 16);
  auto sig = signature({42}, fam);
  for (std::size_t i = 0; i < 16; ++i) EXPECT_EQ(sig[i], fam.hash(i, 42));
}

TEST(Signature, EmptySetRejected) {
  HashFamily fam(7, 4);
  EXPECT_THROW(signature({}, fam), EmptySet);
}

TEST(Signature, DeterministicPerSeed) {
  EXPECT_EQ(signature({1, 5, 9}, HashFamily(11, 8)), signature({1, 5, 9}, HashFamily(11, 8)));
  EXPECT_NE(signature({1, 5, 9}, HashFamily(11, 8)), signature({1, 5, 9}, HashFamily(12, 8)));
}

TEST(LshForest, ExactDuplicateRankedFirst) {
  LshForest f;
  f.insert(0, {1, 2, 3}, "auto");
  f.insert(1, {7, 8, 9}, "intros");
  auto p = f.query({1, 2, 3}, 1);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p[0].tactic, "auto");
  EXPECT_DOUBLE_EQ(p[0].score, 1.0);
}

TEST(LshForest, DisjointQueryDoesNotCrash) {
  LshForest f;
  f.insert(0, {1, 2}, "a");
  f.insert(1, {3, 4}, "b");
  for (const auto& p : f.query({50, 60}, 5)) EXPECT_DOUBLE_EQ(p.score, 0.0);
}

TEST(LshForest, EmptyIndexAndQuery) {
  LshForest f;
  EXPECT_TRUE(f.query({1}, 3).empty());
  f.insert(0, {1}, "a");
  EXPECT_TRUE(f.query({}, 3).empty());
}

TEST(LshForest, SingleItemGetsExactJaccard) {
  LshForest f;
  f.insert(4, {1, 2, 3}, "t");
  auto p = f.query({2, 3, 4, 5}, 3);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_DOUBLE_EQ(p[0].score, 2.0 / 5.0);
  EXPECT_EQ(p[0].source_seq, 4u);
}

TEST(LshForest, RejectsEmptyAndDuplicates) {
  LshForest f;
  EXPECT_THROW(f.insert(0, {}, "t"), EmptySet);
  f.insert(0, {1}, "t");
  EXPECT_THROW(f.insert(0, {2}, "u"), std::invalid_argument);
}

TEST(LshForest, ContainmentAndExactScores) {
  std::mt19937_64 rng(5);
  LshForest f(LshForestConfig{8, 16, 64, 3});
  std::vector<FeatureSet> sets;
  for (Seq s = 0; s < 500; ++s) {
    sets.push_back(random_set(rng, 200, 1, 15));
    f.insert(s, sets.back(), "t" + std::to_string(s));
  }
  for (int q = 0; q < 50; ++q) {
    FeatureSet query = random_set(rng, 200, 1, 15);
    LshQueryStats stats;
    LshQueryOptions opts;
    opts.stats = &stats;
    auto p = f.query(query, 10, opts);
    EXPECT_LE(stats.scored, 64u);
    for (const auto& pr : p) {
      ASSERT_LT(pr.source_seq, sets.size());
      EXPECT_EQ(pr.tactic, "t" + std::to_string(pr.source_seq));
      EXPECT_DOUBLE_EQ(pr.score, jaccard(query, sets[pr.source_seq]));
    }
  }
}

TEST(LshForest, FilterSkipsCandidates) {
  LshForest f;
  for (Seq s = 0; s < 20; ++s) f.insert(s, {1, 2, static_cast<FeatureId>(10 + s)}, "t" + std::to_string(s));
  LshQueryOptions opts;
  opts.filter = [](Seq s) { return s % 2 == 0; };
  for (const auto& p : f.query({1, 2}, 20, opts)) EXPECT_EQ(p.source_seq % 2, 0u);
}

TEST(LshForest, DeterministicAcrossInstances) {
  std::mt19937_64 r1(9), r2(9);
  LshForest a, b;
  for (Seq s = 0; s < 300; ++s) {
    a.insert(s, random_set(r1, 100, 1, 10), "t" + std::to_string(s % 17));
    b.insert(s, random_set(r2, 100, 1, 10), "t" + std::to_string(s % 17));
  }
  std::mt19937_64 rq(1);
  for (int q = 0; q < 20; ++q) {
    FeatureSet query = random_set(rq, 100, 1, 10);
    auto pa = a.query(query, 5);
    auto pb = b.query(query, 5);
    ASSERT_EQ(pa.size(), pb.size());
    for (std::size_t i = 0; i < pa.size(); ++i) {
      EXPECT_EQ(pa[i].tactic, pb[i].tactic);
      EXPECT_EQ(pa[i].score, pb[i].score);
    }
  }
}

TEST(LshForest, SurvivesMove) {
  LshForest f;
  f.insert(0, {1, 2}, "a");
  LshForest g = std::move(f);
  g.insert(1, {3, 4}, "b");
  auto p = g.query({3, 4}, 1);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p[0].tactic, "b");
}

TEST(LshForest, WeightedRerank) {
  LshForest f;
  f.insert(0, {1, 2}, "a");
  LshQueryOptions opts;
  opts.weight = [](FeatureId id) { return id == 1 ? 3.0 : 1.0; };
  auto p = f.query({1, 3}, 1, opts);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_DOUBLE_EQ(p[0].score, 3.0 / 5.0);
}
