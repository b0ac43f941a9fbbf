#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "mock_env.hpp"
#include "tactic_forge/replay_kernel.hpp"
#include "tactic_forge/rule_kernel.hpp"
#include "tactic_forge/search.hpp"

using namespace tactic_forge;
using namespace tactic_forge::testing;

namespace {
RuleKernel demo_kernel() { return RuleKernel::load(std::string(TACTIC_FORGE_DATA_DIR) + "/demo/kernel.json"); }

Predictor fixed(std::vector<std::string> tactics) {
  return [tactics](const FeatureSet&, std::size_t k) {
    std::vector<Prediction> out;
    for (std::size_t i = 0; i < std::min(k, tactics.size()); ++i) out.push_back({1.0 / (1.0 + i), tactics[i], 0});
    return out;
  };
}
}  // namespace

TEST(DiagonalSearch, ImmediateSolution) {
  SearchResult r = diagonal_search(demo_kernel(), GoalStack{{{{}, parse_term("true")}}}, fixed({"trivial", "split"}),
                                   SearchBudget::expansions(100));
  ASSERT_TRUE(r.found());
  EXPECT_EQ(r.script, std::vector<std::string>{"trivial"});
  EXPECT_EQ(r.stats.expansions, 1u);
}

TEST(DiagonalSearch, VisitOrderExample) {
  UniformTreeEnv env(2, 6);
  SearchBudget b = SearchBudget::expansions(6, 2);
  b.record_trace = true;
  SearchResult r = diagonal_search(env, UniformTreeEnv::root(), env.predictor(), b);
  EXPECT_EQ(r.outcome, SearchResult::Outcome::BudgetExceeded);
  EXPECT_EQ(r.trace, (std::vector<RankPath>{{}, {0}, {1}, {0, 0}, {0, 1}, {1, 0}}));
}

TEST(DiagonalSearch, ZeroBudget) {
  UniformTreeEnv env(2, 3);
  SearchResult r = diagonal_search(env, UniformTreeEnv::root(), env.predictor(), SearchBudget::expansions(0));
  EXPECT_EQ(r.outcome, SearchResult::Outcome::BudgetExceeded);
  EXPECT_EQ(r.stats.expansions, 0u);
  EXPECT_EQ(r.stats.applications, 0u);
}

TEST(DiagonalSearch, RejectsBadInput) {
  UniformTreeEnv env(2, 3);
  EXPECT_THROW(diagonal_search(env, UniformTreeEnv::root(), env.predictor(), SearchBudget{}), std::invalid_argument);
  EXPECT_THROW(diagonal_search(env, GoalStack{}, env.predictor(), SearchBudget::expansions(3)), std::invalid_argument);
}

TEST(DiagonalSearch, ExhaustsFiniteTree) {
  UniformTreeEnv env(2, 3);
  SearchResult r = diagonal_search(env, UniformTreeEnv::root(), env.predictor(), SearchBudget::expansions(1000, 2));
  EXPECT_EQ(r.outcome, SearchResult::Outcome::Exhausted);
  EXPECT_EQ(r.stats.expansions, 15u);
  EXPECT_EQ(r.stats.max_depth, 3u);
}

TEST(DiagonalSearch, WallClockBudget) {
  UniformTreeEnv env(3, 40);
  SearchResult r = diagonal_search(env, UniformTreeEnv::root(), env.predictor(), SearchBudget::seconds(0.05, 3));
  EXPECT_EQ(r.outcome, SearchResult::Outcome::BudgetExceeded);
  EXPECT_GT(r.stats.expansions, 0u);
}

TEST(DiagonalSearch, TraceMatchesBruteForceOrder) {
  for (std::size_t k : {2u, 3u}) {
    for (std::size_t depth = 1; depth <= 4; ++depth) {
      UniformTreeEnv env(k, depth);
      SearchBudget b = SearchBudget::expansions(100000, k);
      b.record_trace = true;
      SearchResult r = diagonal_search(env, UniformTreeEnv::root(), env.predictor(), b);
      std::vector<RankPath> expected = all_paths(k, depth);
      std::sort(expected.begin(), expected.end(), [](const RankPath& a, const RankPath& c) {
        return diagonal_before(path_cost(a), a, path_cost(c), c);
      });
      EXPECT_EQ(r.trace, expected) << "k=" << k << " depth=" << depth;
      for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_LE(path_cost(r.trace[i - 1]), path_cost(r.trace[i]));
    }
  }
}

TEST(DiagonalSearch, FindsTargetWithValidScript) {
  UniformTreeEnv env(3, 5, "2101");
  SearchResult r = diagonal_search(env, UniformTreeEnv::root(), env.predictor(), SearchBudget::expansions(100000, 3));
  ASSERT_TRUE(r.found());
  EXPECT_EQ(r.script, (std::vector<std::string>{"t2", "t1", "t0", "t1"}));
  EXPECT_TRUE(replay(env, UniformTreeEnv::root(), r.script).outcome.is_solved());
}

TEST(DiagonalSearch, UnitRankMinimality) {
  // Chain s0 -> s1 -> ... -> s<d> solved; only the rank-0 tactic ever applies.
  for (std::size_t d = 1; d <= 8; ++d) {
    ReplayKernel env;
    for (std::size_t i = 0; i < d; ++i) {
      std::vector<ProofState> next;
      if (i + 1 < d) next.push_back({{}, Term("s" + std::to_string(i + 1))});
      env.add_edge({{}, Term("s" + std::to_string(i))}, "good", next);
    }
    SearchResult r = diagonal_search(env, GoalStack{{{{}, Term("s0")}}}, fixed({"good", "bad1", "bad2"}),
                                     SearchBudget::expansions(1000, 3));
    ASSERT_TRUE(r.found());
    EXPECT_EQ(r.stats.expansions, d);
    EXPECT_EQ(r.script.size(), d);
  }
}

TEST(DiagonalSearch, FailuresCountAsApplications) {
  UniformTreeEnv env(2, 0);
  SearchResult r = diagonal_search(env, UniformTreeEnv::root(), env.predictor(), SearchBudget::expansions(10, 2));
  EXPECT_EQ(r.outcome, SearchResult::Outcome::Exhausted);
  EXPECT_EQ(r.stats.expansions, 1u);
  EXPECT_EQ(r.stats.applications, 2u);
}

TEST(DiagonalSearch, VisitedStatesAreNotReexpanded) {
  ReplayKernel env;
  env.add_edge({{}, Term("a")}, "go", {{{}, Term("b")}});
  env.add_edge({{}, Term("b")}, "back", {{{}, Term("a")}});
  SearchResult r = diagonal_search(env, GoalStack{{{{}, Term("a")}}}, fixed({"go", "back"}), SearchBudget::expansions(100));
  EXPECT_EQ(r.outcome, SearchResult::Outcome::Exhausted);
  EXPECT_EQ(r.stats.expansions, 2u);
}

TEST(Replay, Cases) {
  RuleKernel k = demo_kernel();
  GoalStack root{{{{}, parse_term("(and true true)")}}};
  EXPECT_TRUE(replay(k, root, {"split", "trivial", "trivial"}).outcome.is_solved());
  ReplayResult empty = replay(k, root, {});
  ASSERT_TRUE(empty.outcome.is_progress());
  EXPECT_EQ(empty.outcome.stack, root);
  ReplayResult bad = replay(k, root, {"split", "left", "trivial"});
  EXPECT_TRUE(bad.outcome.is_failure());
  EXPECT_EQ(bad.failed_step, 1u);
}

TEST(DiagonalSearch, RandomGraphsReplay) {
  std::size_t found = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    RandomGraphEnv env(seed, 40, 6);
    GoalStack root{{RandomGraphEnv::state(0)}};
    SearchResult r = diagonal_search(env, root, shuffled_predictor(6, seed), SearchBudget::expansions(300, 4));
    if (r.found()) {
      ++found;
      EXPECT_TRUE(replay(env, root, r.script).outcome.is_solved()) << "seed " << seed;
    }
  }
  EXPECT_GT(found, 50u);
}

TEST(DiagonalSearch, SiblingDepthProperty) {
  UniformTreeEnv env(3, 5);
  SearchBudget b = SearchBudget::expansions(100000, 3);
  b.record_trace = true;
  SearchResult r = diagonal_search(env, UniformTreeEnv::root(), env.predictor(), b);
  std::map<RankPath, int> deepest;
  for (const RankPath& p : r.trace) {
    for (std::size_t len = 1; len <= p.size(); ++len) {
      RankPath prefix(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(len));
      int& d = deepest.try_emplace(prefix, -1).first->second;
      d = std::max(d, static_cast<int>(p.size() - len));
    }
    for (const auto& [node, d] : deepest) {
      if (node.back() == 0) continue;
      RankPath sibling = node;
      --sibling.back();
      auto it = deepest.find(sibling);
      ASSERT_NE(it, deepest.end());
      EXPECT_GE(it->second, d);
    }
  }
}
