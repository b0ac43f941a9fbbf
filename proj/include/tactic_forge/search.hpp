#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "tactic_forge/predictors.hpp"
#include "tactic_forge/proof_env.hpp"

namespace tactic_forge {

struct SearchBudget {
  std::optional<double> wall_clock_seconds;
  std::optional<std::size_t> max_expansions;
  std::size_t k = 16;
  bool record_trace = false;

  static SearchBudget expansions(std::size_t n, std::size_t k = 16) { return {std::nullopt, n, k, false}; }
  static SearchBudget seconds(double s, std::size_t k = 16) { return {s, std::nullopt, k, false}; }
};

struct SearchStats {
  std::size_t expansions = 0;
  std::size_t applications = 0;
  double elapsed_seconds = 0.0;
  std::size_t max_depth = 0;
};

using RankPath = std::vector<std::uint32_t>;

struct SearchResult {
  enum class Outcome { Found, Exhausted, BudgetExceeded };

  Outcome outcome = Outcome::Exhausted;
  std::vector<std::string> script;  // Found only
  SearchStats stats;
  std::vector<RankPath> trace;      // expansion order, when requested

  bool found() const { return outcome == Outcome::Found; }
};

inline std::string_view outcome_name(SearchResult::Outcome o) {
  switch (o) {
    case SearchResult::Outcome::Found: return "found";
    case SearchResult::Outcome::Exhausted: return "exhausted";
    case SearchResult::Outcome::BudgetExceeded: return "budget-exceeded";
  }
  return "?";
}

/// Sum over the path of (1 + rank).
inline std::uint64_t path_cost(const RankPath& path) {
  std::uint64_t c = 0;
  for (auto r : path) c += 1 + r;
  return c;
}

/// Expansion order: cost, then path length, then lexicographic ranks.
inline bool diagonal_before(std::uint64_t cost_a, const RankPath& a, std::uint64_t cost_b, const RankPath& b) {
  if (cost_a != cost_b) return cost_a < cost_b;
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

/// Best-first search where a child reached through prediction rank r costs
/// 1 + r more than its parent, so the subtree of the rank-i tactic is always
/// explored one level deeper than that of the rank-(i+1) tactic. Goal stacks
/// already seen are not expanded again.
inline SearchResult diagonal_search(const ProofEnv& env, const GoalStack& root, const Predictor& predictor,
                                    const SearchBudget& budget) {
  if (!budget.wall_clock_seconds && !budget.max_expansions)
    throw std::invalid_argument("diagonal_search: budget needs a time or expansion limit");
  if (root.solved()) throw std::invalid_argument("diagonal_search: root stack is empty");

  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  SearchResult result;
  auto finish = [&](SearchResult::Outcome o) {
    result.outcome = o;
    result.stats.elapsed_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return std::move(result);
  };
  if (budget.max_expansions && *budget.max_expansions == 0) return finish(SearchResult::Outcome::BudgetExceeded);

  struct Node {
    GoalStack stack;
    RankPath ranks;
    std::uint64_t cost;
    std::int64_t parent;
    std::string tactic;
  };
  std::vector<Node> nodes;
  auto later = [&nodes](std::size_t a, std::size_t b) {
    return diagonal_before(nodes[b].cost, nodes[b].ranks, nodes[a].cost, nodes[a].ranks);
  };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(later)> open(later);
  std::unordered_set<std::string> visited;

  auto script_to = [&nodes](std::int64_t index, std::string last) {
    std::vector<std::string> script{std::move(last)};
    for (; index >= 0 && nodes[static_cast<std::size_t>(index)].parent >= 0; index = nodes[static_cast<std::size_t>(index)].parent)
      script.push_back(nodes[static_cast<std::size_t>(index)].tactic);
    return std::vector<std::string>(script.rbegin(), script.rend());
  };

  visited.insert(stack_key(root));
  nodes.push_back({root, {}, 0, -1, {}});
  open.push(0);

  while (!open.empty()) {
    if (budget.max_expansions && result.stats.expansions >= *budget.max_expansions)
      return finish(SearchResult::Outcome::BudgetExceeded);
    if (budget.wall_clock_seconds &&
        std::chrono::duration<double>(Clock::now() - start).count() >= *budget.wall_clock_seconds)
      return finish(SearchResult::Outcome::BudgetExceeded);

    std::size_t current = open.top();
    open.pop();
    ++result.stats.expansions;
    result.stats.max_depth = std::max(result.stats.max_depth, nodes[current].ranks.size());
    if (budget.record_trace) result.trace.push_back(nodes[current].ranks);

    std::vector<Prediction> predictions = predictor(state_features(nodes[current].stack.focused()), budget.k);
    if (predictions.size() > budget.k) predictions.resize(budget.k);

    for (std::size_t rank = 0; rank < predictions.size(); ++rank) {
      const std::string& tactic = predictions[rank].tactic;
      ProofOutcome outcome = env.apply_tactic(nodes[current].stack, tactic);
      ++result.stats.applications;
      if (outcome.is_solved()) {
        result.script = script_to(static_cast<std::int64_t>(current), tactic);
        return finish(SearchResult::Outcome::Found);
      }
      if (!outcome.is_progress()) continue;
      if (!visited.insert(stack_key(outcome.stack)).second) continue;
      RankPath ranks = nodes[current].ranks;
      ranks.push_back(static_cast<std::uint32_t>(rank));
      std::uint64_t cost = nodes[current].cost + 1 + rank;
      nodes.push_back({std::move(outcome.stack), std::move(ranks), cost, static_cast<std::int64_t>(current), tactic});
      open.push(nodes.size() - 1);
    }
  }
  return finish(SearchResult::Outcome::Exhausted);
}

struct ReplayResult {
  ProofOutcome outcome;
  std::optional<std::size_t> failed_step;
};

/// Applies the tactics in order. An empty script yields Progress(root).
inline ReplayResult replay(const ProofEnv& env, const GoalStack& root, const std::vector<std::string>& script) {
  GoalStack stack = root;
  for (std::size_t i = 0; i < script.size(); ++i) {
    if (stack.solved()) return {ProofOutcome::failure(FailureReason::EmptyStack, "step " + std::to_string(i)), i};
    ProofOutcome o = env.apply_tactic(stack, script[i]);
    if (o.is_failure()) return {std::move(o), i};
    if (o.is_solved()) {
      if (i + 1 != script.size()) return {ProofOutcome::failure(FailureReason::EmptyStack, "step " + std::to_string(i + 1)), i + 1};
      return {std::move(o), std::nullopt};
    }
    stack = std::move(o.stack);
  }
  if (stack.solved()) return {ProofOutcome::solved(), std::nullopt};
  return {ProofOutcome::progress(std::move(stack)), std::nullopt};
}

}  // namespace tactic_forge
