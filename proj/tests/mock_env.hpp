#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "tactic_forge/proof_env.hpp"
#include "tactic_forge/search.hpp"

namespace tactic_forge::testing {

/// Complete k-ary tree of depth `depth`. Goal label encodes the rank path
/// ("n" followed by one digit per edge); tactic "t<i>" moves to child i.
/// Nothing ever solves unless `target` is reached.
class UniformTreeEnv : public ProofEnv {
 public:
  UniformTreeEnv(std::size_t k, std::size_t depth, std::string target = {}) : k_(k), depth_(depth), target_(std::move(target)) {}

  ProofOutcome apply_tactic(const GoalStack& stack, std::string_view tactic) const override {
    if (stack.solved()) return ProofOutcome::failure(FailureReason::EmptyStack);
    const std::string& label = stack.focused().goal.label;
    if (tactic.size() != 2 || tactic[0] != 't') return ProofOutcome::failure(FailureReason::UnknownTactic);
    std::size_t r = static_cast<std::size_t>(tactic[1] - '0');
    if (r >= k_ || label.size() - 1 >= depth_) return ProofOutcome::failure(FailureReason::NoMatch);
    std::string child = label + static_cast<char>('0' + r);
    if (!target_.empty() && child == "n" + target_) return ProofOutcome::solved();
    return ProofOutcome::progress(GoalStack{{ProofState{{}, Term(child)}}});
  }

  static GoalStack root() { return GoalStack{{ProofState{{}, Term("n")}}}; }

  Predictor predictor() const {
    std::size_t k = k_;
    return [k](const FeatureSet&, std::size_t limit) {
      std::vector<Prediction> out;
      for (std::size_t i = 0; i < std::min(k, limit); ++i) out.push_back({1.0 / (1.0 + i), "t" + std::to_string(i), 0});
      return out;
    };
  }

 private:
  std::size_t k_, depth_;
  std::string target_;
};

/// All rank paths of a complete k-ary tree of the given depth.
inline std::vector<RankPath> all_paths(std::size_t k, std::size_t depth) {
  std::vector<RankPath> out{{}};
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].size() == depth) continue;
    for (std::uint32_t r = 0; r < k; ++r) {
      RankPath p = out[i];
      p.push_back(r);
      out.push_back(std::move(p));
    }
  }
  return out;
}

/// Random proof graph over numbered states. Each state has a few outgoing
/// tactic edges to other states, to several goals, or to a solved stack.
class RandomGraphEnv : public ProofEnv {
 public:
  RandomGraphEnv(std::uint64_t seed, std::size_t states, std::size_t tactics) : tactics_(tactics) {
    std::mt19937_64 rng(seed);
    edges_.resize(states);
    for (std::size_t s = 0; s < states; ++s) {
      for (std::size_t t = 0; t < tactics; ++t) {
        std::uint64_t roll = rng() % 10;
        if (roll < 4) continue;  // tactic fails here
        std::vector<std::size_t> targets;
        if (roll == 9 && rng() % 3 == 0) {
          // solves the goal
        } else {
          for (std::size_t n = 1 + (roll == 8 ? rng() % 2 : 0); n > 0; --n) targets.push_back(rng() % states);
        }
        edges_[s].push_back({t, targets});
      }
    }
  }

  std::size_t tactic_count() const { return tactics_; }

  static ProofState state(std::size_t s) { return {{}, Term("s" + std::to_string(s), {Term("x")})}; }
  static std::size_t id_of(const ProofState& p) { return std::stoul(p.goal.label.substr(1)); }

  ProofOutcome apply_tactic(const GoalStack& stack, std::string_view tactic) const override {
    if (stack.solved()) return ProofOutcome::failure(FailureReason::EmptyStack);
    if (tactic.size() < 2 || tactic[0] != 'a') return ProofOutcome::failure(FailureReason::UnknownTactic);
    std::size_t t = std::stoul(std::string(tactic.substr(1)));
    std::size_t s = id_of(stack.focused());
    for (const auto& e : edges_[s]) {
      if (e.tactic != t) continue;
      GoalStack next;
      for (std::size_t c : e.targets) next.goals.push_back(state(c));
      next.goals.insert(next.goals.end(), stack.goals.begin() + 1, stack.goals.end());
      if (next.solved()) return ProofOutcome::solved();
      if (next == stack) return ProofOutcome::failure(FailureReason::NoProgress);
      return ProofOutcome::progress(std::move(next));
    }
    return ProofOutcome::failure(FailureReason::NoMatch);
  }

 private:
  struct Edge {
    std::size_t tactic;
    std::vector<std::size_t> targets;
  };
  std::size_t tactics_;
  std::vector<std::vector<Edge>> edges_;
};

/// Predictor returning a feature-dependent permutation of a0..a{n-1}.
inline Predictor shuffled_predictor(std::size_t tactics, std::uint64_t seed) {
  return [tactics, seed](const FeatureSet& q, std::size_t k) {
    std::uint64_t h = seed;
    for (FeatureId id : q) h = h * 1000003u + id;
    std::vector<std::size_t> order(tactics);
    for (std::size_t i = 0; i < tactics; ++i) order[i] = i;
    std::mt19937_64 rng(h);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<Prediction> out;
    for (std::size_t i = 0; i < std::min(k, tactics); ++i) out.push_back({1.0 / (1.0 + i), "a" + std::to_string(order[i]), 0});
    return out;
  };
}

}  // namespace tactic_forge::testing
