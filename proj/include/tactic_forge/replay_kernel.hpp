#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tactic_forge/proof_env.hpp"

namespace tactic_forge {

/// Replays recorded (state, tactic) -> subgoals edges. Anything not recorded
/// fails; distractor edges fail explicitly.
class ReplayKernel : public ProofEnv {
 public:
  /// First edge recorded for a (state, tactic) wins.
  void add_edge(const ProofState& state, std::string_view tactic, std::vector<ProofState> children) {
    edges_.try_emplace(edge_key(state, tactic), std::move(children));
  }

  void add_distractor(const ProofState& state, std::string_view tactic) {
    edges_.try_emplace(edge_key(state, tactic), std::nullopt);
  }

  std::size_t edge_count() const { return edges_.size(); }

  ProofOutcome apply_tactic(const GoalStack& stack, std::string_view tactic) const override {
    if (stack.solved()) return ProofOutcome::failure(FailureReason::EmptyStack);
    auto it = edges_.find(edge_key(stack.focused(), tactic));
    if (it == edges_.end() || !it->second) return ProofOutcome::failure(FailureReason::NoMatch, std::string(tactic));
    GoalStack next{*it->second};
    next.goals.insert(next.goals.end(), stack.goals.begin() + 1, stack.goals.end());
    if (next.solved()) return ProofOutcome::solved();
    if (next == stack) return ProofOutcome::failure(FailureReason::NoProgress, std::string(tactic));
    return ProofOutcome::progress(std::move(next));
  }

 private:
  static std::string edge_key(const ProofState& s, std::string_view tactic) {
    return state_key(s) + "\n" + normalize_tactic(tactic);
  }

  std::unordered_map<std::string, std::optional<std::vector<ProofState>>> edges_;
};

}  // namespace tactic_forge
