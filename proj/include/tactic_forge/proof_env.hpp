#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "tactic_forge/features.hpp"
#include "tactic_forge/script.hpp"

namespace tactic_forge {

/// Open goals; the first one is focused. Empty means solved.
struct GoalStack {
  std::vector<ProofState> goals;

  bool solved() const { return goals.empty(); }
  const ProofState& focused() const { return goals.front(); }
  friend bool operator==(const GoalStack&, const GoalStack&) = default;
};

inline std::string stack_key(const GoalStack& s) {
  std::string out;
  for (const ProofState& g : s.goals) {
    out += state_key(g);
    out += '\n';
  }
  return out;
}

enum class FailureReason { UnknownTactic, NoMatch, DispatchArity, NoProgress, EmptyStack };

inline std::string_view failure_name(FailureReason r) {
  switch (r) {
    case FailureReason::UnknownTactic: return "UnknownTactic";
    case FailureReason::NoMatch: return "NoMatch";
    case FailureReason::DispatchArity: return "DispatchArity";
    case FailureReason::NoProgress: return "NoProgress";
    case FailureReason::EmptyStack: return "EmptyStack";
  }
  return "?";
}

struct ProofOutcome {
  enum class Kind { Solved, Progress, Failure };

  Kind kind = Kind::Failure;
  GoalStack stack;  // Progress only
  FailureReason reason = FailureReason::NoMatch;
  std::string detail;

  static ProofOutcome solved() { return {Kind::Solved, {}, {}, {}}; }
  static ProofOutcome progress(GoalStack s) { return {Kind::Progress, std::move(s), {}, {}}; }
  static ProofOutcome failure(FailureReason r, std::string detail = {}) { return {Kind::Failure, {}, r, std::move(detail)}; }

  bool is_solved() const { return kind == Kind::Solved; }
  bool is_progress() const { return kind == Kind::Progress; }
  bool is_failure() const { return kind == Kind::Failure; }
};

/// A tactic engine. Implementations must be deterministic and immutable
/// after construction.
class ProofEnv {
 public:
  virtual ~ProofEnv() = default;

  /// Applies a tactic to the focused goal of a nonempty stack.
  virtual ProofOutcome apply_tactic(const GoalStack& stack, std::string_view tactic) const = 0;
};

/// Receives (state, tactic) before each recorded atom runs.
class PairRecorder {
 public:
  virtual ~PairRecorder() = default;
  virtual std::size_t record(const ProofState& state, std::string_view tactic) = 0;
  /// Called once the recorded tactic succeeded, with the goals it produced.
  virtual void on_result(std::size_t /*handle*/, const std::vector<ProofState>& /*subgoals*/) {}
};

namespace detail {

struct GoalsOrFailure {
  bool ok = true;
  std::vector<ProofState> goals;
  FailureReason reason = FailureReason::NoMatch;
  std::string detail;

  static GoalsOrFailure fail(FailureReason r, std::string d) { return {false, {}, r, std::move(d)}; }
};

inline GoalsOrFailure run_on_goal(const ProofEnv& env, const Script& ast, const ProofState& goal, PairRecorder* recorder) {
  switch (ast.kind) {
    case Script::Kind::Atom: {
      ProofOutcome o = env.apply_tactic(GoalStack{{goal}}, ast.text);
      if (o.is_failure()) return GoalsOrFailure::fail(o.reason, std::move(o.detail));
      return {true, o.is_solved() ? std::vector<ProofState>{} : std::move(o.stack.goals), {}, {}};
    }
    case Script::Kind::Recorded: {
      if (!recorder) return run_on_goal(env, ast.children[0], goal, nullptr);
      std::size_t handle = recorder->record(goal, print_script(ast.children[0]));
      GoalsOrFailure r = run_on_goal(env, ast.children[0], goal, recorder);
      if (r.ok) recorder->on_result(handle, r.goals);
      return r;
    }
    case Script::Kind::Then: {
      GoalsOrFailure first = run_on_goal(env, ast.children[0], goal, recorder);
      if (!first.ok) return first;
      GoalsOrFailure out;
      for (const ProofState& g : first.goals) {
        GoalsOrFailure r = run_on_goal(env, ast.children[1], g, recorder);
        if (!r.ok) return r;
        out.goals.insert(out.goals.end(), std::make_move_iterator(r.goals.begin()), std::make_move_iterator(r.goals.end()));
      }
      return out;
    }
    case Script::Kind::ThenDispatch: {
      GoalsOrFailure first = run_on_goal(env, ast.children[0], goal, recorder);
      if (!first.ok) return first;
      std::size_t branches = ast.children.size() - 1;
      if (first.goals.size() != branches)
        return GoalsOrFailure::fail(FailureReason::DispatchArity,
                                    std::to_string(branches) + " branches for " + std::to_string(first.goals.size()) + " goals");
      GoalsOrFailure out;
      for (std::size_t i = 0; i < branches; ++i) {
        GoalsOrFailure r = run_on_goal(env, ast.children[i + 1], first.goals[i], recorder);
        if (!r.ok) return r;
        out.goals.insert(out.goals.end(), std::make_move_iterator(r.goals.begin()), std::make_move_iterator(r.goals.end()));
      }
      return out;
    }
  }
  return GoalsOrFailure::fail(FailureReason::NoMatch, "bad script node");
}

}  // namespace detail

/// Runs a script on the focused goal. `a; b` runs b on every goal a produced;
/// `a; [b1 | ... | bn]` requires exactly n produced goals.
inline ProofOutcome run_script(const ProofEnv& env, const GoalStack& stack, const Script& ast, PairRecorder* recorder = nullptr) {
  if (stack.solved()) return ProofOutcome::failure(FailureReason::EmptyStack);
  detail::GoalsOrFailure r = detail::run_on_goal(env, ast, stack.focused(), recorder);
  if (!r.ok) return ProofOutcome::failure(r.reason, std::move(r.detail));
  GoalStack next{std::move(r.goals)};
  next.goals.insert(next.goals.end(), stack.goals.begin() + 1, stack.goals.end());
  if (next.solved()) return ProofOutcome::solved();
  if (next == stack) return ProofOutcome::failure(FailureReason::NoProgress);
  return ProofOutcome::progress(std::move(next));
}

}  // namespace tactic_forge
