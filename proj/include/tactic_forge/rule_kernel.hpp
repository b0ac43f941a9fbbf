#pragma once

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "tactic_forge/proof_env.hpp"

namespace tactic_forge {

class KernelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One rewrite rule. A goal matches when its root label equals match_root
/// ("_" matches anything) and, if present, the pattern matches. Templates
/// refer to the goal as `$0`, its children as `$1`, `$2`, ... and to pattern
/// variables as `?name`.
struct Rule {
  struct Subgoal {
    std::vector<Term> extra_hyps;
    Term goal;
  };

  std::string tactic;
  std::string match_root = "_";
  std::optional<Term> pattern;
  std::vector<Subgoal> subgoals;
  enum class Builtin { None, Assumption, Contradiction };
  Builtin builtin = Builtin::None;
};

namespace detail {

using Bindings = std::map<std::string, Term, std::less<>>;

inline bool match_pattern(const Term& pattern, const Term& t, Bindings& env) {
  if (pattern.is_leaf() && pattern.label.size() > 1 && pattern.label[0] == '?') {
    auto [it, inserted] = env.try_emplace(pattern.label, t);
    return inserted || it->second == t;
  }
  if (pattern.label != t.label || pattern.children.size() != t.children.size()) return false;
  for (std::size_t i = 0; i < t.children.size(); ++i)
    if (!match_pattern(pattern.children[i], t.children[i], env)) return false;
  return true;
}

inline std::optional<Term> instantiate(const Term& tpl, const Term& goal, const Bindings& env) {
  if (tpl.is_leaf() && tpl.label.size() > 1) {
    if (tpl.label[0] == '?') {
      auto it = env.find(tpl.label);
      if (it == env.end()) return std::nullopt;
      return it->second;
    }
    if (tpl.label[0] == '$') {
      std::size_t index = 0;
      const char* first = tpl.label.data() + 1;
      const char* last = tpl.label.data() + tpl.label.size();
      auto [ptr, ec] = std::from_chars(first, last, index);
      if (ec == std::errc() && ptr == last) {
        if (index == 0) return goal;
        if (index > goal.children.size()) return std::nullopt;
        return goal.children[index - 1];
      }
    }
  }
  Term out(tpl.label);
  for (const Term& c : tpl.children) {
    auto sub = instantiate(c, goal, env);
    if (!sub) return std::nullopt;
    out.children.push_back(std::move(*sub));
  }
  return out;
}

}  // namespace detail

/// Pattern-rewrite tactic engine. Several rules may share a tactic name; the
/// first matching one applies.
class RuleKernel : public ProofEnv {
 public:
  RuleKernel() = default;
  explicit RuleKernel(std::vector<Rule> rules) {
    for (auto& r : rules) add(std::move(r));
  }

  void add(Rule rule) {
    std::string name = normalize_tactic(rule.tactic);
    rule.tactic = name;
    rules_[name].push_back(std::move(rule));
  }

  std::size_t rule_count() const {
    std::size_t n = 0;
    for (const auto& [_, v] : rules_) n += v.size();
    return n;
  }

  ProofOutcome apply_tactic(const GoalStack& stack, std::string_view tactic) const override {
    if (stack.solved()) return ProofOutcome::failure(FailureReason::EmptyStack);
    auto it = rules_.find(normalize_tactic(tactic));
    if (it == rules_.end()) return ProofOutcome::failure(FailureReason::UnknownTactic, std::string(tactic));

    const ProofState& focused = stack.focused();
    for (const Rule& rule : it->second) {
      auto produced = apply_rule(rule, focused);
      if (!produced) continue;
      GoalStack next{std::move(*produced)};
      next.goals.insert(next.goals.end(), stack.goals.begin() + 1, stack.goals.end());
      if (next.solved()) return ProofOutcome::solved();
      if (next == stack) return ProofOutcome::failure(FailureReason::NoProgress, std::string(tactic));
      return ProofOutcome::progress(std::move(next));
    }
    return ProofOutcome::failure(FailureReason::NoMatch, std::string(tactic));
  }

  /// Parses a JSON list of {tactic, match_root, pattern?, subgoal_templates, builtin?}.
  /// builtin is "assumption" or "contradiction".
  /// A template is a goal string or {"hyps": [..], "goal": ".."}.
  static RuleKernel from_json(const nlohmann::json& doc) {
    if (!doc.is_array()) throw KernelError("kernel definition must be a JSON list");
    RuleKernel kernel;
    for (const auto& item : doc) {
      try {
        Rule rule;
        rule.tactic = item.at("tactic").get<std::string>();
        if (rule.tactic.empty()) throw KernelError("empty tactic name");
        rule.match_root = item.value("match_root", std::string("_"));
        if (item.contains("pattern")) rule.pattern = parse_term(item["pattern"].get<std::string>());
        std::string builtin = item.value("builtin", std::string());
        if (builtin == "assumption") {
          rule.builtin = Rule::Builtin::Assumption;
        } else if (builtin == "contradiction") {
          rule.builtin = Rule::Builtin::Contradiction;
        } else if (!builtin.empty()) {
          throw KernelError("unknown builtin '" + builtin + "'");
        }
        for (const auto& tpl : item.value("subgoal_templates", nlohmann::json::array())) {
          Rule::Subgoal sg;
          if (tpl.is_string()) {
            sg.goal = parse_term(tpl.get<std::string>());
          } else {
            sg.goal = parse_term(tpl.at("goal").get<std::string>());
            for (const auto& h : tpl.value("hyps", nlohmann::json::array())) sg.extra_hyps.push_back(parse_term(h.get<std::string>()));
          }
          rule.subgoals.push_back(std::move(sg));
        }
        kernel.add(std::move(rule));
      } catch (const nlohmann::json::exception& e) {
        throw KernelError(std::string("bad rule: ") + e.what());
      } catch (const MalformedTerm& e) {
        throw KernelError(std::string("bad rule term: ") + e.what());
      }
    }
    return kernel;
  }

  static RuleKernel load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw KernelError("cannot open kernel file " + path);
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw KernelError(path + ": " + e.what());
    }
    return from_json(doc);
  }

 private:
  static std::optional<std::vector<ProofState>> apply_rule(const Rule& rule, const ProofState& state) {
    const Term& goal = state.goal;
    if (rule.match_root != "_" && rule.match_root != goal.label) return std::nullopt;
    if (rule.builtin != Rule::Builtin::None) {
      // assumption: goal is a hypothesis; contradiction: `false` is one.
      const Term target = rule.builtin == Rule::Builtin::Assumption ? goal : Term("false");
      for (const Term& h : state.hypotheses)
        if (h == target) return std::vector<ProofState>{};
      return std::nullopt;
    }
    detail::Bindings env;
    if (rule.pattern && !detail::match_pattern(*rule.pattern, goal, env)) return std::nullopt;
    std::vector<ProofState> out;
    for (const Rule::Subgoal& sg : rule.subgoals) {
      ProofState next{state.hypotheses, Term()};
      for (const Term& h : sg.extra_hyps) {
        auto inst = detail::instantiate(h, goal, env);
        if (!inst) return std::nullopt;
        next.hypotheses.push_back(std::move(*inst));
      }
      auto inst = detail::instantiate(sg.goal, goal, env);
      if (!inst) return std::nullopt;
      next.goal = std::move(*inst);
      out.push_back(std::move(next));
    }
    return out;
  }

  std::unordered_map<std::string, std::vector<Rule>> rules_;
};

}  // namespace tactic_forge
