#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tactic_forge/tactic_db.hpp"

namespace tactic_forge {

/// Tactic script tree. Only `;` and `; [ | ]` are decomposed; anything else
/// is an opaque atom.
struct Script {
  enum class Kind { Atom, Then, ThenDispatch, Recorded };

  Kind kind = Kind::Atom;
  std::string text;              // Atom only
  std::vector<Script> children;  // Then: {lhs, rhs}; ThenDispatch: {head, branches...}; Recorded: {inner}

  static Script atom(std::string t) { return {Kind::Atom, std::move(t), {}}; }
  static Script then(Script a, Script b) { return {Kind::Then, {}, {std::move(a), std::move(b)}}; }
  static Script dispatch(Script head, std::vector<Script> branches) {
    Script s{Kind::ThenDispatch, {}, {std::move(head)}};
    for (auto& b : branches) s.children.push_back(std::move(b));
    return s;
  }
  static Script recorded(Script inner) { return {Kind::Recorded, {}, {std::move(inner)}}; }

  friend bool operator==(const Script&, const Script&) = default;
};

class ScriptParseError : public std::runtime_error {
 public:
  ScriptParseError(const std::string& what, std::size_t pos)
      : std::runtime_error(what + " at offset " + std::to_string(pos)), pos_(pos) {}
  std::size_t position() const { return pos_; }

 private:
  std::size_t pos_;
};

class AlreadyInstrumented : public std::logic_error {
 public:
  AlreadyInstrumented() : std::logic_error("script is already instrumented") {}
};

namespace detail {

class ScriptParser {
 public:
  explicit ScriptParser(std::string_view text) : text_(text) {}

  Script parse_all() {
    skip_ws();
    if (peek() == '[') throw ScriptParseError("dispatch must follow ';'", pos_);
    Script s = sequence(false);
    skip_ws();
    if (pos_ < text_.size()) {
      if (peek() == ']') throw ScriptParseError("unbalanced ']'", pos_);
      throw ScriptParseError("unexpected input", pos_);
    }
    return s;
  }

 private:
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  // seq := atom (';' (dispatch | atom))*
  Script sequence(bool in_dispatch) {
    Script lhs = atom(in_dispatch);
    for (;;) {
      skip_ws();
      if (peek() != ';') return lhs;
      ++pos_;
      skip_ws();
      if (peek() == '[') {
        lhs = Script::dispatch(std::move(lhs), branches());
      } else {
        lhs = Script::then(std::move(lhs), atom(in_dispatch));
      }
    }
  }

  std::vector<Script> branches() {
    std::size_t open = pos_++;
    std::vector<Script> out;
    for (;;) {
      skip_ws();
      if (pos_ >= text_.size()) throw ScriptParseError("unbalanced '['", open);
      if (peek() == '|' || peek() == ']') throw ScriptParseError("empty dispatch branch", pos_);
      if (peek() == '[') throw ScriptParseError("dispatch must follow ';'", pos_);
      out.push_back(sequence(true));
      skip_ws();
      if (pos_ >= text_.size()) throw ScriptParseError("unbalanced '['", open);
      char c = text_[pos_++];
      if (c == ']') return out;
      if (c != '|') throw ScriptParseError("expected '|' or ']'", pos_ - 1);
    }
  }

  // Atom text runs to the next top-level ';'. Inside a dispatch, a top-level
  // '|' or ']' also ends it. Brackets and parentheses nested within the atom
  // are kept verbatim.
  Script atom(bool in_dispatch) {
    skip_ws();
    std::size_t start = pos_;
    std::vector<char> nesting;
    for (; pos_ < text_.size(); ++pos_) {
      char c = text_[pos_];
      if (nesting.empty()) {
        if (c == ';') break;
        if (in_dispatch && (c == '|' || c == ']')) break;
        if (c == ']' || c == ')') throw ScriptParseError(std::string("unbalanced '") + c + "'", pos_);
      }
      if (c == '(' || c == '[') {
        nesting.push_back(c == '(' ? ')' : ']');
      } else if (c == ')' || c == ']') {
        if (nesting.back() != c) throw ScriptParseError(std::string("mismatched '") + c + "'", pos_);
        nesting.pop_back();
      }
    }
    if (!nesting.empty()) throw ScriptParseError("unbalanced bracket in tactic", pos_);
    std::string text = normalize_tactic(text_.substr(start, pos_ - start));
    if (text.empty()) throw ScriptParseError("empty tactic", start);
    return Script::atom(std::move(text));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

inline void print_into(const Script& s, std::string& out) {
  switch (s.kind) {
    case Script::Kind::Atom:
      out += s.text;
      break;
    case Script::Kind::Recorded:
      out += "r ";
      print_into(s.children[0], out);
      break;
    case Script::Kind::Then:
      print_into(s.children[0], out);
      out += "; ";
      print_into(s.children[1], out);
      break;
    case Script::Kind::ThenDispatch:
      print_into(s.children[0], out);
      out += "; [";
      for (std::size_t i = 1; i < s.children.size(); ++i) {
        if (i > 1) out += " | ";
        print_into(s.children[i], out);
      }
      out += ']';
      break;
  }
}

inline bool contains_recorded(const Script& s) {
  if (s.kind == Script::Kind::Recorded) return true;
  for (const Script& c : s.children)
    if (contains_recorded(c)) return true;
  return false;
}

inline Script wrap_atoms(const Script& s) {
  if (s.kind == Script::Kind::Atom) return Script::recorded(s);
  Script out{s.kind, s.text, {}};
  for (const Script& c : s.children) out.children.push_back(wrap_atoms(c));
  return out;
}

}  // namespace detail

/// `;` is left-associative; `[a | b]` is only legal right after `;`.
inline Script parse_script(std::string_view text) { return detail::ScriptParser(text).parse_all(); }

inline std::string print_script(const Script& s) {
  std::string out;
  detail::print_into(s, out);
  return out;
}

/// Wraps every atom in a recording node.
inline Script instrument(const Script& s) {
  if (detail::contains_recorded(s)) throw AlreadyInstrumented();
  return detail::wrap_atoms(s);
}

inline void collect_atoms(const Script& s, std::vector<std::string>& out) {
  if (s.kind == Script::Kind::Atom) out.push_back(s.text);
  for (const Script& c : s.children) collect_atoms(c, out);
}

}  // namespace tactic_forge
