#pragma once

#include <cctype>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tactic_forge {

/// Rooted ordered tree of identifiers. Leaves are written bare, inner nodes
/// as `(label child...)`.
struct Term {
  std::string label;
  std::vector<Term> children;

  Term() = default;
  explicit Term(std::string l, std::vector<Term> c = {})
      : label(std::move(l)), children(std::move(c)) {}

  bool is_leaf() const { return children.empty(); }
  friend bool operator==(const Term&, const Term&) = default;
};

class MalformedTerm : public std::runtime_error {
 public:
  MalformedTerm(const std::string& what, std::size_t pos)
      : std::runtime_error(what + " at offset " + std::to_string(pos)), pos_(pos) {}
  std::size_t position() const { return pos_; }

 private:
  std::size_t pos_;
};

namespace detail {

inline bool is_term_delim(char c) {
  return c == '(' || c == ')' || std::isspace(static_cast<unsigned char>(c));
}

class TermParser {
 public:
  explicit TermParser(std::string_view text) : text_(text) {}

  Term parse_all() {
    skip_ws();
    if (pos_ >= text_.size()) throw MalformedTerm("empty term", pos_);
    Term t = parse_one();
    skip_ws();
    if (pos_ != text_.size()) throw MalformedTerm("trailing input", pos_);
    return t;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string ident() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && !is_term_delim(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  Term parse_one() {
    if (text_[pos_] == ')') throw MalformedTerm("unexpected ')'", pos_);
    if (text_[pos_] != '(') return Term(ident());

    std::size_t open = pos_++;
    skip_ws();
    if (pos_ >= text_.size()) throw MalformedTerm("unbalanced '('", open);
    std::string head = ident();
    if (head.empty()) throw MalformedTerm("empty head", pos_);
    Term node(std::move(head));
    for (;;) {
      skip_ws();
      if (pos_ >= text_.size()) throw MalformedTerm("unbalanced '('", open);
      if (text_[pos_] == ')') {
        ++pos_;
        return node;
      }
      node.children.push_back(parse_one());
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

inline void print_into(const Term& t, std::string& out) {
  if (t.is_leaf()) {
    out += t.label;
    return;
  }
  out += '(';
  out += t.label;
  for (const Term& c : t.children) {
    out += ' ';
    print_into(c, out);
  }
  out += ')';
}

}  // namespace detail

/// Parses `term := IDENT | "(" IDENT term* ")"`. Throws MalformedTerm.
inline Term parse_term(std::string_view text) { return detail::TermParser(text).parse_all(); }

inline std::string print_term(const Term& t) {
  std::string out;
  detail::print_into(t, out);
  return out;
}

inline std::size_t node_count(const Term& t) {
  std::size_t n = 1;
  for (const Term& c : t.children) n += node_count(c);
  return n;
}

}  // namespace tactic_forge
