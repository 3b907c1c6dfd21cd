#pragma once

// Parser for polynomial expressions over a VariableTable:
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := ('+' | '-') unary | power
//   power  := atom ('^' '-'? integer)?
//   atom   := integer | identifier | 'hbar' | '(' expr ')'
// Division and negative powers are only defined for units: nonzero constants
// and monomials in invertible variables.

#include <cctype>
#include <string>
#include <string_view>

#include "superstar/graded_ring.hpp"

namespace superstar {

namespace detail {

class ExpressionParser {
 public:
  ExpressionParser(std::string_view text, const VariableTable& table)
      : text_(text), table_(table) {}

  GradedPoly parse() {
    skip_space();
    if (at_end()) throw SyntaxError("empty expression", pos_);
    GradedPoly r = expr();
    skip_space();
    if (!at_end()) throw SyntaxError(std::string("unexpected '") + text_[pos_] + "'", pos_);
    return r;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }

  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (!at_end() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  GradedPoly expr() {
    GradedPoly r = term();
    for (;;) {
      if (accept('+'))
        r += term();
      else if (accept('-'))
        r -= term();
      else
        return r;
    }
  }

  GradedPoly term() {
    GradedPoly r = unary();
    for (;;) {
      if (accept('*')) {
        r = r * unary();
      } else if (accept('/')) {
        const std::size_t at = pos_;
        r = r * unit_inverse(unary(), at);
      } else {
        return r;
      }
    }
  }

  GradedPoly unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  GradedPoly power() {
    const std::size_t at = pos_;
    GradedPoly base = atom();
    if (!accept('^')) return base;
    const bool negative = accept('-');
    skip_space();
    const std::size_t digits = pos_;
    long e = 0;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      e = e * 10 + (text_[pos_] - '0');
      if (e > 1'000'000) throw SyntaxError("exponent too large", digits);
      ++pos_;
    }
    if (pos_ == digits) throw SyntaxError("expected integer exponent", pos_);
    if (!negative) return base.pow(static_cast<unsigned>(e));
    return unit_inverse(base, at).pow(static_cast<unsigned>(e));
  }

  GradedPoly atom() {
    skip_space();
    if (at_end()) throw SyntaxError("unexpected end of expression", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      GradedPoly r = expr();
      if (!accept(')')) throw SyntaxError("expected ')'", pos_);
      return r;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      return GradedPoly(Rational(std::string(text_.substr(start, pos_ - start))));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      const std::string_view name = text_.substr(start, pos_ - start);
      if (name == "hbar") return GradedPoly::hbar();
      auto v = table_.find(name);
      if (!v)
        throw UnknownIdentifier("unknown identifier '" + std::string(name) + "'", start);
      return GradedPoly::var(*v);
    }
    throw SyntaxError(std::string("unexpected '") + c + "'", pos_);
  }

  GradedPoly unit_inverse(const GradedPoly& d, std::size_t at) const {
    if (d.size() == 1) {
      const auto& [m, c] = *d.terms().begin();
      bool unit = m.odd.empty() && m.hbar == 0;
      for (const auto& [v, e] : m.even) unit = unit && table_.invertible(v);
      if (unit) return invert(d, table_);
    }
    throw IllegalDivision("division by a non-unit at column " + std::to_string(at + 1));
  }

  std::string_view text_;
  const VariableTable& table_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline GradedPoly parse_expression(std::string_view text, const VariableTable& table) {
  return detail::ExpressionParser(text, table).parse();
}

}  // namespace superstar
