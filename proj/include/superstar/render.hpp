#pragma once

#include <map>
#include <sstream>
#include <string>

#include "superstar/graded_ring.hpp"

namespace superstar {

using DisplayAliases = std::map<VarIndex, std::string>;

inline std::string render_monomial(const Monomial& m, const VariableTable& table,
                                   const DisplayAliases* aliases = nullptr) {
  auto name = [&](VarIndex v) -> const std::string& {
    if (aliases) {
      auto it = aliases->find(v);
      if (it != aliases->end()) return it->second;
    }
    return table.name(v);
  };
  std::string out;
  auto append = [&out](const std::string& s) {
    if (!out.empty()) out += '*';
    out += s;
  };
  if (m.hbar == 1) append("hbar");
  if (m.hbar > 1) append("hbar^" + std::to_string(m.hbar));
  for (const auto& [v, e] : m.even) append(e == 1 ? name(v) : name(v) + "^" + std::to_string(e));
  for (auto v : m.odd) append(name(v));
  return out;
}

/// Deterministic rendering in storage (graded-lex) order; re-parses to the same value.
inline std::string render(const GradedPoly& p, const VariableTable& table,
                          const DisplayAliases* aliases = nullptr) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : p.terms()) {
    const std::string factors = render_monomial(m, table, aliases);
    std::string term;
    if (factors.empty())
      term = c.get_str();
    else if (c == 1)
      term = factors;
    else if (c == -1)
      term = "-" + factors;
    else
      term = c.get_str() + "*" + factors;
    if (first) {
      out = term;
      first = false;
    } else if (term.front() == '-') {
      out += " - " + term.substr(1);
    } else {
      out += " + " + term;
    }
  }
  return out;
}

}  // namespace superstar
