#pragma once

// Charts carrying star-bracket tables, transition maps between them, and the
// gluing checks: table transport, weight laws and the cocycle identity.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "superstar/poisson.hpp"

namespace superstar {

/// hbar-coefficients of coordinate supercommutators, [a, b]_* = hbar * at(a, b).
/// Only one orientation needs to be stored; the partner follows from
/// [b, a] = -(-1)^{|a||b|} [a, b].
class BracketTable {
 public:
  struct Entry {
    VarRef a;
    VarRef b;
    GradedPoly value;
  };

  void set(VarRef a, VarRef b, const GradedPoly& value) {
    if (parity_of(value) == ParityClass::mixed)
      throw MixedParityInput("bracket table entry is not parity-homogeneous");
    const auto key = std::make_pair(a.index, b.index);
    const auto partner = std::make_pair(b.index, a.index);
    entries_.erase(partner);
    if (value.is_zero())
      entries_.erase(key);
    else
      entries_[key] = Entry{a, b, value};
  }

  GradedPoly at(VarRef a, VarRef b) const {
    if (auto it = entries_.find({a.index, b.index}); it != entries_.end()) return it->second.value;
    if (auto it = entries_.find({b.index, a.index}); it != entries_.end())
      return it->second.value * Rational(-koszul_sign(a.parity, b.parity));
    return {};
  }

  /// Stored entries in insertion-independent (index) order.
  std::vector<const Entry*> entries() const {
    std::vector<const Entry*> r;
    for (const auto& [k, e] : entries_) r.push_back(&e);
    return r;
  }

  bool empty() const { return entries_.empty(); }

  /// The bivector whose Poisson bracket reproduces the table on coordinates.
  SuperBivector to_bivector(const std::vector<VarRef>& variables) const {
    SuperBivector pi(variables);
    for (const auto& [k, e] : entries_) pi.set(e.a, e.b, e.value);
    return pi;
  }

  /// Equality as graded-antisymmetric tables, independent of stored orientation.
  friend bool operator==(const BracketTable& x, const BracketTable& y) {
    for (const auto& [k, e] : x.entries_)
      if (!(y.at(e.a, e.b) == e.value)) return false;
    for (const auto& [k, e] : y.entries_)
      if (!(x.at(e.a, e.b) == e.value)) return false;
    return true;
  }

 private:
  std::map<std::pair<VarIndex, VarIndex>, Entry> entries_;
};

struct Chart {
  std::string name;
  std::vector<VarRef> variables;
  BracketTable table;
  /// Optional chart variable -> expression in model (or fibration) variables.
  Substitution embedding;

  bool has(VarRef v) const {
    for (const auto& w : variables)
      if (w == v) return true;
    return false;
  }
  friend bool operator==(const Chart&, const Chart&) = default;
};

struct TransitionMap {
  std::string from;
  std::string to;
  /// to-chart variable -> polynomial in from-chart variables
  Substitution rules;
  /// from-chart variable -> polynomial in to-chart variables
  Substitution inverse;
  /// from-chart variable whose inverse powers carry the weights, if any
  std::optional<VarRef> scale;

  const GradedPoly* rule(VarRef v) const {
    for (const auto& [w, p] : rules)
      if (w == v) return &p;
    return nullptr;
  }
  friend bool operator==(const TransitionMap&, const TransitionMap&) = default;
};

/// [to_a, to_b] on the target chart equals factor * [from_a, from_b] on the source.
struct WeightLaw {
  std::string from;
  std::string to;
  VarRef from_a, from_b;
  VarRef to_a, to_b;
  GradedPoly factor;
  friend bool operator==(const WeightLaw&, const WeightLaw&) = default;
};

struct Atlas {
  std::vector<Chart> charts;
  std::vector<TransitionMap> transitions;
  std::vector<WeightLaw> laws;
  std::vector<std::vector<std::string>> cycles;

  bool empty() const { return charts.empty(); }

  const Chart& chart(const std::string& name) const {
    for (const auto& c : charts)
      if (c.name == name) return c;
    throw UnknownIdentifier("unknown chart '" + name + "'");
  }
  const TransitionMap& transition(const std::string& from, const std::string& to) const {
    for (const auto& t : transitions)
      if (t.from == from && t.to == to) return t;
    throw NonComposableCycle("no transition from '" + from + "' to '" + to + "'");
  }
  friend bool operator==(const Atlas&, const Atlas&) = default;
};

/// Bracket table of the target chart induced by `table` on the source chart:
/// [a, b] is computed from the source brackets of rule(a), rule(b) by the
/// Leibniz rule and rewritten in target variables with the inverse rules.
inline BracketTable transport_table(const TransitionMap& t, const BracketTable& table,
                                    const std::vector<VarRef>& from_vars,
                                    const std::vector<VarRef>& to_vars,
                                    const VariableTable& vars) {
  const SuperBivector pi = table.to_bivector(from_vars);
  BracketTable out;
  for (std::size_t i = 0; i < to_vars.size(); ++i) {
    const GradedPoly* ri = t.rule(to_vars[i]);
    if (!ri) throw UnresolvedPair("no transition rule for '" + vars.name(to_vars[i].index) + "'");
    for (std::size_t j = i; j < to_vars.size(); ++j) {
      const GradedPoly* rj = t.rule(to_vars[j]);
      if (!rj) throw UnresolvedPair("no transition rule for '" + vars.name(to_vars[j].index) + "'");
      const GradedPoly b = poisson_bracket(pi, *ri, *rj);
      if (!b.is_zero()) out.set(to_vars[i], to_vars[j], substitute(b, t.inverse, vars));
    }
  }
  return out;
}

inline bool check_weight_law(const Chart& plus, const Chart& minus, const TransitionMap& t,
                             const WeightLaw& law, const VariableTable& vars) {
  if (!plus.has(law.from_a) || !plus.has(law.from_b))
    throw UnresolvedPair("weight-law pair not in chart '" + plus.name + "'");
  if (!minus.has(law.to_a) || !minus.has(law.to_b))
    throw UnresolvedPair("weight-law pair not in chart '" + minus.name + "'");
  const GradedPoly lhs = minus.table.at(law.to_a, law.to_b);
  const GradedPoly rhs =
      substitute(law.factor * plus.table.at(law.from_a, law.from_b), t.inverse, vars);
  return lhs == rhs;
}

/// Linear scale s with rule(to_var) = s * from_var, or nullopt if the rule is
/// not of that form.
inline std::optional<GradedPoly> transition_scale(const TransitionMap& t, VarRef from_var,
                                                  VarRef to_var) {
  const GradedPoly* r = t.rule(to_var);
  if (!r) return std::nullopt;
  GradedPoly s = d_left(from_var, *r);
  if (s.variables().count(from_var.index)) return std::nullopt;
  if (!(GradedPoly::var(from_var) * s == *r) && !(s * GradedPoly::var(from_var) == *r))
    return std::nullopt;
  return s;
}

/// Why `law.factor` is not the product of the two coordinate scales, each the
/// inverse weight power of the transition scale; nullopt when consistent.
/// Catches factor errors on pairs whose bracket vanishes on both charts.
inline std::optional<std::string> weight_law_inconsistency(const TransitionMap& t,
                                                           const WeightLaw& law,
                                                           const VariableTable& vars) {
  const auto sa = transition_scale(t, law.from_a, law.to_a);
  const auto sb = transition_scale(t, law.from_b, law.to_b);
  if (!sa || !sb || !(*sa * *sb == law.factor))
    return "factor is not the product of coordinate scales";
  if (!t.scale) return std::nullopt;
  for (auto [s, v] : {std::pair{&*sa, law.to_a}, std::pair{&*sb, law.to_b}}) {
    const auto& w = vars[v.index].weight;
    if (!w.empty() && !(*s == pow(GradedPoly::var(*t.scale), -w.front(), vars)))
      return "scale of " + vars.name(v.index) + " disagrees with its weight " +
             std::to_string(w.front());
  }
  return std::nullopt;
}

/// Composes the forward rules around the cycle c0 -> c1 -> ... -> c0 and checks
/// that every variable of c0 comes back to itself.
inline bool check_cocycle(const std::vector<const TransitionMap*>& maps, const Atlas& atlas,
                          const VariableTable& vars) {
  if (maps.empty()) return true;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    const auto& next = *maps[(i + 1) % maps.size()];
    if (maps[i]->to != next.from)
      throw NonComposableCycle("transition '" + maps[i]->from + "' -> '" + maps[i]->to +
                               "' does not chain into '" + next.from + "'");
  }
  const Chart& start = atlas.chart(maps.front()->from);
  for (const auto& v : start.variables) {
    // v as a function on the last chart, then pulled back chart by chart.
    const GradedPoly* r = maps.back()->rule(v);
    if (!r) throw UnresolvedPair("no transition rule for '" + vars.name(v.index) + "'");
    GradedPoly p = *r;
    for (std::size_t i = maps.size() - 1; i-- > 0;) p = substitute(p, maps[i]->rules, vars);
    if (!(p == GradedPoly::var(v))) return false;
  }
  return true;
}

inline std::vector<const TransitionMap*> cycle_maps(const Atlas& atlas,
                                                    const std::vector<std::string>& cycle) {
  if (cycle.size() < 2) throw NonComposableCycle("a cycle needs at least two charts");
  std::vector<const TransitionMap*> maps;
  for (std::size_t i = 0; i < cycle.size(); ++i)
    maps.push_back(&atlas.transition(cycle[i], cycle[(i + 1) % cycle.size()]));
  return maps;
}

}  // namespace superstar
