#pragma once

// Superbivectors, the super Poisson bracket they induce and the super
// Schouten bracket.

#include <array>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "superstar/graded_calculus.hpp"

namespace superstar {

/// Graded-antisymmetric coefficient matrix E^{AB}, stored with the convention
///   pi = 1/2 sum_{A,B} E^{AB} d_A (x) d_B,
/// so the star product exponent is (hbar/2) sum <-d_A E^{AB} ->d_B and the
/// bracket of coordinates is {X^A, X^B} = E^{AB}.
class SuperBivector {
 public:
  struct Entry {
    VarRef a;
    VarRef b;
    GradedPoly value;
  };

  SuperBivector() = default;
  explicit SuperBivector(std::vector<VarRef> variables) : variables_(std::move(variables)) {}

  const std::vector<VarRef>& variables() const { return variables_; }

  /// Sets E^{AB}; the partner E^{BA} = -(-1)^{|A||B|} E^{AB} follows.
  void set(VarRef a, VarRef b, const GradedPoly& value) {
    check_member(a);
    check_member(b);
    if (parity_of(value) != ParityClass::even)
      throw ParityMismatch("bivector coefficients must be even");
    if (a == b && !is_odd(a.parity) && !value.is_zero())
      throw ParityMismatch("diagonal entry of an even variable must vanish");
    if (!value.is_zero()) {
      const Parity p = a.parity + b.parity;
      if (parity_ && *parity_ != p)
        throw ParityMismatch("bivector mixes even and odd blocks");
      parity_ = p;
    }
    store(a, b, value);
    if (a != b) store(b, a, value * Rational(-koszul_sign(a.parity, b.parity)));
  }

  void add(VarRef a, VarRef b, const GradedPoly& value) { set(a, b, at(a, b) + value); }

  /// Adds c * d_a ∧ d_b (even pair) or c * d_a ∨ d_b (odd pair): E^{ab} += 2c.
  void add_wedge(VarRef a, VarRef b, const GradedPoly& c) { add(a, b, c * Rational(2)); }
  void add_vee(VarRef a, VarRef b, const GradedPoly& c) { add(a, b, c * Rational(2)); }

  GradedPoly at(VarRef a, VarRef b) const {
    auto it = entries_.find({a.index, b.index});
    return it == entries_.end() ? GradedPoly{} : it->second.value;
  }

  /// Nonzero entries, both orientations, ordered by (A, B).
  std::vector<const Entry*> entries() const {
    std::vector<const Entry*> r;
    r.reserve(entries_.size());
    for (const auto& [k, e] : entries_) r.push_back(&e);
    return r;
  }

  bool is_zero() const { return entries_.empty(); }

  /// Parity |A|+|B| shared by all nonzero entries (even for the zero bivector).
  Parity parity() const { return parity_.value_or(Parity::even); }

  /// Variables with a nonzero row (equivalently column).
  std::set<VarIndex> active_variables() const {
    std::set<VarIndex> s;
    for (const auto& [k, e] : entries_) s.insert(k.first);
    return s;
  }

  /// True when no coefficient depends on a variable the bivector differentiates.
  bool is_central() const {
    const auto active = active_variables();
    for (const auto& [k, e] : entries_)
      for (auto v : e.value.variables())
        if (active.count(v)) return false;
    return true;
  }

  friend bool operator==(const SuperBivector& x, const SuperBivector& y) {
    if (x.variables_ != y.variables_ || x.entries_.size() != y.entries_.size()) return false;
    for (const auto& [k, e] : x.entries_) {
      auto it = y.entries_.find(k);
      if (it == y.entries_.end() || !(it->second.value == e.value)) return false;
    }
    return true;
  }

 private:
  void check_member(VarRef v) const {
    if (variables_.empty()) return;
    for (const auto& w : variables_)
      if (w == v) return;
    throw VariableMismatch("variable is not in the bivector's variable list");
  }

  void store(VarRef a, VarRef b, const GradedPoly& value) {
    const auto key = std::make_pair(a.index, b.index);
    if (value.is_zero())
      entries_.erase(key);
    else
      entries_[key] = Entry{a, b, value};
  }

  std::vector<VarRef> variables_;
  std::map<std::pair<VarIndex, VarIndex>, Entry> entries_;
  std::optional<Parity> parity_;
};

/// {f, g} = sum_{A,B} (f <-d_A) E^{AB} (->d_B g).
/// The sign matches the first-order term of the star product exactly.
inline GradedPoly poisson_bracket(const SuperBivector& pi, const GradedPoly& f,
                                  const GradedPoly& g, const KoszulConvention& conv = {}) {
  GradedPoly result;
  Monomial lf, rg, prod;
  for (const auto* e : pi.entries()) {
    for (const auto& [mf, cf] : f.terms()) {
      const long sl = detail::derive_monomial(e->a, mf, Side::right, lf, conv);
      if (sl == 0) continue;
      const int ts = tensor_sign(e->b.parity, lf.parity(), conv);
      for (const auto& [mg, cg] : g.terms()) {
        const long sr = detail::derive_monomial(e->b, mg, Side::left, rg, conv);
        if (sr == 0) continue;
        const int sign = multiply(lf, rg, prod);
        if (sign == 0) continue;
        const Rational c = cf * cg * (sl * sr * ts * sign);
        result.add_product(GradedPoly::monomial(prod, c), e->value);
      }
    }
  }
  return result;
}

/// Graded-antisymmetric trivector stored on sorted index triples.
class SuperTrivector {
 public:
  using Key = std::array<VarIndex, 3>;

  /// Accumulates c * d_i ∧ d_j ∧ d_k, reordered into ascending index order.
  void accumulate(std::array<VarRef, 3> idx, const GradedPoly& c) {
    int sign = 1;
    for (int pass = 0; pass < 3; ++pass) {
      for (int p = 0; p + 1 < 3; ++p) {
        if (idx[p].index > idx[p + 1].index) {
          sign *= -koszul_sign(idx[p].parity, idx[p + 1].parity);
          std::swap(idx[p], idx[p + 1]);
        }
      }
    }
    for (int p = 0; p + 1 < 3; ++p)
      if (idx[p] == idx[p + 1] && !is_odd(idx[p].parity)) return;
    const Key key{idx[0].index, idx[1].index, idx[2].index};
    auto& slot = entries_[key];
    slot += c * Rational(sign);
    if (slot.is_zero()) entries_.erase(key);
  }

  bool is_zero() const { return entries_.empty(); }
  const std::map<Key, GradedPoly>& entries() const { return entries_; }

 private:
  std::map<Key, GradedPoly> entries_;
};

/// [A, B] per the coordinate display of the super Schouten bracket:
///   1/2 (-1)^{|i1|(|j1|+|j2|+|B|)} A^{mu i1} d_mu B^{j1 j2} d_i1 ∧ d_j1 ∧ d_j2
/// + 1/2 (-1)^{|A|(|j1|+|B|)}       B^{mu j1} d_mu A^{i1 i2} d_i1 ∧ d_i2 ∧ d_j1
inline SuperTrivector schouten_bracket(const SuperBivector& a, const SuperBivector& b) {
  if (a.variables() != b.variables())
    throw VariableMismatch("Schouten bracket of bivectors over different variable lists");
  SuperTrivector t;
  const Rational half(1, 2);
  const Parity pa = a.parity(), pb = b.parity();
  for (const auto* outer : a.entries()) {  // A^{mu i1}
    for (const auto* inner : b.entries()) {  // B^{j1 j2}
      GradedPoly d = d_left(outer->a, inner->value);
      if (d.is_zero()) continue;
      const Parity i1 = outer->b.parity;
      const int sign = koszul_sign(i1, inner->a.parity + inner->b.parity + pb);
      t.accumulate({outer->b, inner->a, inner->b}, outer->value * d * (half * sign));
    }
  }
  for (const auto* outer : b.entries()) {  // B^{mu j1}
    for (const auto* inner : a.entries()) {  // A^{i1 i2}
      GradedPoly d = d_left(outer->a, inner->value);
      if (d.is_zero()) continue;
      const int sign = koszul_sign(pa, outer->b.parity + pb);
      t.accumulate({inner->a, inner->b, outer->b}, outer->value * d * (half * sign));
    }
  }
  return t;
}

inline bool is_poisson(const SuperBivector& pi) { return schouten_bracket(pi, pi).is_zero(); }

}  // namespace superstar
