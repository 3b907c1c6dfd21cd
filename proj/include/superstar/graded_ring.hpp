#pragma once

// Exact arithmetic in the Z2-graded commutative algebra generated by even
// variables (optionally invertible), odd Grassmann variables and the central
// formal parameter hbar.

#include <gmpxx.h>

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "superstar/errors.hpp"

namespace superstar {

using Rational = mpq_class;

/// n/d in canonical form; mpq_class(n, d) leaves common factors in place.
inline Rational make_rational(long n, long d = 1) {
  Rational r(n, d);
  r.canonicalize();
  return r;
}
using VarIndex = std::uint32_t;

enum class Parity : std::uint8_t { even = 0, odd = 1 };

constexpr Parity operator+(Parity a, Parity b) {
  return static_cast<Parity>(static_cast<std::uint8_t>(a) ^ static_cast<std::uint8_t>(b));
}
constexpr bool is_odd(Parity p) { return p == Parity::odd; }
/// (-1)^{|a||b|}
constexpr int koszul_sign(Parity a, Parity b) { return is_odd(a) && is_odd(b) ? -1 : 1; }

inline std::string_view to_string(Parity p) { return is_odd(p) ? "odd" : "even"; }

/// Lightweight handle to a declared variable.
struct VarRef {
  VarIndex index = 0;
  Parity parity = Parity::even;
  friend bool operator==(const VarRef&, const VarRef&) = default;
  friend auto operator<=>(const VarRef&, const VarRef&) = default;
};

struct VarSpec {
  std::string name;
  Parity parity = Parity::even;
  bool invertible = false;
  VarIndex index = 0;
  /// Sheaf degree: empty (none), one entry (degree) or two (bidegree).
  std::vector<int> weight;

  VarRef ref() const { return {index, parity}; }
};

inline bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (!alpha(s.front())) return false;
  return std::all_of(s.begin(), s.end(), [&](char c) { return alpha(c) || digit(c); });
}

/// Ordered set of declared variables; declaration order is the canonical odd order.
class VariableTable {
 public:
  static constexpr std::string_view hbar_name = "hbar";

  VarRef add(std::string name, Parity parity, bool invertible = false,
             std::vector<int> weight = {}) {
    if (name == hbar_name) throw InvalidVariable("'hbar' is reserved");
    if (!is_identifier(name)) throw InvalidVariable("invalid variable name '" + name + "'");
    if (invertible && is_odd(parity))
      throw InvalidVariable("odd variable '" + name + "' cannot be invertible");
    if (by_name_.count(name)) throw InvalidVariable("duplicate variable '" + name + "'");
    const auto index = static_cast<VarIndex>(specs_.size());
    by_name_.emplace(name, index);
    specs_.push_back(VarSpec{std::move(name), parity, invertible, index, std::move(weight)});
    return specs_.back().ref();
  }

  std::size_t size() const { return specs_.size(); }
  const VarSpec& operator[](VarIndex i) const { return specs_.at(i); }
  const std::vector<VarSpec>& specs() const { return specs_; }

  std::optional<VarRef> find(std::string_view name) const {
    auto it = by_name_.find(std::string(name));
    if (it == by_name_.end()) return std::nullopt;
    return specs_[it->second].ref();
  }

  VarRef ref(std::string_view name) const {
    if (auto r = find(name)) return *r;
    throw UnknownIdentifier("unknown identifier '" + std::string(name) + "'");
  }

  const std::string& name(VarIndex i) const { return specs_.at(i).name; }
  bool invertible(VarIndex i) const { return specs_.at(i).invertible; }

  void set_weight(VarIndex i, std::vector<int> w) { specs_.at(i).weight = std::move(w); }

  friend bool operator==(const VariableTable& a, const VariableTable& b) {
    if (a.specs_.size() != b.specs_.size()) return false;
    for (std::size_t i = 0; i < a.specs_.size(); ++i) {
      const auto& x = a.specs_[i];
      const auto& y = b.specs_[i];
      if (x.name != y.name || x.parity != y.parity || x.invertible != y.invertible ||
          x.weight != y.weight)
        return false;
    }
    return true;
  }

 private:
  std::vector<VarSpec> specs_;
  std::unordered_map<std::string, VarIndex> by_name_;
};

/// hbar^k * prod x_i^{e_i} * theta_{j1}...theta_{jm}; odd factors strictly increasing.
struct Monomial {
  std::vector<std::pair<VarIndex, int>> even;
  std::vector<VarIndex> odd;
  unsigned hbar = 0;

  static Monomial variable(VarRef v, int exponent = 1) {
    Monomial m;
    if (is_odd(v.parity)) {
      if (exponent != 1) throw InvalidVariable("odd variable exponent must be 1");
      m.odd.push_back(v.index);
    } else if (exponent != 0) {
      m.even.emplace_back(v.index, exponent);
    }
    return m;
  }

  Parity parity() const { return odd.size() % 2 ? Parity::odd : Parity::even; }

  /// Total degree in the declared variables (hbar excluded).
  int degree() const {
    int d = static_cast<int>(odd.size());
    for (const auto& [v, e] : even) d += e;
    return d;
  }

  int exponent(VarIndex v) const {
    auto it = std::lower_bound(even.begin(), even.end(), v,
                               [](const auto& p, VarIndex x) { return p.first < x; });
    return it != even.end() && it->first == v ? it->second : 0;
  }

  bool has_odd(VarIndex v) const { return std::binary_search(odd.begin(), odd.end(), v); }

  bool is_constant() const { return even.empty() && odd.empty() && hbar == 0; }

  friend bool operator==(const Monomial&, const Monomial&) = default;
};

/// Graded-lex order used for storage and rendering: hbar order ascending, then
/// total degree descending, then lexicographic in declaration order.
struct MonomialOrder {
  bool operator()(const Monomial& a, const Monomial& b) const {
    if (a.hbar != b.hbar) return a.hbar < b.hbar;
    const int da = a.degree(), db = b.degree();
    if (da != db) return da > db;
    const auto n = std::min(a.even.size(), b.even.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (a.even[i].first != b.even[i].first) return a.even[i].first < b.even[i].first;
      if (a.even[i].second != b.even[i].second) return a.even[i].second > b.even[i].second;
    }
    if (a.even.size() != b.even.size()) return a.even.size() < b.even.size();
    return a.odd < b.odd;
  }
};

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const noexcept {
    std::size_t h = 0x9e3779b97f4a7c15ull ^ m.hbar;
    auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2); };
    for (const auto& [v, e] : m.even) mix((std::size_t(v) << 16) ^ std::size_t(std::uint32_t(e)));
    mix(0xabcdef);
    for (auto v : m.odd) mix(v);
    return h;
  }
};

/// Multiplies two monomials into `out`; returns the reordering sign, or 0 when
/// an odd factor repeats.
inline int multiply(const Monomial& a, const Monomial& b, Monomial& out) {
  out.hbar = a.hbar + b.hbar;
  out.even.clear();
  out.odd.clear();
  out.odd.reserve(a.odd.size() + b.odd.size());
  std::size_t i = 0, j = 0;
  std::size_t inversions = 0;
  while (i < a.odd.size() && j < b.odd.size()) {
    if (a.odd[i] == b.odd[j]) return 0;
    if (a.odd[i] < b.odd[j]) {
      out.odd.push_back(a.odd[i++]);
    } else {
      inversions += a.odd.size() - i;
      out.odd.push_back(b.odd[j++]);
    }
  }
  out.odd.insert(out.odd.end(), a.odd.begin() + i, a.odd.end());
  out.odd.insert(out.odd.end(), b.odd.begin() + j, b.odd.end());

  out.even.reserve(a.even.size() + b.even.size());
  i = j = 0;
  while (i < a.even.size() || j < b.even.size()) {
    if (j == b.even.size() || (i < a.even.size() && a.even[i].first < b.even[j].first)) {
      out.even.push_back(a.even[i++]);
    } else if (i == a.even.size() || b.even[j].first < a.even[i].first) {
      out.even.push_back(b.even[j++]);
    } else {
      const int e = a.even[i].second + b.even[j].second;
      if (e != 0) out.even.emplace_back(a.even[i].first, e);
      ++i;
      ++j;
    }
  }
  return inversions % 2 ? -1 : 1;
}

enum class ParityClass { even, odd, mixed };

inline std::string_view to_string(ParityClass p) {
  switch (p) {
    case ParityClass::even: return "even";
    case ParityClass::odd: return "odd";
    default: return "mixed";
  }
}

class GradedPoly {
 public:
  using Terms = std::map<Monomial, Rational, MonomialOrder>;

  GradedPoly() = default;
  GradedPoly(const Rational& c) {  // NOLINT: constants convert implicitly
    if (c != 0) terms_.emplace(Monomial{}, c);
  }
  GradedPoly(long c) : GradedPoly(Rational(c)) {}  // NOLINT
  GradedPoly(int c) : GradedPoly(Rational(c)) {}   // NOLINT

  static GradedPoly var(VarRef v, int exponent = 1) {
    GradedPoly p;
    p.terms_.emplace(Monomial::variable(v, exponent), Rational(1));
    return p;
  }
  static GradedPoly hbar(unsigned power = 1) {
    Monomial m;
    m.hbar = power;
    return monomial(m, 1);
  }
  static GradedPoly monomial(const Monomial& m, const Rational& c) {
    GradedPoly p;
    p.add_term(m, c);
    return p;
  }

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  void add_term(const Monomial& m, const Rational& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  Rational coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  /// Constant term (coefficient of the empty monomial).
  Rational constant_term() const { return coefficient(Monomial{}); }

  /// Coefficient of hbar^k, with hbar stripped.
  GradedPoly hbar_coefficient(unsigned k) const {
    GradedPoly r;
    for (const auto& [m, c] : terms_) {
      if (m.hbar != k) continue;
      Monomial s = m;
      s.hbar = 0;
      r.terms_.emplace(std::move(s), c);
    }
    return r;
  }

  unsigned hbar_order() const {
    unsigned k = 0;
    for (const auto& [m, c] : terms_) k = std::max(k, m.hbar);
    return k;
  }

  std::set<VarIndex> variables() const {
    std::set<VarIndex> vs;
    for (const auto& [m, c] : terms_) {
      for (const auto& [v, e] : m.even) vs.insert(v);
      vs.insert(m.odd.begin(), m.odd.end());
    }
    return vs;
  }

  GradedPoly& operator+=(const GradedPoly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  GradedPoly& operator-=(const GradedPoly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  GradedPoly& operator*=(const Rational& s) {
    if (s == 0) {
      terms_.clear();
    } else {
      for (auto& [m, c] : terms_) c *= s;
    }
    return *this;
  }

  /// this += s * a * b, without materialising the product.
  void add_product(const GradedPoly& a, const GradedPoly& b, const Rational& s = 1) {
    Monomial m;
    for (const auto& [ma, ca] : a.terms_) {
      for (const auto& [mb, cb] : b.terms_) {
        const int sign = multiply(ma, mb, m);
        if (sign == 0) continue;
        Rational c = ca * cb * s;
        if (sign < 0) c = -c;
        add_term(m, c);
      }
    }
  }

  friend GradedPoly operator+(GradedPoly a, const GradedPoly& b) { return a += b; }
  friend GradedPoly operator-(GradedPoly a, const GradedPoly& b) { return a -= b; }
  friend GradedPoly operator-(GradedPoly a) { return a *= Rational(-1); }
  friend GradedPoly operator*(GradedPoly a, const Rational& s) { return a *= s; }
  friend GradedPoly operator*(const Rational& s, GradedPoly a) { return a *= s; }
  friend GradedPoly operator*(const GradedPoly& a, const GradedPoly& b) {
    GradedPoly r;
    r.add_product(a, b);
    return r;
  }

  GradedPoly pow(unsigned n) const {
    GradedPoly result(1), base = *this;
    while (n) {
      if (n & 1u) result = result * base;
      n >>= 1;
      if (n) base = base * base;
    }
    return result;
  }

  friend bool operator==(const GradedPoly& a, const GradedPoly& b) { return a.terms_ == b.terms_; }

 private:
  Terms terms_;
};

/// Supercommutative product; odd reordering contributes (-1)^{#transpositions}.
inline GradedPoly mul(const GradedPoly& a, const GradedPoly& b) { return a * b; }

/// The zero polynomial counts as even.
inline ParityClass parity_of(const GradedPoly& a) {
  bool has_even = false, has_odd = false;
  for (const auto& [m, c] : a.terms()) (is_odd(m.parity()) ? has_odd : has_even) = true;
  if (has_even && has_odd) return ParityClass::mixed;
  return has_odd ? ParityClass::odd : ParityClass::even;
}

inline std::optional<Parity> homogeneous_parity(const GradedPoly& a) {
  switch (parity_of(a)) {
    case ParityClass::even: return Parity::even;
    case ParityClass::odd: return Parity::odd;
    default: return std::nullopt;
  }
}

inline Parity require_homogeneous(const GradedPoly& a, std::string_view what) {
  if (auto p = homogeneous_parity(a)) return *p;
  throw MixedParityInput(std::string(what) + " is not parity-homogeneous");
}

/// Splits a polynomial into its even and odd parts.
inline std::pair<GradedPoly, GradedPoly> split_parity(const GradedPoly& a) {
  GradedPoly ev, od;
  for (const auto& [m, c] : a.terms()) (is_odd(m.parity()) ? od : ev).add_term(m, c);
  return {ev, od};
}

/// Inverse of a unit: (c * Laurent monomial in invertible variables) * (1 + nilpotent).
/// The nilpotent part must consist of terms with odd factors, so the geometric
/// series terminates.
inline GradedPoly invert(const GradedPoly& a, const VariableTable& table) {
  const Monomial* body = nullptr;
  Rational body_coeff;
  for (const auto& [m, c] : a.terms()) {
    if (!m.odd.empty()) continue;
    if (body) throw NonInvertibleSubstitution("element has no unit-monomial factorization");
    body = &m;
    body_coeff = c;
  }
  if (!body) throw NonInvertibleSubstitution("element has nilpotent body");
  if (body->hbar != 0) throw NonInvertibleSubstitution("hbar is not invertible");
  Monomial inv_body;
  for (const auto& [v, e] : body->even) {
    if (!table.invertible(v))
      throw NonInvertibleSubstitution("variable '" + table.name(v) + "' is not invertible");
    inv_body.even.emplace_back(v, -e);
  }
  const GradedPoly unit_inverse = GradedPoly::monomial(inv_body, 1 / body_coeff);
  // a = u (1 + n)  =>  a^{-1} = (1 - n + n^2 - ...) u^{-1}
  const GradedPoly n = a * unit_inverse - GradedPoly(1);
  for (const auto& [m, c] : n.terms()) {
    if (m.odd.empty())
      throw NonInvertibleSubstitution("element is not a unit times (1 + nilpotent)");
  }
  GradedPoly series(1), power(1);
  const GradedPoly minus_n = -n;
  for (;;) {
    power = power * minus_n;
    if (power.is_zero()) break;
    series += power;
  }
  return series * unit_inverse;
}

/// Integer power; negative exponents require `a` to be a unit.
inline GradedPoly pow(const GradedPoly& a, int n, const VariableTable& table) {
  if (n >= 0) return a.pow(static_cast<unsigned>(n));
  return invert(a, table).pow(static_cast<unsigned>(-n));
}

using Substitution = std::vector<std::pair<VarRef, GradedPoly>>;

/// Simultaneous substitution. Replacements must be parity-homogeneous with the
/// replaced variable's parity; negative powers need a unit replacement.
inline GradedPoly substitute(const GradedPoly& a, const Substitution& map,
                             const VariableTable& table) {
  std::unordered_map<VarIndex, const GradedPoly*> rules;
  for (const auto& [v, r] : map) {
    const auto p = homogeneous_parity(r);
    if (!p || (!r.is_zero() && *p != v.parity))
      throw ParityMismatch("replacement for '" + table.name(v.index) + "' has parity " +
                           std::string(to_string(parity_of(r))) + ", expected " +
                           std::string(to_string(v.parity)));
    rules[v.index] = &r;
  }
  std::map<std::pair<VarIndex, int>, GradedPoly> powers;
  auto power_of = [&](VarIndex v, int e) -> const GradedPoly& {
    auto key = std::make_pair(v, e);
    auto it = powers.find(key);
    if (it != powers.end()) return it->second;
    return powers.emplace(key, pow(*rules.at(v), e, table)).first->second;
  };

  GradedPoly result;
  for (const auto& [m, c] : a.terms()) {
    Monomial kept;
    kept.hbar = m.hbar;
    std::vector<const GradedPoly*> factors;
    for (const auto& [v, e] : m.even) {
      if (rules.count(v))
        factors.push_back(&power_of(v, e));
      else
        kept.even.emplace_back(v, e);
    }
    GradedPoly term = GradedPoly::monomial(kept, c);
    for (const auto* f : factors) term = term * *f;
    for (auto v : m.odd) {
      auto it = rules.find(v);
      term = term * (it != rules.end() ? *it->second : GradedPoly::var({v, Parity::odd}));
      if (term.is_zero()) break;
    }
    result += term;
  }
  return result;
}

}  // namespace superstar
