#pragma once

// Left and right graded partial derivatives and the single-step bidifferential
// kernel used by the star product.

#include <algorithm>
#include <optional>

#include "superstar/graded_ring.hpp"

namespace superstar {

enum class Side { left, right };

/// Sign conventions of the graded calculus. The defaults are the only ones
/// under which the built-in commutator tables and associativity hold; the
/// flags exist so the test suites can check that each sign is load-bearing.
/// `insert_tensor_sign` adds (-1)^{|B| |f<-d_A|} when the slots are
/// multiplied, which breaks associativity of odd-odd blocks.
struct KoszulConvention {
  bool flip_left_derivative = false;
  bool flip_right_derivative = false;
  bool insert_tensor_sign = false;

  friend bool operator==(const KoszulConvention&, const KoszulConvention&) = default;
};

namespace detail {

/// Derivative of a single monomial. Returns the sign/factor and writes the
/// derivative monomial to `out`; a zero factor means the derivative vanishes.
inline long derive_monomial(VarRef v, const Monomial& m, Side side, Monomial& out,
                            const KoszulConvention& conv = {}) {
  if (is_odd(v.parity)) {
    auto it = std::lower_bound(m.odd.begin(), m.odd.end(), v.index);
    if (it == m.odd.end() || *it != v.index) return 0;
    const auto pos = static_cast<std::size_t>(it - m.odd.begin());  // 0-based
    const std::size_t moves = side == Side::left ? pos : m.odd.size() - 1 - pos;
    long sign = moves % 2 ? -1 : 1;
    if (side == Side::left ? conv.flip_left_derivative : conv.flip_right_derivative) sign = -sign;
    out.hbar = m.hbar;
    out.even = m.even;
    out.odd.clear();
    out.odd.reserve(m.odd.size() - 1);
    out.odd.insert(out.odd.end(), m.odd.begin(), it);
    out.odd.insert(out.odd.end(), it + 1, m.odd.end());
    return sign;
  }
  auto it = std::lower_bound(m.even.begin(), m.even.end(), v.index,
                             [](const auto& p, VarIndex x) { return p.first < x; });
  if (it == m.even.end() || it->first != v.index) return 0;
  const int e = it->second;
  out.hbar = m.hbar;
  out.odd = m.odd;
  out.even = m.even;
  auto jt = out.even.begin() + (it - m.even.begin());
  if (e == 1)
    out.even.erase(jt);
  else
    jt->second = e - 1;
  return e;
}

inline GradedPoly derive(VarRef v, const GradedPoly& a, Side side, const KoszulConvention& conv) {
  GradedPoly r;
  Monomial d;
  for (const auto& [m, c] : a.terms()) {
    const long k = derive_monomial(v, m, side, d, conv);
    if (k != 0) r.add_term(d, c * k);
  }
  return r;
}

}  // namespace detail

/// Left derivative: an odd factor is moved to the front before deletion.
inline GradedPoly d_left(VarRef v, const GradedPoly& a, const KoszulConvention& conv = {}) {
  return detail::derive(v, a, Side::left, conv);
}

/// Right derivative: an odd factor is moved to the back before deletion.
inline GradedPoly d_right(VarRef v, const GradedPoly& a, const KoszulConvention& conv = {}) {
  return detail::derive(v, a, Side::right, conv);
}

/// Sign applied when the two slots are multiplied. The right derivative already
/// carries the reordering, so the default rule is trivial.
inline int tensor_sign(Parity b, Parity left_parity, const KoszulConvention& conv = {}) {
  return conv.insert_tensor_sign ? koszul_sign(b, left_parity) : 1;
}

/// One application of coefficient * (right_d_A ⊗ left_d_B) to a tensor pair.
struct BidiffSlots {
  GradedPoly left;
  GradedPoly right;
  int sign = 1;

  /// coefficient * sign * left * right
  GradedPoly product(const GradedPoly& coefficient) const {
    return coefficient * left * right * Rational(sign);
  }
};

/// Single-step kernel of the star product. `f` must be parity-homogeneous.
inline BidiffSlots bidiff_apply(VarRef a, VarRef b, const GradedPoly& f, const GradedPoly& g,
                                const KoszulConvention& conv = {}) {
  BidiffSlots s;
  s.left = d_right(a, f, conv);
  s.right = d_left(b, g, conv);
  const Parity left_parity = is_odd(require_homogeneous(f, "left slot")) != is_odd(a.parity)
                                 ? Parity::odd
                                 : Parity::even;
  s.sign = tensor_sign(b.parity, left_parity, conv);
  return s;
}

}  // namespace superstar
