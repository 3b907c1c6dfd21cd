#include <gtest/gtest.h>

#include "superstar/graded_ring.hpp"
#include "superstar/moyal.hpp"
#include "superstar/render.hpp"

using namespace superstar;

namespace {

struct Ring : ::testing::Test {
  VariableTable t;
  VarRef x, y, l, t1, t2, t3;
  GradedPoly X, Y, L, T1, T2, T3;

  Ring() {
    x = t.add("x", Parity::even);
    y = t.add("y", Parity::even);
    l = t.add("l", Parity::even, true);
    t1 = t.add("t1", Parity::odd);
    t2 = t.add("t2", Parity::odd);
    t3 = t.add("t3", Parity::odd);
    X = GradedPoly::var(x);
    Y = GradedPoly::var(y);
    L = GradedPoly::var(l);
    T1 = GradedPoly::var(t1);
    T2 = GradedPoly::var(t2);
    T3 = GradedPoly::var(t3);
  }
};

TEST(Koszul, SignTable) {
  EXPECT_EQ(koszul_sign(Parity::even, Parity::even), 1);
  EXPECT_EQ(koszul_sign(Parity::even, Parity::odd), 1);
  EXPECT_EQ(koszul_sign(Parity::odd, Parity::even), 1);
  EXPECT_EQ(koszul_sign(Parity::odd, Parity::odd), -1);
}

TEST(Rationals, MakeRationalIsCanonical) {
  EXPECT_EQ(make_rational(2, 4), make_rational(1, 2));
  EXPECT_EQ(make_rational(2, 4).get_str(), "1/2");
  EXPECT_EQ(make_rational(-6, 3).get_str(), "-2");
}

TEST_F(Ring, OddVariablesAnticommuteAndSquareToZero) {
  EXPECT_EQ(T2 * T1, -(T1 * T2));
  EXPECT_TRUE((T1 * T1).is_zero());
  EXPECT_TRUE((T1 * T2 * T1).is_zero());
  EXPECT_EQ(T3 * T1 * T2, T1 * T2 * T3);  // cyclic = even permutation
  EXPECT_EQ(T2 * T1 * T3, -(T1 * T2 * T3));
}

TEST_F(Ring, EvenVariablesCommute) {
  EXPECT_EQ(X * Y, Y * X);
  EXPECT_EQ(X * T1, T1 * X);
}

TEST_F(Ring, GradedCommutativityOnBasis) {
  const auto basis = monomial_basis({x, y, t1, t2, t3}, 3);
  for (const auto& a : basis)
    for (const auto& b : basis) {
      const Parity pa = *homogeneous_parity(a), pb = *homogeneous_parity(b);
      ASSERT_EQ(a * b, b * a * Rational(koszul_sign(pa, pb)));
    }
}

TEST_F(Ring, MultiplicationIsAssociative) {
  const auto basis = monomial_basis({x, l, t1, t2, t3}, 2);
  for (const auto& a : basis)
    for (const auto& b : basis)
      for (const auto& c : basis) ASSERT_EQ((a * b) * c, a * (b * c));
}

TEST_F(Ring, ParityClassification) {
  EXPECT_EQ(parity_of(X * T1 * T2), ParityClass::even);
  EXPECT_EQ(parity_of(X * T1), ParityClass::odd);
  EXPECT_EQ(parity_of(X + T1), ParityClass::mixed);
  EXPECT_EQ(parity_of(GradedPoly{}), ParityClass::even);
  const auto [even, odd] = split_parity(X + T1 + T1 * T2 * T3);
  EXPECT_EQ(even, X);
  EXPECT_EQ(odd, T1 + T1 * T2 * T3);
  EXPECT_THROW(require_homogeneous(X + T1, "test"), MixedParityInput);
}

TEST_F(Ring, LaurentInverse) {
  const GradedPoly inv = invert(L * L, t);
  EXPECT_EQ(inv * L * L, GradedPoly(1));
  EXPECT_EQ(pow(L, -3, t) * pow(L, 3, t), GradedPoly(1));
  EXPECT_EQ(invert(GradedPoly(make_rational(2, 3)), t), GradedPoly(make_rational(3, 2)));
  EXPECT_THROW(invert(X, t), NonInvertibleSubstitution);
  EXPECT_THROW(invert(L + 1, t), NonInvertibleSubstitution);
}

TEST_F(Ring, SubstitutionRespectsOddOrder) {
  // t1 -> t2 makes t1*t2 vanish; t1 <-> t2 flips the sign.
  EXPECT_TRUE(substitute(T1 * T2, {{t1, T2}}, t).is_zero());
  EXPECT_EQ(substitute(T1 * T2, {{t1, T2}, {t2, T1}}, t), -(T1 * T2));
  EXPECT_EQ(substitute(X * X * T1, {{x, L + 1}}, t), (L * L + L * Rational(2) + 1) * T1);
  EXPECT_EQ(substitute(pow(L, -2, t), {{l, GradedPoly(2)}}, t), GradedPoly(make_rational(1, 4)));
}

TEST_F(Ring, SubstitutionParityMismatch) {
  EXPECT_THROW(substitute(X, {{x, T1}}, t), ParityMismatch);
}

TEST_F(Ring, HbarBookkeeping) {
  const GradedPoly p = X + GradedPoly::hbar() * Y + GradedPoly::hbar(3) * T1 * T2;
  EXPECT_EQ(p.hbar_order(), 3u);
  EXPECT_EQ(p.hbar_coefficient(0), X);
  EXPECT_EQ(p.hbar_coefficient(1), Y);
  EXPECT_EQ(p.hbar_coefficient(3), T1 * T2);
  EXPECT_TRUE(p.hbar_coefficient(2).is_zero());
}

TEST(VariableTableTest, RejectsInvalidDeclarations) {
  VariableTable t;
  t.add("x", Parity::even);
  EXPECT_THROW(t.add("hbar", Parity::even), InvalidVariable);
  EXPECT_THROW(t.add("x", Parity::odd), InvalidVariable);
  EXPECT_THROW(t.add("t", Parity::odd, true), InvalidVariable);
  EXPECT_THROW(t.add("1x", Parity::even), InvalidVariable);
  EXPECT_THROW(t.ref("nope"), UnknownIdentifier);
}

TEST_F(Ring, RenderingIsCanonical) {
  EXPECT_EQ(render(T2 * T1, t), "-t1*t2");
  EXPECT_EQ(render(X * X * make_rational(1, 2) - Y, t), "1/2*x^2 - y");
  EXPECT_EQ(render(pow(L, -2, t) * GradedPoly::hbar(), t), "hbar*l^-2");
  EXPECT_EQ(render(GradedPoly{}, t), "0");
}

}  // namespace
