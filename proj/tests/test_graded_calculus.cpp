#include <gtest/gtest.h>

#include "superstar/graded_calculus.hpp"
#include "superstar/moyal.hpp"

using namespace superstar;

namespace {

struct Calculus : ::testing::Test {
  VariableTable t;
  VarRef x, l, t1, t2, t3;
  GradedPoly X, L, T1, T2, T3;
  std::vector<GradedPoly> basis;

  Calculus() {
    x = t.add("x", Parity::even);
    l = t.add("l", Parity::even, true);
    t1 = t.add("t1", Parity::odd);
    t2 = t.add("t2", Parity::odd);
    t3 = t.add("t3", Parity::odd);
    X = GradedPoly::var(x);
    L = GradedPoly::var(l);
    T1 = GradedPoly::var(t1);
    T2 = GradedPoly::var(t2);
    T3 = GradedPoly::var(t3);
    basis = monomial_basis({x, l, t1, t2, t3}, 3);
  }
  std::vector<VarRef> all() const { return {x, l, t1, t2, t3}; }
};

TEST_F(Calculus, OddDerivativesOfAProduct) {
  EXPECT_EQ(d_left(t1, T1 * T2), T2);
  EXPECT_EQ(d_left(t2, T1 * T2), -T1);
  EXPECT_EQ(d_right(t2, T1 * T2), T1);
  EXPECT_EQ(d_right(t1, T1 * T2), -T2);
  EXPECT_EQ(d_left(t2, T1 * T2 * T3), -(T1 * T3));
  EXPECT_EQ(d_right(t2, T1 * T2 * T3), -(T1 * T3));
  EXPECT_TRUE(d_left(t3, T1 * T2).is_zero());
}

TEST_F(Calculus, EvenDerivativesIncludingLaurent) {
  EXPECT_EQ(d_left(x, X * X * X * T1), X * X * T1 * Rational(3));
  EXPECT_EQ(d_left(l, pow(L, -2, t)), pow(L, -3, t) * Rational(-2));
  EXPECT_EQ(d_left(x, X * T1), d_right(x, X * T1));
}

// f <-d_v = (-1)^{|v|(|f|+1)} d_v-> f for homogeneous f.
TEST_F(Calculus, LeftRightRelation) {
  for (const auto& f : basis) {
    const Parity pf = *homogeneous_parity(f);
    for (const auto& v : all()) {
      const Rational s = koszul_sign(v.parity, pf + Parity::odd);
      ASSERT_EQ(d_right(v, f), d_left(v, f) * s);
    }
  }
}

// d(fg) = (df) g + (-1)^{|v||f|} f (dg), mirrored for the right derivative.
TEST_F(Calculus, GradedLeibniz) {
  for (const auto& f : basis)
    for (const auto& g : basis) {
      const Parity pf = *homogeneous_parity(f), pg = *homogeneous_parity(g);
      for (const auto& v : all()) {
        ASSERT_EQ(d_left(v, f * g),
                  d_left(v, f) * g + f * d_left(v, g) * Rational(koszul_sign(v.parity, pf)));
        ASSERT_EQ(d_right(v, f * g),
                  f * d_right(v, g) + d_right(v, f) * g * Rational(koszul_sign(v.parity, pg)));
      }
    }
}

// d_a d_b = (-1)^{|a||b|} d_b d_a; in particular d_t d_t = 0.
TEST_F(Calculus, DerivativesSupercommute) {
  for (const auto& f : basis)
    for (const auto& a : all())
      for (const auto& b : all())
        ASSERT_EQ(d_left(a, d_left(b, f)),
                  d_left(b, d_left(a, f)) * Rational(koszul_sign(a.parity, b.parity)));
}

TEST_F(Calculus, ConventionFlagsFlipOddSigns) {
  KoszulConvention flip_left;
  flip_left.flip_left_derivative = true;
  KoszulConvention flip_right;
  flip_right.flip_right_derivative = true;
  EXPECT_EQ(d_left(t1, T1 * T2, flip_left), -T2);
  EXPECT_EQ(d_right(t2, T1 * T2, flip_right), -T1);
  EXPECT_EQ(d_left(x, X * X, flip_left), X * Rational(2));  // even derivatives untouched
}

TEST_F(Calculus, TensorSignIsOptIn) {
  EXPECT_EQ(tensor_sign(Parity::odd, Parity::odd), 1);
  KoszulConvention c;
  c.insert_tensor_sign = true;
  EXPECT_EQ(tensor_sign(Parity::odd, Parity::odd, c), -1);
  EXPECT_EQ(tensor_sign(Parity::odd, Parity::even, c), 1);
}

TEST_F(Calculus, BidiffSlots) {
  const BidiffSlots s = bidiff_apply(t1, t2, T3 * T1, T2 * X);
  EXPECT_EQ(s.left, T3);
  EXPECT_EQ(s.right, X);
  EXPECT_EQ(s.sign, 1);
  EXPECT_EQ(s.product(GradedPoly(5)), T3 * X * Rational(5));
  EXPECT_THROW(bidiff_apply(t1, t2, T1 + X, T2), MixedParityInput);
}

}  // namespace
