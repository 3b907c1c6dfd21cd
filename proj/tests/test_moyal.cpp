#include <gtest/gtest.h>

#include <random>

#include "oracle.hpp"
#include "superstar/models.hpp"

using namespace superstar;

namespace {

struct Plane : ::testing::Test {
  VariableTable t;
  VarRef x, y, t1, t2;
  GradedPoly X, Y, T1, T2;
  Plane() {
    x = t.add("x", Parity::even);
    y = t.add("y", Parity::even);
    t1 = t.add("t1", Parity::odd);
    t2 = t.add("t2", Parity::odd);
    X = GradedPoly::var(x);
    Y = GradedPoly::var(y);
    T1 = GradedPoly::var(t1);
    T2 = GradedPoly::var(t2);
  }
  SuperBivector canonical(const Rational& c) const {
    SuperBivector pi({x, y, t1, t2});
    pi.set(x, y, GradedPoly(1));
    pi.set(t1, t2, GradedPoly(c));
    pi.set(t1, t1, GradedPoly(3));
    return pi;
  }
};

const GradedPoly h = GradedPoly::hbar();

// x^2 * y^2 = x^2 y^2 + (h/2)(2x)(2y) + (h/2)^2/2 * 2 * 2 for {x, y} = 1.
TEST_F(Plane, HandExpandedEvenProduct) {
  const StarEngine e(canonical(1));
  EXPECT_EQ(star(e, X * X, Y * Y),
            X * X * Y * Y + h * X * Y * Rational(2) + h * h * make_rational(1, 2));
  EXPECT_EQ(star(e, Y, X), Y * X - h * make_rational(1, 2));
  EXPECT_EQ(supercommutator(e, X, Y), h);
}

TEST_F(Plane, HandExpandedOddProduct) {
  const StarEngine e(canonical(5));
  EXPECT_EQ(star(e, T1, T2), T1 * T2 + h * make_rational(5, 2));
  EXPECT_EQ(star(e, T2, T1), T2 * T1 + h * make_rational(5, 2));
  EXPECT_EQ(star(e, T1, T1), h * make_rational(3, 2));
  EXPECT_EQ(supercommutator(e, T1, T2), h * Rational(5));
  EXPECT_EQ(supercommutator(e, T1, T1), h * Rational(3));
}

TEST_F(Plane, HbarAndUndifferentiatedFactorsAreCentral) {
  VariableTable t2t = t;
  const VarRef c = t2t.add("c", Parity::even);
  const GradedPoly C = GradedPoly::var(c);
  SuperBivector pi({x, y, t1, t2});
  pi.set(x, y, C);
  const StarEngine e(pi);
  EXPECT_EQ(star(e, h * C * X, Y), h * C * star(e, X, Y));
  EXPECT_EQ(supercommutator(e, X, Y), h * C);
}

TEST_F(Plane, CacheDoesNotChangeResults) {
  const StarEngine e(canonical(2));
  StarCache cache;
  const auto basis = monomial_basis({x, y, t1, t2}, 2);
  for (const auto& f : basis)
    for (const auto& g : basis) ASSERT_EQ(star(e, f, g, &cache), star(e, f, g));
  EXPECT_GT(cache.size(), 0u);
}

TEST_F(Plane, Errors) {
  SuperBivector pi({x, y});
  pi.set(x, y, X);
  EXPECT_THROW(StarEngine{pi}, NonCentralBivector);
  EXPECT_THROW(StarEngine(canonical(1), 0), Error);
  const StarEngine shallow(canonical(1), 2);
  EXPECT_THROW(star(shallow, X * X * X, Y * Y * Y), TruncationExceeded);
  EXPECT_NO_THROW(star(shallow, X * X, Y * Y));
  const StarEngine e(canonical(1));
  EXPECT_THROW(supercommutator(e, X + T1, Y), MixedParityInput);
}

TEST_F(Plane, FirstOrderIsHalfTheBracket) {
  const StarEngine e(canonical(make_rational(-7, 3)));
  const auto basis = monomial_basis({x, y, t1, t2}, 3);
  for (const auto& f : basis)
    for (const auto& g : basis)
      ASSERT_EQ(star(e, f, g).hbar_coefficient(1),
                poisson_bracket(e.bivector(), f, g) * make_rational(1, 2));
}

// Even hbar with an odd bivector: t*t = 0 and [x, t] = h force
// (x*t)*t = h t while x*(t*t) = 0.
TEST(OddBivector, AssociativityObstruction) {
  VariableTable t;
  const VarRef x = t.add("x", Parity::even), th = t.add("t", Parity::odd);
  const GradedPoly X = GradedPoly::var(x), T = GradedPoly::var(th);
  SuperBivector pi({x, th});
  pi.set(x, th, GradedPoly(1));
  const StarEngine e(pi);
  EXPECT_TRUE(star(e, T, T).is_zero());
  EXPECT_EQ(supercommutator(e, X, T), h);
  EXPECT_EQ(star(e, star(e, X, T), T), h * T);
  EXPECT_TRUE(star(e, X, star(e, T, T)).is_zero());
}

void agree_with_oracle(bool odd_bivector, int pairs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (int i = 0; i < pairs; ++i) {
    const oracle::Space s = oracle::random_space(rng, odd_bivector);
    const VariableTable t = oracle::table_for(s);
    const StarEngine e = oracle::engine_for(s, t);
    const oracle::Poly f = oracle::random_poly(s, rng, 3, 4);
    const oracle::Poly g = oracle::random_poly(s, rng, 3, 4);
    const oracle::Poly want = oracle::star(s, f, g, 4);
    const oracle::Poly got = oracle::from_engine(s, star(e, oracle::to_engine(s, f, t), oracle::to_engine(s, g, t)));
    ASSERT_TRUE(got == want) << "pair " << i;
  }
}

TEST(BruteForceOracle, EvenBivectorRandomPairs) { agree_with_oracle(false, 100, 11); }

TEST(BruteForceOracle, OddBivectorRandomPairs) { agree_with_oracle(true, 50, 12); }

// The oracle ignores engine conventions, so every single-flag mutation must
// disagree with it somewhere.
TEST(BruteForceOracle, DetectsConventionMutations) {
  for (int flag = 0; flag < 3; ++flag) {
    KoszulConvention conv;
    conv.flip_left_derivative = flag == 0;
    conv.flip_right_derivative = flag == 1;
    conv.insert_tensor_sign = flag == 2;
    std::mt19937_64 rng(99);
    bool disagreed = false;
    for (int i = 0; i < 40 && !disagreed; ++i) {
      const oracle::Space s = oracle::random_space(rng, false);
      const VariableTable t = oracle::table_for(s);
      const StarEngine e = oracle::engine_for(s, t, conv);
      const oracle::Poly f = oracle::random_poly(s, rng, 3, 3);
      const oracle::Poly g = oracle::random_poly(s, rng, 3, 3);
      const oracle::Poly got =
          oracle::from_engine(s, star(e, oracle::to_engine(s, f, t), oracle::to_engine(s, g, t)));
      disagreed = !(got == oracle::star(s, f, g, 4));
    }
    EXPECT_TRUE(disagreed) << "flag " << flag;
  }
}

TEST(Contract, PassesOnEvenBivectorModels) {
  for (const char* name : {"T0-cotangent", "P3|4", "WP[2,2]"}) {
    const ModelSpec m = builtin(name);
    const StarEngine e(m.bivector, m.order);
    const ContractReport r = check_quantization_contract(e, {}, &m.table);
    EXPECT_TRUE(r.passed()) << name;
    ASSERT_NE(r.find("associativity"), nullptr);
    EXPECT_GT(r.find("associativity")->cases, 1000u) << name;
    EXPECT_GE(r.find("first-order")->cases, 200u) << name;
  }
}

TEST(Contract, DetectsNonAssociativity) {
  const ModelSpec t1 = builtin("T1-cotangent");
  const ContractReport r = check_quantization_contract(StarEngine(t1.bivector), {}, &t1.table);
  EXPECT_FALSE(r.find("associativity")->passed);
  EXPECT_TRUE(r.find("bilinearity")->passed);
  EXPECT_TRUE(r.find("first-order")->passed);

  KoszulConvention conv;
  conv.insert_tensor_sign = true;
  const ModelSpec p = builtin("P3|4");
  const ContractReport s = check_quantization_contract(StarEngine(p.bivector, 8, conv), {}, &p.table);
  EXPECT_FALSE(s.find("associativity")->passed);
}

TEST(Contract, MonomialBasisSize) {
  VariableTable t;
  const VarRef a = t.add("a", Parity::even), b = t.add("b", Parity::even);
  const VarRef p = t.add("p", Parity::odd), q = t.add("q", Parity::odd);
  // Degree <= 2 in {a, b | p, q}: 1 + 4 + (3 + 4 + 1) = 13.
  EXPECT_EQ(monomial_basis({a, b, p, q}, 2).size(), 13u);
}

}  // namespace
