#include <gtest/gtest.h>

#include <random>

#include "misobc/rational.hpp"

using misobc::Rational;

TEST(Rational, ReducesAndNormalizesSign) {
  Rational r(6, -4);
  EXPECT_EQ(r.num(), -3);
  EXPECT_EQ(r.den(), 2);
  EXPECT_EQ(Rational(0, 7), Rational(0));
  EXPECT_EQ(Rational(0, 7).den(), 1);
}

TEST(Rational, Arithmetic) {
  EXPECT_EQ(Rational(1, 3) + Rational(1, 6), Rational(1, 2));
  EXPECT_EQ(Rational(1, 3) - Rational(1, 2), Rational(-1, 6));
  EXPECT_EQ(Rational(2, 3) * Rational(9, 4), Rational(3, 2));
  EXPECT_EQ(Rational(2, 3) / Rational(4, 9), Rational(3, 2));
  EXPECT_THROW(Rational(1) / Rational(0), std::domain_error);
  EXPECT_THROW(Rational(1, 0), std::domain_error);
}

TEST(Rational, Ordering) {
  EXPECT_LT(Rational(1, 3), Rational(1, 2));
  EXPECT_GT(Rational(-1, 3), Rational(-1, 2));
  EXPECT_EQ(std::min(Rational(2, 3), Rational(3, 4)), Rational(2, 3));
  EXPECT_EQ(std::max(Rational(2, 3), Rational(3, 4)), Rational(3, 4));
}

TEST(Rational, ParseAndPrint) {
  EXPECT_EQ(Rational::parse("1/3"), Rational(1, 3));
  EXPECT_EQ(Rational::parse("-2/4"), Rational(-1, 2));
  EXPECT_EQ(Rational::parse("5"), Rational(5));
  EXPECT_EQ(Rational(5, 10).str(), "1/2");
  EXPECT_EQ(Rational(4, 2).str(), "2");
  EXPECT_THROW(Rational::parse("0.5"), std::invalid_argument);
  EXPECT_THROW(Rational::parse("1/0"), std::invalid_argument);
  EXPECT_THROW(Rational::parse(""), std::invalid_argument);
  EXPECT_THROW(Rational::parse("1/ 3"), std::invalid_argument);
}

TEST(Rational, OverflowIsReported) {
  const Rational big(INT64_MAX / 2 + 1);
  EXPECT_THROW(big * Rational(4), std::overflow_error);
  EXPECT_THROW(Rational(1, INT64_MAX) + Rational(1, INT64_MAX - 1), std::overflow_error);
}

// Field laws on random small rationals, compared through cross-multiplication.
TEST(Rational, RandomFieldLaws) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> num(-50, 50), den(1, 50);
  for (int i = 0; i < 2000; ++i) {
    const int an = num(rng), ad = den(rng), bn = num(rng), bd = den(rng);
    const Rational a(an, ad), b(bn, bd);
    const Rational s = a + b;
    EXPECT_EQ(static_cast<long long>(s.num()) * ad * bd, static_cast<long long>(an * bd + bn * ad) * s.den());
    EXPECT_EQ(a + b, b + a);
    EXPECT_EQ(a * b, b * a);
    EXPECT_EQ((a - b) + b, a);
    if (!b.is_zero()) { EXPECT_EQ((a / b) * b, a); }
    EXPECT_EQ(a < b, static_cast<long long>(an) * bd < static_cast<long long>(bn) * ad);
    EXPECT_GT(s.den(), 0);
    EXPECT_EQ(std::gcd(s.num(), s.den()), s.num() == 0 ? s.den() : 1);
  }
}
