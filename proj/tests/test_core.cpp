#include <gtest/gtest.h>

#include "misobc/core.hpp"

using namespace misobc;

namespace {

std::vector<Rational> grid(int den) {
  std::vector<Rational> v;
  for (int k = 0; k <= den; ++k) v.emplace_back(k, den);
  return v;
}

}  // namespace

TEST(QualityConfig, AcceptsValid) {
  auto c = QualityConfig::make(Rational(1, 3), Rational(2, 3), 0, 0, Rational(1, 2), Rational(1, 2));
  EXPECT_TRUE(c.symmetric());
  EXPECT_EQ(c.exponent(Quality::alpha), Rational(1, 3));
  EXPECT_EQ(c.fraction(kStateGA), Rational(1, 2));
}

TEST(QualityConfig, RejectsWithInvariantName) {
  try {
    QualityConfig::make(Rational(3, 4), Rational(1, 2), 1, 0, 0, 0);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("alpha <= gamma"), std::string::npos);
  }
  try {
    QualityConfig::make(0, 1, Rational(1, 2), Rational(2, 5), 0, 0);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("sum to 1"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("9/10"), std::string::npos);
  }
  EXPECT_THROW(QualityConfig::make(Rational(-1, 3), 0, 1, 0, 0, 0), ConfigError);
  EXPECT_THROW(QualityConfig::make(0, Rational(4, 3), 1, 0, 0, 0), ConfigError);
  EXPECT_THROW(QualityConfig::make(0, 1, Rational(3, 2), Rational(-1, 2), 0, 0), ConfigError);
}

TEST(CsitState, ParseAndPrint) {
  EXPECT_EQ(CsitState::parse("ga"), kStateGA);
  EXPECT_EQ(kStateAG.str(), "ag");
  EXPECT_EQ(kStateGA.swapped(), kStateAG);
  EXPECT_THROW(CsitState::parse("gx"), ConfigError);
  EXPECT_THROW(CsitState::parse("g"), ConfigError);
}

TEST(LambdaBar, Examples) {
  EXPECT_EQ(lambda_bar(QualityConfig::alternating(0, 1)), Rational(1, 2));
  EXPECT_EQ(lambda_bar(QualityConfig::alternating(Rational(1, 3), Rational(2, 3))), Rational(1, 2));
  EXPECT_EQ(lambda_bar(QualityConfig::make(Rational(2, 5), Rational(2, 5), Rational(1, 7), Rational(2, 7), Rational(3, 7), Rational(1, 7))),
            Rational(2, 5));
  EXPECT_EQ(lambda_bar(QualityConfig::make(Rational(1, 4), Rational(3, 4), Rational(1, 2), 0, Rational(1, 4), Rational(1, 4))),
            Rational(3, 4) * Rational(3, 4) + Rational(1, 4) * Rational(1, 4));
}

// Sweep: alpha <= lambda_bar <= gamma, and monotone in alpha, gamma and frac_gg.
TEST(LambdaBar, BoundedAndMonotoneOnGrid) {
  const auto g = grid(6);
  const auto f = grid(4);
  for (const auto& a : g)
    for (const auto& c : g) {
      if (a > c) continue;
      for (const auto& gg : f)
        for (const auto& aa : f)
          for (const auto& ga : f) {
            const Rational ag = Rational(1) - gg - aa - ga;
            if (ag < Rational(0)) continue;
            const auto cfg = QualityConfig::make(a, c, gg, aa, ga, ag);
            const Rational lb = lambda_bar(cfg);
            EXPECT_LE(a, lb);
            EXPECT_LE(lb, c);
            if (c + Rational(1, 6) <= Rational(1)) {
              EXPECT_LE(lb, lambda_bar(QualityConfig::make(a, c + Rational(1, 6), gg, aa, ga, ag)));
            }
            if (a + Rational(1, 6) <= c) {
              EXPECT_LE(lb, lambda_bar(QualityConfig::make(a + Rational(1, 6), c, gg, aa, ga, ag)));
            }
            if (aa >= Rational(1, 4)) {
              EXPECT_LE(lb, lambda_bar(QualityConfig::make(a, c, gg + Rational(1, 4), aa - Rational(1, 4), ga, ag)));
            }
          }
    }
}

TEST(DoFPoint, Helpers) {
  DoFPoint p{Rational(1, 2), Rational(1, 3)};
  EXPECT_EQ(p.swapped(), (DoFPoint{Rational(1, 3), Rational(1, 2)}));
  EXPECT_EQ(p.sum(), Rational(5, 6));
  EXPECT_EQ(p.str(), "(1/2, 1/3)");
}
