#include <gtest/gtest.h>

#include "misobc/scheduler.hpp"

using namespace misobc;

namespace {

// Symmetric configurations: alpha <= gamma on a grid, fractions with
// frac_ga == frac_ag.
std::vector<QualityConfig> symmetric_grid(bool include_gamma_one) {
  std::vector<QualityConfig> out;
  const int den = 3;
  const std::vector<std::array<Rational, 3>> fracs{
      {0, 0, Rational(1, 2)},
      {Rational(1, 2), 0, Rational(1, 4)},
      {0, Rational(1, 3), Rational(1, 3)},
      {Rational(1, 4), Rational(1, 4), Rational(1, 4)},
      {1, 0, 0},
      {Rational(1, 6), Rational(1, 2), Rational(1, 6)},
  };
  for (int a = 0; a <= den; ++a)
    for (int g = a; g <= den; ++g) {
      if (!include_gamma_one && g == den) continue;
      for (const auto& f : fracs) out.push_back(QualityConfig::make(Rational(a, den), Rational(g, den), f[0], f[1], f[2], f[2]));
    }
  return out;
}

}  // namespace

TEST(Merge, SymmetricExample) {
  const auto cfg = QualityConfig::alternating(Rational(1, 3), Rational(2, 3));
  EXPECT_EQ(minimal_n_delayed(cfg), 8);
  const auto s = merge_symmetric_delayed(cfg, 8);
  EXPECT_EQ(s.achieved, (DoFPoint{Rational(5, 6), Rational(5, 6)}));
  EXPECT_TRUE(check_conservation(s, cfg).empty());
  EXPECT_EQ(s.entries.size(), 8U);
  EXPECT_EQ(merge_symmetric_delayed(cfg, 16).achieved, s.achieved);
  EXPECT_THROW(merge_symmetric_delayed(cfg, 4), ScheduleError);
  EXPECT_THROW(merge_symmetric_delayed(cfg, 0), ScheduleError);
}

TEST(Merge, NoDelayedExample) {
  const auto cfg = QualityConfig::alternating(Rational(1, 3), Rational(2, 3));
  const auto s = merge_no_delayed(cfg, User::one, minimal_n_no_delayed(cfg));
  EXPECT_EQ(s.n, 2);
  EXPECT_EQ(s.achieved, (DoFPoint{1, Rational(1, 2)}));
  EXPECT_TRUE(check_conservation(s, cfg).empty());
  const auto m = merge_no_delayed(cfg, User::two, 2);
  EXPECT_EQ(m.achieved, (DoFPoint{Rational(1, 2), 1}));
  EXPECT_TRUE(check_conservation(m, cfg).empty());
}

TEST(Merge, IndivisibleN) {
  const auto cfg = QualityConfig::make(Rational(1, 3), Rational(2, 3), Rational(1, 3), 0, Rational(1, 3), Rational(1, 3));
  try {
    merge_no_delayed(cfg, User::one, 2);
    FAIL();
  } catch (const ScheduleError& e) {
    EXPECT_NE(std::string(e.what()).find("indivisible n"), std::string::npos);
  }
}

TEST(Merge, RequiresSymmetricFractions) {
  const auto cfg = QualityConfig::make(Rational(1, 3), Rational(2, 3), 0, 0, Rational(1, 4), Rational(3, 4));
  EXPECT_THROW(minimal_n_delayed(cfg), ConfigError);
  EXPECT_THROW(merge_symmetric_delayed(cfg, 8), ConfigError);
  EXPECT_THROW(merge_no_delayed(cfg, User::one, 4), ConfigError);
}

TEST(Merge, GammaOneUsesDeclaredX1) {
  const auto cfg = QualityConfig::alternating(Rational(1, 3), 1);
  const auto s = merge_symmetric_delayed(cfg, minimal_n_delayed(cfg));
  const Rational d = (Rational(2) + lambda_bar(cfg)) / Rational(3);
  EXPECT_EQ(s.achieved, (DoFPoint{d, d}));
  EXPECT_EQ(s.entries.front().component, "X1(declared)");
  EXPECT_TRUE(check_conservation(s, cfg).empty());
}

TEST(MergeProperties, ReachesCornersAndConservesSlots) {
  for (const auto& cfg : symmetric_grid(true)) {
    const Rational lb = lambda_bar(cfg);
    const Rational sym = (Rational(2) + lb) / Rational(3);
    const auto s = merge_symmetric_delayed(cfg, minimal_n_delayed(cfg));
    EXPECT_EQ(s.achieved, (DoFPoint{sym, sym})) << cfg.alpha().str() << "," << cfg.gamma().str();
    EXPECT_TRUE(check_conservation(s, cfg).empty());
    const auto s2 = merge_symmetric_delayed(cfg, 3 * minimal_n_delayed(cfg));
    EXPECT_EQ(s2.achieved, s.achieved);
    for (User u : {User::one, User::two}) {
      const auto m = merge_no_delayed(cfg, u, minimal_n_no_delayed(cfg));
      EXPECT_EQ(m.achieved, u == User::one ? (DoFPoint{1, lb}) : (DoFPoint{lb, 1}));
      EXPECT_TRUE(check_conservation(m, cfg).empty());
    }
  }
}

TEST(Conservation, DetectsProblems) {
  const auto cfg = QualityConfig::alternating(Rational(1, 3), Rational(2, 3));
  auto s = merge_symmetric_delayed(cfg, 8);
  s.entries.back().slots += 1;
  EXPECT_EQ(check_conservation(s, cfg).size(), 2U);
  auto t = merge_symmetric_delayed(cfg, 8);
  t.entries[0].state = kStateGG;
  EXPECT_FALSE(check_conservation(t, cfg).empty());
}

TEST(TimeShare, ConvexCombination) {
  const DoFPoint a{1, 0}, b{0, 1};
  EXPECT_EQ(time_share({{a, Rational(1, 4)}, {b, Rational(3, 4)}}), (DoFPoint{Rational(1, 4), Rational(3, 4)}));
  EXPECT_THROW(time_share({{a, Rational(1, 2)}}), std::invalid_argument);
  EXPECT_THROW(time_share({{a, Rational(3, 2)}, {b, Rational(-1, 2)}}), std::invalid_argument);
  EXPECT_THROW(time_share({}), std::invalid_argument);
}

TEST(Corners, MatchRegionVertices) {
  for (const auto& cfg : symmetric_grid(true)) {
    const auto region = region_with_delayed(cfg);
    const auto corners = corner_schedules(cfg);
    ASSERT_EQ(corners.size(), region.vertices.size());
    for (std::size_t i = 0; i < corners.size(); ++i) {
      EXPECT_EQ(corners[i].achieved, region.vertices[i]);
      if (!corners[i].entries.empty()) {
        EXPECT_TRUE(check_conservation(corners[i], cfg).empty()) << corners[i].name;
      }
    }
  }
}

TEST(SchedulePoint, InteriorAndOutside) {
  const auto cfg = QualityConfig::alternating(Rational(1, 3), Rational(2, 3));
  const DoFPoint p{Rational(1, 2), Rational(3, 4)};
  const auto ts = schedule_point(cfg, p);
  ASSERT_TRUE(ts.has_value());
  EXPECT_EQ(ts->achieved, p);
  Rational total;
  for (const auto& [_, w] : ts->parts) total += w;
  EXPECT_EQ(total, Rational(1));
  EXPECT_FALSE(schedule_point(cfg, {1, 1}).has_value());
}

TEST(SchedulePoint, GridOfTargets) {
  for (const auto& cfg : symmetric_grid(false)) {
    const auto region = region_with_delayed(cfg);
    for (int i = 0; i <= 4; ++i)
      for (int j = 0; j <= 4; ++j) {
        const DoFPoint p{Rational(i, 4), Rational(j, 4)};
        const auto ts = schedule_point(cfg, p);
        EXPECT_EQ(ts.has_value(), contains(region, p));
        if (ts) { EXPECT_EQ(ts->achieved, p); }
      }
  }
}

TEST(ScheduleText, Layout) {
  const auto cfg = QualityConfig::alternating(Rational(1, 3), Rational(2, 3));
  const auto text = schedule_text(merge_symmetric_delayed(cfg, 8));
  EXPECT_EQ(text.rfind("schedule symmetric-delayed n=8\n", 0), 0U);
  EXPECT_NE(text.find("achieved (5/6, 5/6)"), std::string::npos);
}
