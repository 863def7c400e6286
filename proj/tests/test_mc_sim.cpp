#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "misobc/exponent_engine.hpp"
#include "misobc/mc_sim.hpp"

using namespace misobc;

TEST(Rng, Reproducible) {
  Rng a(5), b(5), c(6);
  for (int i = 0; i < 10; ++i) {
    const double x = a.uniform();
    EXPECT_EQ(x, b.uniform());
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
  }
  EXPECT_NE(a.uniform(), c.uniform());
  EXPECT_NE(trial_seed(1, 0), trial_seed(1, 1));
  EXPECT_NE(trial_seed(1, 0), trial_seed(2, 0));
  EXPECT_EQ(trial_seed(3, 9), trial_seed(3, 9));
}

TEST(ChannelDraw, ErrorVarianceMatchesQuality) {
  const double P = 1e4;
  for (double q : {0.0, 0.25, 0.5, 1.0}) {
    Rng rng(99);
    double err = 0, total = 0, est = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
      const auto d = draw_channel(q, q, P, 2, rng);
      err += norm2(d.h_err);
      total += norm2(d.g) / 2;
      est += norm2(d.h_hat);
    }
    const double want = std::pow(P, -q);
    EXPECT_NEAR(err / n / want, 1.0, 0.05) << q;
    EXPECT_NEAR(total / n, 1.0, 0.05) << q;
    EXPECT_NEAR(est / n, 2.0 - want, 0.05 * 2) << q;
  }
  Rng rng(1);
  EXPECT_THROW(draw_channel(0.5, 0.5, 0.0, 2, rng), std::invalid_argument);
  EXPECT_THROW(draw_channel(0.5, 0.5, 10.0, 1, rng), std::invalid_argument);
}

TEST(Beams, ZeroForcingAndUnitNorm) {
  Rng rng(3);
  for (int m : {2, 3, 4}) {
    for (int i = 0; i < 50; ++i) {
      const CVec est = rng.complex_normal_vec(m, 1.0);
      const CVec v = perp_beam(est, rng);
      EXPECT_NEAR(norm2(v), 1.0, 1e-12);
      EXPECT_LT(std::abs(dot_t(est, v)), 1e-12);
      const CVec w = along_beam(est);
      EXPECT_NEAR(std::abs(dot_t(est, w)), std::sqrt(norm2(est)), 1e-12);
    }
  }
}

TEST(LogGramDet, MatchesDirectDeterminant) {
  Row<cplx> r1{{"x", {1, 1}}, {"y", {2, 0}}};
  Row<cplx> r2{{"x", {0, 1}}, {"y", {1, -1}}};
  const Row<cplx>* rows[] = {&r1, &r2};
  const cplx det = cplx(1, 1) * cplx(1, -1) - cplx(2, 0) * cplx(0, 1);
  auto all = [](const std::string&) { return true; };
  EXPECT_NEAR(log2_gram_det(rows, all), std::log2(std::norm(det)), 1e-12);
  // one row: det(C C^H) is the squared norm
  const Row<cplx>* one[] = {&r1};
  EXPECT_NEAR(log2_gram_det(one, all), std::log2(2.0 + 4.0), 1e-12);
  auto only_x = [](const std::string& c) { return c == "x"; };
  EXPECT_TRUE(std::isinf(log2_gram_det(rows, only_x)));
}

TEST(FitDof, ExactLine) {
  std::vector<std::pair<double, double>> pts;
  for (double db : {60.0, 80.0, 100.0}) {
    const double x = std::log2(db_to_linear(db));
    pts.emplace_back(x, 0.75 * x + 2.0);
  }
  const auto f = fit_dof(pts);
  EXPECT_NEAR(f.slope, 0.75, 1e-12);
  EXPECT_NEAR(f.intercept, 2.0, 1e-9);
  EXPECT_NEAR(f.residual, 0.0, 1e-9);
}

TEST(FitDof, DegenerateLadders) {
  auto pt = [](double db) { return std::pair<double, double>{std::log2(db_to_linear(db)), 1.0}; };
  EXPECT_THROW(fit_dof({pt(60), pt(140)}), std::invalid_argument);
  EXPECT_THROW(fit_dof({pt(60), pt(70), pt(80)}), std::invalid_argument);
  EXPECT_NO_THROW(fit_dof({pt(60), pt(80), pt(100)}));
}

TEST(Ladder, Parse) {
  EXPECT_EQ(parse_ladder("60:140:20"), (std::vector<double>{60, 80, 100, 120, 140}));
  EXPECT_EQ(parse_ladder("10:10:5"), (std::vector<double>{10}));
  EXPECT_THROW(parse_ladder("60:140"), std::invalid_argument);
  EXPECT_THROW(parse_ladder("60:40:10"), std::invalid_argument);
  EXPECT_THROW(parse_ladder("60:140:0"), std::invalid_argument);
  EXPECT_THROW(parse_ladder("a:b:c"), std::invalid_argument);
}

TEST(Simulate, Errors) {
  SimOptions opt;
  EXPECT_THROW(simulate_scheme(x4_stub(Rational(1, 2)), 1e6, opt), SchemeError);
  opt.trials = 0;
  EXPECT_THROW(simulate_scheme(build_x3(Rational(1, 2), User::one), 1e6, opt), std::invalid_argument);
  opt.trials = 5;
  EXPECT_THROW(simulate_scheme(build_x3(Rational(1, 2), User::one), 0.0, opt), std::invalid_argument);
  EXPECT_THROW(simulate_ladder(build_x3(Rational(1, 2), User::one), {}, opt), std::invalid_argument);
}

TEST(Simulate, ShortLadderHasNoFit) {
  SimOptions opt;
  opt.trials = 5;
  const auto r = simulate_ladder(build_x3(Rational(1, 2), User::one), {60, 80}, opt);
  EXPECT_FALSE(r.fit.has_value());
  EXPECT_EQ(r.points.size(), 2U);
}

TEST(Simulate, BitIdenticalAcrossThreadCounts) {
  const auto plan = build_x1_prime(Rational(1, 3), Rational(2, 3), 1);
  SimOptions a;
  a.trials = 40;
  a.seed = 17;
  a.threads = 1;
  SimOptions b = a;
  b.threads = 4;
  const auto ra = simulate_ladder(plan, {60, 100, 140}, a);
  const auto rb = simulate_ladder(plan, {60, 100, 140}, b);
  for (std::size_t i = 0; i < ra.points.size(); ++i)
    for (std::size_t u = 0; u < 2; ++u) {
      EXPECT_EQ(ra.points[i].rate.mean[u], rb.points[i].rate.mean[u]);
      EXPECT_EQ(ra.points[i].rate.stderr_[u], rb.points[i].rate.stderr_[u]);
    }
  SimOptions c = a;
  c.seed = 18;
  const auto rc = simulate_ladder(plan, {60, 100, 140}, c);
  EXPECT_NE(ra.points[0].rate.mean[0], rc.points[0].rate.mean[0]);
}

TEST(Simulate, TrialsAreIndependentOfEachOther) {
  const auto plan = build_x3(Rational(1, 2), User::one);
  const auto t3 = simulate_trial(plan, 1e8, 2, trial_seed(5, 3));
  SimOptions opt;
  opt.trials = 4;
  opt.seed = 5;
  opt.threads = 1;
  std::vector<std::array<double, 2>> seen = parallel_trials(opt.trials, 2, [&](int t) {
    return simulate_trial(plan, 1e8, 2, trial_seed(opt.seed, static_cast<std::uint64_t>(t)));
  });
  EXPECT_EQ(seen[3], t3);
}

TEST(Simulate, ParallelTrialsPropagatesErrors) {
  EXPECT_THROW(parallel_trials(10, 3,
                               [](int t) {
                                 if (t == 7) throw std::runtime_error("boom");
                                 return t;
                               }),
               std::runtime_error);
}

TEST(Simulate, PowerConstraint) {
  for (const auto& plan : {build_x1_prime(Rational(1, 3), Rational(2, 3), 1), build_x2(Rational(1, 3), Rational(2, 3), User::one),
                           build_x3(Rational(1, 2), User::two)}) {
    EXPECT_LE(max_power_ratio(plan, 1e6, 200000, 42), 1.01) << plan.name;
  }
  EXPECT_THROW(max_power_ratio(x4_stub(0), 1e6, 10, 1), SchemeError);
}

TEST(Simulate, AmplitudesNeverExceedBudget) {
  const auto plan = build_x1_prime(Rational(1, 3), Rational(2, 3), 1);
  for (double P : {1.0, 10.0, 1e6, 1e12})
    for (const auto& loc : all_locations(plan)) {
      double total = 0;
      for (double a : slot_amplitudes(plan.slot(loc), P)) total += a * a;
      EXPECT_LE(total, P * (1 + 1e-12));
    }
}

namespace {

double loglog_slope(const std::function<double(double)>& power, const std::vector<double>& snr_db) {
  std::vector<std::pair<double, double>> pts;
  for (double db : snr_db) pts.emplace_back(std::log2(db_to_linear(db)), std::log2(power(db_to_linear(db))));
  return fit_dof(pts).slope;
}

}  // namespace

TEST(Quantization, ResidualPowerScaling) {
  auto plan = build_x1_prime(Rational(1, 3), Rational(2, 3), 1);
  const std::vector<double> ladder{40, 60, 80, 100, 120};
  const std::string id = "i1[1,1]";
  const auto* link = find_link(plan, id);
  ASSERT_NE(link, nullptr);
  // received exponent of the interference at its observer: 1 - alpha
  const double e = 2.0 / 3.0;
  EXPECT_NEAR(loglog_slope([&](double P) { return interference_power(plan, id, P, 400, 3); }, ladder), e, 0.1);
  EXPECT_NEAR(loglog_slope([&](double P) { return residual_interference_power(plan, id, P, 400, 3); }, ladder),
              e - link->quantization_prelog.to_double(), 0.1);
  for (auto& l : plan.links)
    if (l.source.id == id) l.quantization_prelog = Rational(1, 3);
  EXPECT_NEAR(loglog_slope([&](double P) { return residual_interference_power(plan, id, P, 400, 3); }, ladder), e - 1.0 / 3.0,
              0.1);
  EXPECT_THROW(residual_interference_power(plan, "nope", 1e6, 10, 1), std::invalid_argument);
}

TEST(Simulate, X3SlopeMatchesEngine) {
  const auto plan = build_x3(Rational(1, 2), User::one);
  SimOptions opt;
  opt.trials = 60;
  opt.seed = 3;
  const auto r = simulate_ladder(plan, parse_ladder("60:140:20"), opt);
  ASSERT_TRUE(r.fit.has_value());
  const auto d = run_decode_program(plan).dof;
  EXPECT_NEAR((*r.fit)[0].slope, d.d1.to_double(), 0.05);
  EXPECT_NEAR((*r.fit)[1].slope, d.d2.to_double(), 0.05);
}
