#pragma once

#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "misobc/region.hpp"
#include "misobc/scheme_ir.hpp"

namespace misobc {

class ScheduleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Slots given to one component scheme in one CSIT state. `phase` is the
/// component's phase number (0 for single-phase components); entries appear in
/// the order the states must be presented.
struct ScheduleEntry {
  std::string component;
  int phase = 0;
  CsitState state;
  int slots = 0;
  DoFPoint component_dof;

  friend bool operator==(const ScheduleEntry&, const ScheduleEntry&) = default;
};

struct Schedule {
  std::string name;
  int n = 0;
  std::vector<ScheduleEntry> entries;
  DoFPoint achieved;

  friend bool operator==(const Schedule&, const Schedule&) = default;
};

namespace detail {

inline std::int64_t lcm64(std::int64_t a, std::int64_t b) { return std::lcm(a, b); }

inline int slots_for(const Rational& frac, int n, const char* what) {
  Rational s = frac * Rational(n);
  if (!s.is_integer())
    throw ScheduleError("indivisible n: n = " + std::to_string(n) + " gives " + s.str() + " slots for " + what);
  return static_cast<int>(s.num());
}

inline void require_symmetric(const QualityConfig& cfg) {
  if (!cfg.symmetric())
    throw ConfigError("invariant violated: frac_ga == frac_ag is required for merging (frac_ga = " + cfg.frac_ga().str() +
                      ", frac_ag = " + cfg.frac_ag().str() + ")");
}

/// Slots in one X1'||X1'' block, or 2 when X1 is carried as a declared point.
inline int x1_block(const QualityConfig& cfg) {
  if (cfg.gamma() >= Rational(1)) return 2;
  const int t1 = minimal_t1(cfg.alpha(), cfg.gamma());
  return 2 * (t1 + 3 * x1_later_phase_length(cfg.alpha(), cfg.gamma(), t1));
}

inline DoFPoint achieved_of(const std::vector<ScheduleEntry>& entries, int n) {
  Rational d1, d2;
  for (const auto& e : entries) {
    d1 += Rational(e.slots) * e.component_dof.d1;
    d2 += Rational(e.slots) * e.component_dof.d2;
  }
  return {d1 / Rational(n), d2 / Rational(n)};
}

}  // namespace detail

/// Smallest n for merge_symmetric_delayed: every n*lambda integral and the
/// X1 share a whole number of X1'||X1'' blocks.
inline int minimal_n_delayed(const QualityConfig& cfg) {
  detail::require_symmetric(cfg);
  std::int64_t n = 1;
  for (const auto& f : {cfg.frac_gg(), cfg.frac_aa(), cfg.frac_ga(), cfg.frac_ag()}) n = detail::lcm64(n, f.den());
  const Rational cross = cfg.frac_ga() + cfg.frac_ag();
  if (!cross.is_zero()) n = detail::lcm64(n, (cross / Rational(detail::x1_block(cfg))).den());
  return static_cast<int>(n);
}

/// Smallest n for merge_no_delayed: every n*lambda integral.
inline int minimal_n_no_delayed(const QualityConfig& cfg) {
  std::int64_t n = 1;
  for (const auto& f : {cfg.frac_gg(), cfg.frac_aa(), cfg.frac_ga(), cfg.frac_ag()}) n = detail::lcm64(n, f.den());
  return static_cast<int>(n);
}

/// X1'||X1'' on the cross states, X4(gamma) on gg and X4(alpha) on aa; reaches
/// ((2+lambda_bar)/3, (2+lambda_bar)/3). With gamma = 1 the X1 share is
/// carried as its declared point ((5+alpha)/6 per user).
inline Schedule merge_symmetric_delayed(const QualityConfig& cfg, int n) {
  detail::require_symmetric(cfg);
  if (n < 1) throw ScheduleError("indivisible n: n must be positive");
  const int s_gg = detail::slots_for(cfg.frac_gg(), n, "gg");
  const int s_aa = detail::slots_for(cfg.frac_aa(), n, "aa");
  const int s_cross = detail::slots_for(cfg.frac_ga() + cfg.frac_ag(), n, "the cross states");
  const Rational &a = cfg.alpha(), &g = cfg.gamma();

  Schedule s;
  s.name = "symmetric-delayed";
  s.n = n;
  if (s_cross > 0) {
    const int block = detail::x1_block(cfg);
    if (s_cross % block != 0)
      throw ScheduleError("indivisible n: " + std::to_string(s_cross) + " cross-state slots are not a multiple of the " +
                          std::to_string(block) + "-slot X1 block");
    const int reps = s_cross / block;
    if (g >= Rational(1)) {
      const Rational d = (Rational(5) + a) / Rational(6);
      s.entries.push_back({"X1(declared)", 0, kStateAG, reps, {d, d}});
      s.entries.push_back({"X1(declared)", 0, kStateGA, reps, {d, d}});
    } else {
      const int t1 = minimal_t1(a, g);
      const SchemePlan p1 = build_x1_prime(a, g, t1);
      const SchemePlan p2 = build_x1_double_prime(a, g, t1);
      for (const auto* p : {&p1, &p2})
        for (std::size_t k = 0; k < p->phases.size(); ++k)
          s.entries.push_back({p->name, static_cast<int>(k) + 1, p->phases[k].csit_state, reps * p->phases[k].duration,
                               p->claimed_dof});
    }
  }
  if (s_gg > 0) s.entries.push_back({"X4(gamma)", 0, kStateGG, s_gg, x4_stub(g).claimed_dof});
  if (s_aa > 0) s.entries.push_back({"X4(alpha)", 0, kStateAA, s_aa, x4_stub(a).claimed_dof});
  s.achieved = detail::achieved_of(s.entries, n);
  return s;
}

/// X2 on the cross states, X3(gamma) on gg and X3(alpha) on aa; reaches
/// (1, lambda_bar) for favored user 1, (lambda_bar, 1) for user 2.
inline Schedule merge_no_delayed(const QualityConfig& cfg, User favored, int n) {
  detail::require_symmetric(cfg);
  if (n < 1) throw ScheduleError("indivisible n: n must be positive");
  const int s_gg = detail::slots_for(cfg.frac_gg(), n, "gg");
  const int s_aa = detail::slots_for(cfg.frac_aa(), n, "aa");
  const int s_ga = detail::slots_for(cfg.frac_ga(), n, "ga");
  const int s_ag = detail::slots_for(cfg.frac_ag(), n, "ag");
  const Rational &a = cfg.alpha(), &g = cfg.gamma();

  Schedule s;
  s.name = favored == User::one ? "no-delayed(user1)" : "no-delayed(user2)";
  s.n = n;
  if (s_ga > 0) {
    const SchemePlan x2 = build_x2(a, g, favored);
    for (std::size_t k = 0; k < x2.phases.size(); ++k) {
      const CsitState st = x2.phases[k].csit_state;
      s.entries.push_back({x2.name, static_cast<int>(k) + 1, st, st == kStateGA ? s_ga : s_ag, x2.claimed_dof});
    }
  }
  if (s_gg > 0) s.entries.push_back({"X3(gamma)", 0, kStateGG, s_gg, build_x3(g, favored).claimed_dof});
  if (s_aa > 0) s.entries.push_back({"X3(alpha)", 0, kStateAA, s_aa, build_x3(a, favored, Quality::alpha).claimed_dof});
  s.achieved = detail::achieved_of(s.entries, n);
  return s;
}

/// Single-user transmission to `u` in every slot, whatever the state.
inline Schedule single_user(const QualityConfig& cfg, User u, int n) {
  Schedule s;
  s.name = u == User::one ? "single-user(user1)" : "single-user(user2)";
  s.n = n;
  const DoFPoint d = u == User::one ? DoFPoint{1, 0} : DoFPoint{0, 1};
  for (const auto& st : {kStateGG, kStateAA, kStateGA, kStateAG}) {
    const int k = detail::slots_for(cfg.fraction(st), n, st.str().c_str());
    if (k > 0) s.entries.push_back({"single-user", 0, st, k, d});
  }
  s.achieved = detail::achieved_of(s.entries, n);
  return s;
}

/// Problems with slot conservation: total slots must be n and every state
/// must get exactly n * lambda slots.
inline std::vector<std::string> check_conservation(const Schedule& s, const QualityConfig& cfg) {
  std::vector<std::string> problems;
  int total = 0;
  for (const auto& e : s.entries) total += e.slots;
  if (total != s.n) problems.push_back("schedule uses " + std::to_string(total) + " slots, n = " + std::to_string(s.n));
  for (const auto& st : {kStateGG, kStateAA, kStateGA, kStateAG}) {
    int used = 0;
    for (const auto& e : s.entries)
      if (e.state == st) used += e.slots;
    const Rational want = cfg.fraction(st) * Rational(s.n);
    if (Rational(used) != want)
      problems.push_back("state " + st.str() + " uses " + std::to_string(used) + " slots, n*lambda = " + want.str());
  }
  return problems;
}

/// Exact convex combination. Weights must be nonnegative and sum to one.
inline DoFPoint time_share(const std::vector<std::pair<DoFPoint, Rational>>& points) {
  if (points.empty()) throw std::invalid_argument("bad weights: no points");
  Rational total, d1, d2;
  for (const auto& [p, w] : points) {
    if (w < Rational(0)) throw std::invalid_argument("bad weights: negative weight " + w.str());
    total += w;
    d1 += w * p.d1;
    d2 += w * p.d2;
  }
  if (total != Rational(1)) throw std::invalid_argument("bad weights: weights sum to " + total.str());
  return {d1, d2};
}

/// One schedule per vertex of the delayed-CSIT region, in vertex order.
inline std::vector<Schedule> corner_schedules(const QualityConfig& cfg) {
  const DoFRegion region = region_with_delayed(cfg);
  const Rational lb = lambda_bar(cfg);
  const int n_del = minimal_n_delayed(cfg);
  const int n_no = minimal_n_no_delayed(cfg);
  std::vector<Schedule> out;
  for (const auto& v : region.vertices) {
    if (v == DoFPoint{0, 0}) {
      out.push_back(Schedule{"idle", 1, {}, {0, 0}});
    } else if (v == DoFPoint{1, 0}) {
      out.push_back(single_user(cfg, User::one, n_no));
    } else if (v == DoFPoint{0, 1}) {
      out.push_back(single_user(cfg, User::two, n_no));
    } else if (v == DoFPoint{1, lb}) {
      out.push_back(merge_no_delayed(cfg, User::one, n_no));
    } else if (v == DoFPoint{lb, 1}) {
      out.push_back(merge_no_delayed(cfg, User::two, n_no));
    } else {
      out.push_back(merge_symmetric_delayed(cfg, n_del));
    }
  }
  return out;
}

struct TimeSharePlan {
  std::vector<std::pair<Schedule, Rational>> parts;
  DoFPoint achieved;
};

/// Time-sharing of corner schedules that reaches p; nullopt outside the region.
inline std::optional<TimeSharePlan> schedule_point(const QualityConfig& cfg, const DoFPoint& p) {
  const DoFRegion region = region_with_delayed(cfg);
  auto weights = vertex_weights(region, p);
  if (!weights) return std::nullopt;
  auto corners = corner_schedules(cfg);
  TimeSharePlan plan;
  std::vector<std::pair<DoFPoint, Rational>> mix;
  for (std::size_t i = 0; i < corners.size(); ++i) {
    if ((*weights)[i].is_zero()) continue;
    plan.parts.emplace_back(corners[i], (*weights)[i]);
    mix.emplace_back(corners[i].achieved, (*weights)[i]);
  }
  plan.achieved = time_share(mix);
  return plan;
}

/// Plain-text table: component, phase, state, slots, component DoF.
inline std::string schedule_text(const Schedule& s) {
  std::string out = "schedule " + s.name + " n=" + std::to_string(s.n) + "\n";
  out += "component\tphase\tstate\tslots\tcomponent_dof\n";
  for (const auto& e : s.entries)
    out += e.component + "\t" + std::to_string(e.phase) + "\t" + e.state.str() + "\t" + std::to_string(e.slots) + "\t" +
           e.component_dof.str() + "\n";
  out += "achieved " + s.achieved.str() + "\n";
  return out;
}

}  // namespace misobc
