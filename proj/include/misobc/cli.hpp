#pragma once

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "misobc/io.hpp"

namespace misobc {

namespace cli_detail {

struct Common {
  std::string config_path;
  std::string alpha, gamma, frac_gg, frac_aa, frac_ga, frac_ag;
  std::string out;
};

inline void add_quality_flags(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_path, "JSON configuration file; flags override its fields");
  app->add_option("--alpha", c.alpha, "quality exponent alpha, p/q");
  app->add_option("--gamma", c.gamma, "quality exponent gamma, p/q");
  app->add_option("--frac-gg", c.frac_gg, "fraction of time in state gg");
  app->add_option("--frac-aa", c.frac_aa, "fraction of time in state aa");
  app->add_option("--frac-ga", c.frac_ga, "fraction of time in state ga");
  app->add_option("--frac-ag", c.frac_ag, "fraction of time in state ag");
}

inline void add_out_flag(CLI::App* app, Common& c) {
  app->add_option("--out", c.out, "output directory (default: $MISOBC_OUT_DIR)");
}

inline std::optional<Rational> flag_rational(const std::string& text, const char* name) {
  if (text.empty()) return std::nullopt;
  try {
    return Rational::parse(text);
  } catch (const std::exception& e) {
    throw InputError(std::string("--") + name + ": " + e.what());
  }
}

/// File fields first, then any flag given on the command line.
inline ConfigFields gather(const Common& c) {
  ConfigFields f;
  if (!c.config_path.empty()) f = load_config_fields(c.config_path);
  ConfigFields flags;
  flags.alpha = flag_rational(c.alpha, "alpha");
  flags.gamma = flag_rational(c.gamma, "gamma");
  flags.frac_gg = flag_rational(c.frac_gg, "frac-gg");
  flags.frac_aa = flag_rational(c.frac_aa, "frac-aa");
  flags.frac_ga = flag_rational(c.frac_ga, "frac-ga");
  flags.frac_ag = flag_rational(c.frac_ag, "frac-ag");
  f.override_with(flags);
  return f;
}

inline std::filesystem::path out_dir(const Common& c) {
  std::string dir = c.out;
  if (dir.empty()) {
    if (const char* env = std::getenv("MISOBC_OUT_DIR")) dir = env;
  }
  if (dir.empty()) throw InputError("missing --out (and MISOBC_OUT_DIR is not set)");
  std::filesystem::create_directories(dir);
  return dir;
}

struct SchemeArgs {
  std::string scheme;
  int t1 = 0;
  int favored = 1;
  std::string q;
  bool reordered = false;
};

inline void add_scheme_flags(CLI::App* app, SchemeArgs& s) {
  app->add_option("--scheme", s.scheme, "x1, x2, x3 or x4")->required();
  app->add_option("--t1", s.t1, "X1 phase-1 length (default: smallest valid)");
  app->add_option("--favored", s.favored, "user receiving the common rate in X2/X3")->check(CLI::IsMember({1, 2}));
  app->add_option("--q", s.q, "X3/X4 quality exponent, p/q (default: gamma)");
  app->add_flag("--reordered", s.reordered, "use X1'' (users interchanged) instead of X1'");
}

inline SchemePlan build_scheme(const SchemeArgs& s, const ConfigFields& f) {
  const User fav = s.favored == 2 ? User::two : User::one;
  auto need = [&](const std::optional<Rational>& v, const char* name) {
    if (!v) throw InputError(std::string("scheme ") + s.scheme + " needs --" + name);
    return *v;
  };
  auto q_value = [&]() {
    if (auto q = flag_rational(s.q, "q")) return *q;
    return need(f.gamma, "q");
  };
  if (s.scheme == "x1") {
    const Rational a = need(f.alpha, "alpha"), g = need(f.gamma, "gamma");
    QualityConfig::alternating(a, g);
    const int t1 = s.t1 > 0 ? s.t1 : minimal_t1(a, g);
    return s.reordered ? build_x1_double_prime(a, g, t1) : build_x1_prime(a, g, t1);
  }
  if (s.scheme == "x2") {
    const Rational a = need(f.alpha, "alpha"), g = need(f.gamma, "gamma");
    QualityConfig::alternating(a, g);
    return build_x2(a, g, fav);
  }
  if (s.scheme == "x3") return build_x3(q_value(), fav);
  if (s.scheme == "x4") return x4_stub(q_value());
  throw InputError("unknown scheme '" + s.scheme + "' (expected x1, x2, x3 or x4)");
}

}  // namespace cli_detail

/// Entry point of the command-line tool. Returns the process exit code:
/// 0 on success, 1 when verification finds decode failures, 2 on bad input.
inline int run_cli(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  using namespace cli_detail;
  CLI::App app{"DoF regions, scheme verification and Monte Carlo for the two-user MISO broadcast channel"};
  app.require_subcommand(1);

  Common c;
  SchemeArgs sa;

  auto* region = app.add_subcommand("region", "write the DoF region polygon");
  add_quality_flags(region, c);
  add_out_flag(region, c);
  bool delayed = true;
  region->add_flag("--delayed,!--no-delayed", delayed, "with (default) or without delayed CSIT");

  auto* verify = app.add_subcommand("verify", "certify a scheme in exact exponent arithmetic");
  add_quality_flags(verify, c);
  add_out_flag(verify, c);
  add_scheme_flags(verify, sa);
  bool ablate = false;
  verify->add_flag("--ablate-delayed", ablate, "drop every use of delayed CSIT before verifying");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo rates over an SNR ladder");
  add_quality_flags(simulate, c);
  add_out_flag(simulate, c);
  add_scheme_flags(simulate, sa);
  std::string ladder;
  int trials = 0, antennas = 0;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  auto* o_trials = simulate->add_option("--trials", trials, "trials per SNR point (default 200)");
  auto* o_seed = simulate->add_option("--seed", seed, "master seed (default 1)");
  simulate->add_option("--snr-db", ladder, "ladder A:B:STEP in dB (default 60:140:20)");
  auto* o_ant = simulate->add_option("--antennas", antennas, "transmit antennas (default 2)");
  auto* o_thr = simulate->add_option("--threads", threads, "worker threads, 0 for all cores; results do not depend on it");

  auto* schedule = app.add_subcommand("schedule", "merge component schemes to reach a DoF point");
  add_quality_flags(schedule, c);
  add_out_flag(schedule, c);
  std::string target = "symmetric";
  int n = 0, favored = 1;
  std::string point;
  schedule->add_option("--target", target, "symmetric, no-delayed or point")
      ->check(CLI::IsMember({"symmetric", "no-delayed", "point"}));
  schedule->add_option("--n", n, "total slots (default: smallest valid)");
  schedule->add_option("--favored", favored, "favored user for no-delayed")->check(CLI::IsMember({1, 2}));
  schedule->add_option("--point", point, "target d1,d2 for --target point, e.g. 1/2,3/4");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    const ConfigFields fields = gather(c);

    if (region->parsed()) {
      const QualityConfig cfg = fields.quality();
      const auto dir = out_dir(c);
      const DoFRegion r = delayed ? region_with_delayed(cfg) : region_no_delayed(cfg);
      write_text((dir / "region.csv").string(), region_csv(r));
      write_text((dir / "region.json").string(), region_to_json(cfg, delayed).dump(2) + "\n");
      out << (delayed ? "optimal" : "achievable") << " region, lambda_bar = " << lambda_bar(cfg).str() << ", "
          << r.vertices.size() << " vertices\n";
      for (const auto& v : r.vertices) out << "  " << v.str() << "\n";
      return 0;
    }

    if (verify->parsed()) {
      SchemePlan plan = build_scheme(sa, fields);
      if (ablate) plan = ablate_delayed(plan);
      const auto dir = out_dir(c);
      const ExponentReport rep = run_decode_program(plan);
      write_text((dir / "report.json").string(), report_to_json(rep).dump(2) + "\n");
      out << rep.scheme << ": dof " << rep.dof.str() << ", sum " << rep.dof.sum().str() << ", " << rep.failures.size()
          << " failure(s)\n";
      for (const auto& f : rep.failures) out << "  " << f << "\n";
      return rep.ok() ? 0 : 1;
    }

    if (simulate->parsed()) {
      ConfigFields f = fields;
      ConfigFields flags;
      if (o_trials->count()) flags.trials = trials;
      if (o_seed->count()) flags.seed = seed;
      if (!ladder.empty()) flags.snr_db = ladder;
      if (o_ant->count()) flags.antennas = antennas;
      if (o_thr->count()) flags.threads = threads;
      f.override_with(flags);
      const SchemePlan plan = build_scheme(sa, f);
      const SimOptions opt = f.sim_options();
      if (opt.trials < 1) throw std::invalid_argument("trials must be at least 1 (got " + std::to_string(opt.trials) + ")");
      if (opt.antennas < 2) throw std::invalid_argument("antennas must be at least 2");
      const auto snr = parse_ladder(f.snr_db.value_or("60:140:20"));
      const auto dir = out_dir(c);
      const SimResult res = simulate_ladder(plan, snr, opt);
      if (!res.fit) err << "warning: ladder spans less than 40 dB or has fewer than 3 points; no slope fitted\n";
      const ExponentReport rep = run_decode_program(plan);
      write_text((dir / "simulate.csv").string(), sim_csv(res));
      write_text((dir / "simulate.json").string(), sim_to_json(res, rep.dof).dump(2) + "\n");
      out << res.scheme << ": engine dof " << rep.dof.str();
      if (res.fit) out << ", fitted slopes (" << fixed12((*res.fit)[0].slope) << ", " << fixed12((*res.fit)[1].slope) << ")";
      out << "\n";
      return 0;
    }

    if (schedule->parsed()) {
      const QualityConfig cfg = fields.quality();
      const auto dir = out_dir(c);
      Json doc;
      std::string text;
      if (target == "point") {
        const auto comma = point.find(',');
        if (comma == std::string::npos) throw InputError("--point must look like d1,d2");
        const DoFPoint p{Rational::parse(point.substr(0, comma)), Rational::parse(point.substr(comma + 1))};
        auto ts = schedule_point(cfg, p);
        if (!ts) throw InputError("point " + p.str() + " lies outside the delayed-CSIT region");
        doc["target"] = point_json(p);
        doc["parts"] = Json::array();
        for (const auto& [s, w] : ts->parts) {
          doc["parts"].push_back(Json{{"weight", w.str()}, {"schedule", schedule_to_json(s)}});
          text += "weight " + w.str() + "\n" + schedule_text(s);
        }
        doc["achieved"] = point_json(ts->achieved);
        text += "time-shared " + ts->achieved.str() + "\n";
      } else {
        const Schedule s = target == "symmetric"
                               ? merge_symmetric_delayed(cfg, n > 0 ? n : minimal_n_delayed(cfg))
                               : merge_no_delayed(cfg, favored == 2 ? User::two : User::one, n > 0 ? n : minimal_n_no_delayed(cfg));
        for (const auto& p : check_conservation(s, cfg)) throw std::logic_error(p);
        doc = schedule_to_json(s);
        text = schedule_text(s);
      }
      write_text((dir / "schedule.json").string(), doc.dump(2) + "\n");
      write_text((dir / "schedule.txt").string(), text);
      out << text;
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace misobc
