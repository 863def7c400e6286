#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "misobc/exponent_engine.hpp"
#include "misobc/mc_sim.hpp"
#include "misobc/region.hpp"
#include "misobc/scheduler.hpp"

namespace misobc {

using Json = nlohmann::ordered_json;

/// Malformed input file or field. The message carries line/column or the
/// offending field name.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Configuration

/// Partially specified configuration: file contents and flags are merged
/// field by field before validation.
struct ConfigFields {
  std::optional<Rational> alpha, gamma, frac_gg, frac_aa, frac_ga, frac_ag;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> snr_db;
  std::optional<int> antennas;
  std::optional<unsigned> threads;

  /// Fields set in `over` replace ours.
  void override_with(const ConfigFields& over) {
    auto take = [](auto& mine, const auto& theirs) {
      if (theirs) mine = theirs;
    };
    take(alpha, over.alpha);
    take(gamma, over.gamma);
    take(frac_gg, over.frac_gg);
    take(frac_aa, over.frac_aa);
    take(frac_ga, over.frac_ga);
    take(frac_ag, over.frac_ag);
    take(trials, over.trials);
    take(seed, over.seed);
    take(snr_db, over.snr_db);
    take(antennas, over.antennas);
    take(threads, over.threads);
  }

  /// Validated QualityConfig. Missing state fractions count as zero, except
  /// that with all four missing the states alternate ga/ag half the time each.
  [[nodiscard]] QualityConfig quality() const {
    if (!alpha) throw ConfigError("missing field 'alpha'");
    if (!gamma) throw ConfigError("missing field 'gamma'");
    if (!frac_gg && !frac_aa && !frac_ga && !frac_ag) return QualityConfig::alternating(*alpha, *gamma);
    auto z = [](const std::optional<Rational>& f) { return f.value_or(Rational(0)); };
    return QualityConfig::make(*alpha, *gamma, z(frac_gg), z(frac_aa), z(frac_ga), z(frac_ag));
  }

  [[nodiscard]] SimOptions sim_options() const {
    SimOptions o;
    if (trials) o.trials = *trials;
    if (seed) o.seed = *seed;
    if (antennas) o.antennas = *antennas;
    if (threads) o.threads = *threads;
    return o;
  }
};

namespace detail {

inline std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline Rational rational_field(const Json& v, const std::string& key) {
  if (!v.is_string()) throw InputError("field '" + key + "': expected a rational string such as \"1/3\"");
  try {
    return Rational::parse(v.get<std::string>());
  } catch (const std::exception& e) {
    throw InputError("field '" + key + "': " + e.what());
  }
}

template <class T>
T integer_field(const Json& v, const std::string& key, long long lo) {
  if (!v.is_number_integer()) throw InputError("field '" + key + "': expected an integer");
  const auto x = v.get<long long>();
  if (x < lo) throw InputError("field '" + key + "': must be at least " + std::to_string(lo));
  return static_cast<T>(x);
}

}  // namespace detail

/// Parses a configuration document. Rationals are "p/q" strings; an optional
/// "simulation" object holds trials, seed, snr_db, antennas and threads.
inline ConfigFields parse_config(const std::string& text, const std::string& origin = "<config>") {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    auto [line, col] = detail::line_col(text, e.byte > 0 ? e.byte - 1 : 0);
    throw InputError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": JSON parse error");
  }
  if (!doc.is_object()) throw InputError(origin + ": top level must be an object");
  ConfigFields f;
  for (const auto& [key, v] : doc.items()) {
    if (key == "alpha") f.alpha = detail::rational_field(v, key);
    else if (key == "gamma") f.gamma = detail::rational_field(v, key);
    else if (key == "frac_gg") f.frac_gg = detail::rational_field(v, key);
    else if (key == "frac_aa") f.frac_aa = detail::rational_field(v, key);
    else if (key == "frac_ga") f.frac_ga = detail::rational_field(v, key);
    else if (key == "frac_ag") f.frac_ag = detail::rational_field(v, key);
    else if (key == "simulation") {
      if (!v.is_object()) throw InputError("field 'simulation': expected an object");
      for (const auto& [k, s] : v.items()) {
        const std::string name = "simulation." + k;
        if (k == "trials") f.trials = detail::integer_field<int>(s, name, 1);
        else if (k == "seed") f.seed = detail::integer_field<std::uint64_t>(s, name, 0);
        else if (k == "antennas") f.antennas = detail::integer_field<int>(s, name, 2);
        else if (k == "threads") f.threads = detail::integer_field<unsigned>(s, name, 0);
        else if (k == "snr_db") {
          if (!s.is_string()) throw InputError("field '" + name + "': expected a string A:B:STEP");
          f.snr_db = s.get<std::string>();
        } else {
          throw InputError("unknown field '" + name + "'");
        }
      }
    } else {
      throw InputError("unknown field '" + key + "'");
    }
  }
  return f;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path);
  out << content;
  if (!out) throw InputError("cannot write " + path);
}

inline ConfigFields load_config_fields(const std::string& path) { return parse_config(read_text(path), path); }

/// Validated quality configuration from a file.
inline QualityConfig load_config(const std::string& path) { return load_config_fields(path).quality(); }

inline Json config_to_json(const QualityConfig& cfg) {
  return Json{{"alpha", cfg.alpha().str()},     {"gamma", cfg.gamma().str()},     {"frac_gg", cfg.frac_gg().str()},
              {"frac_aa", cfg.frac_aa().str()}, {"frac_ga", cfg.frac_ga().str()}, {"frac_ag", cfg.frac_ag().str()}};
}

inline std::string serialize_config(const QualityConfig& cfg) { return config_to_json(cfg).dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Documents

inline Json point_json(const DoFPoint& p) { return Json{{"d1", p.d1.str()}, {"d2", p.d2.str()}}; }

inline Json region_to_json(const QualityConfig& cfg, bool delayed) {
  const DoFRegion region = delayed ? region_with_delayed(cfg) : region_no_delayed(cfg);
  const Rational lb = lambda_bar(cfg);
  Json j;
  j["config"] = config_to_json(cfg);
  j["delayed_csit"] = delayed;
  j["status"] = delayed ? "optimal" : "achievable";
  j["lambda_bar"] = lb.str();
  j["lambda_bar_decimal"] = decimal12(lb.to_double());
  j["vertices"] = Json::array();
  for (const auto& v : region.vertices) j["vertices"].push_back(point_json(v));
  j["inequalities"] = Json::array();
  for (const auto& h : delayed ? delayed_region_inequalities(lb) : no_delayed_region_inequalities(lb))
    j["inequalities"].push_back(
        Json{{"d1_coef", h.d1_coef.str()}, {"d2_coef", h.d2_coef.str()}, {"bound", h.bound.str()}, {"text", h.str()}});
  return j;
}

inline Json symbol_json(const SymbolSpec& s) {
  return Json{{"id", s.id},
              {"owner", to_string(s.owner)},
              {"credit", to_string(s.credit)},
              {"beam", to_string(s.beam)},
              {"power_exponent", s.power_exponent.str()},
              {"prelog", s.prelog.str()}};
}

inline Json location_json(const Location& l) { return Json{{"phase", l.phase}, {"slot", l.slot}}; }

inline Json plan_to_json(const SchemePlan& p) {
  Json j;
  j["name"] = p.name;
  j["alpha"] = p.alpha.str();
  j["gamma"] = p.gamma.str();
  j["requires_delayed_csit"] = p.requires_delayed_csit;
  j["declared_only"] = p.declared_only;
  j["claimed_dof"] = point_json(p.claimed_dof);
  j["phases"] = Json::array();
  for (const auto& ph : p.phases) {
    Json slots = Json::array();
    for (const auto& slot : ph.slots) {
      Json syms = Json::array();
      for (const auto& s : slot) syms.push_back(symbol_json(s));
      slots.push_back(syms);
    }
    j["phases"].push_back(Json{{"duration", ph.duration}, {"csit_state", ph.csit_state.str()}, {"slots", slots}});
  }
  j["links"] = Json::array();
  for (const auto& l : p.links)
    j["links"].push_back(Json{{"source", l.source.id},
                              {"observer", static_cast<int>(l.source.observer)},
                              {"site", location_json(l.source.site)},
                              {"symbols", l.source.symbols},
                              {"quantization_prelog", l.quantization_prelog.str()},
                              {"carriers", l.carriers}});
  j["decode_programs"] = Json::object();
  for (User u : {User::one, User::two}) {
    Json prog = Json::array();
    for (const auto& st : p.program(u))
      prog.push_back(Json{{"kind", to_string(st.kind)},
                          {"site", location_json(st.site)},
                          {"targets", st.targets},
                          {"extra_observations", st.extra_observations}});
    j["decode_programs"]["user" + std::to_string(static_cast<int>(u))] = prog;
  }
  return j;
}

inline Json report_to_json(const ExponentReport& r) {
  Json j;
  j["scheme"] = r.scheme;
  j["ok"] = r.ok();
  j["total_slots"] = r.total_slots;
  j["dof"] = point_json(r.dof);
  j["sum_dof"] = r.dof.sum().str();
  j["failures"] = r.failures;
  j["verdicts"] = Json::array();
  for (const auto& v : r.verdicts)
    j["verdicts"].push_back(Json{{"user", static_cast<int>(v.user)},
                                 {"symbol", v.symbol},
                                 {"site", location_json(v.site)},
                                 {"kind", to_string(v.kind)},
                                 {"declared_prelog", v.declared.str()},
                                 {"supported_prelog", v.supported.str()},
                                 {"sinr_exponent", v.sinr_exponent.str()},
                                 {"supported", v.ok}});
  return j;
}

inline Json schedule_to_json(const Schedule& s) {
  Json j;
  j["name"] = s.name;
  j["n"] = s.n;
  j["entries"] = Json::array();
  for (const auto& e : s.entries)
    j["entries"].push_back(Json{{"component", e.component},
                                {"phase", e.phase},
                                {"state", e.state.str()},
                                {"slots", e.slots},
                                {"component_dof", point_json(e.component_dof)}});
  j["achieved"] = point_json(s.achieved);
  return j;
}

/// Fixed-format decimal so that output bytes depend only on the value.
inline std::string fixed12(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline std::string sim_csv(const SimResult& r) {
  std::string out = "snr_db,user,mean_rate,stderr\n";
  for (const auto& p : r.points)
    for (int u = 0; u < 2; ++u)
      out += fixed12(p.snr_db) + "," + std::to_string(u + 1) + "," + fixed12(p.rate.mean[static_cast<std::size_t>(u)]) + "," +
             fixed12(p.rate.stderr_[static_cast<std::size_t>(u)]) + "\n";
  return out;
}

inline Json sim_to_json(const SimResult& r, const std::optional<DoFPoint>& engine_dof) {
  Json j;
  j["scheme"] = r.scheme;
  j["trials"] = r.trials;
  j["seed"] = r.seed;
  j["antennas"] = r.antennas;
  j["snr_db"] = Json::array();
  for (const auto& p : r.points) j["snr_db"].push_back(fixed12(p.snr_db));
  Json users = Json::array();
  for (int u = 0; u < 2; ++u) {
    Json ju;
    ju["user"] = u + 1;
    if (r.fit) {
      const auto& f = (*r.fit)[static_cast<std::size_t>(u)];
      ju["fitted_slope"] = fixed12(f.slope);
      ju["intercept"] = fixed12(f.intercept);
      ju["rms_residual"] = fixed12(f.residual);
    } else {
      ju["fitted_slope"] = nullptr;
    }
    if (engine_dof) {
      const Rational& d = u == 0 ? engine_dof->d1 : engine_dof->d2;
      ju["engine_dof"] = d.str();
      ju["engine_dof_decimal"] = fixed12(d.to_double());
    }
    users.push_back(ju);
  }
  j["users"] = users;
  return j;
}

}  // namespace misobc
