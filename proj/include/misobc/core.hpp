#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "misobc/rational.hpp"

namespace misobc {

/// Raised when a configuration violates one of its invariants. The message
/// always names the violated invariant.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Which of the two quality exponents a user's current CSIT has in a slot.
enum class Quality { alpha, gamma };

inline char tag(Quality q) { return q == Quality::alpha ? 'a' : 'g'; }

/// Joint current-CSIT state I1 I2 (user 1 quality, user 2 quality).
struct CsitState {
  Quality i1 = Quality::gamma;
  Quality i2 = Quality::gamma;

  friend bool operator==(const CsitState&, const CsitState&) = default;

  /// Two-letter form used in files: "ga" means I1 = gamma, I2 = alpha.
  [[nodiscard]] std::string str() const { return {tag(i1), tag(i2)}; }

  [[nodiscard]] CsitState swapped() const { return {i2, i1}; }

  static CsitState parse(const std::string& s) {
    auto one = [&](char c) {
      if (c == 'a') return Quality::alpha;
      if (c == 'g') return Quality::gamma;
      throw ConfigError("unknown CSIT state '" + s + "'");
    };
    if (s.size() != 2) throw ConfigError("unknown CSIT state '" + s + "'");
    return {one(s[0]), one(s[1])};
  }
};

inline constexpr CsitState kStateGG{Quality::gamma, Quality::gamma};
inline constexpr CsitState kStateAA{Quality::alpha, Quality::alpha};
inline constexpr CsitState kStateGA{Quality::gamma, Quality::alpha};
inline constexpr CsitState kStateAG{Quality::alpha, Quality::gamma};

/// Quality exponents and the fraction of time spent in each joint CSIT state.
/// Immutable once built; `make` is the only way to obtain one.
class QualityConfig {
 public:
  static QualityConfig make(Rational alpha, Rational gamma, Rational frac_gg, Rational frac_aa,
                            Rational frac_ga, Rational frac_ag) {
    const Rational zero(0), one(1);
    if (alpha < zero) throw ConfigError("invariant violated: 0 <= alpha (alpha = " + alpha.str() + ")");
    if (gamma > one) throw ConfigError("invariant violated: gamma <= 1 (gamma = " + gamma.str() + ")");
    if (alpha > gamma)
      throw ConfigError("invariant violated: alpha <= gamma (alpha = " + alpha.str() + ", gamma = " + gamma.str() + ")");
    const std::pair<const char*, Rational> fracs[] = {
        {"frac_gg", frac_gg}, {"frac_aa", frac_aa}, {"frac_ga", frac_ga}, {"frac_ag", frac_ag}};
    for (const auto& [name, f] : fracs) {
      if (f < zero || f > one)
        throw ConfigError(std::string("invariant violated: ") + name + " in [0, 1] (" + name + " = " + f.str() + ")");
    }
    Rational sum = frac_gg + frac_aa + frac_ga + frac_ag;
    if (sum != one) throw ConfigError("invariant violated: state fractions sum to 1 (sum = " + sum.str() + ")");
    QualityConfig c;
    c.alpha_ = alpha;
    c.gamma_ = gamma;
    c.frac_gg_ = frac_gg;
    c.frac_aa_ = frac_aa;
    c.frac_ga_ = frac_ga;
    c.frac_ag_ = frac_ag;
    return c;
  }

  /// Shorthand for the common lambda_ga = lambda_ag = 1/2 setting.
  static QualityConfig alternating(Rational alpha, Rational gamma) {
    return make(alpha, gamma, 0, 0, Rational(1, 2), Rational(1, 2));
  }

  [[nodiscard]] const Rational& alpha() const { return alpha_; }
  [[nodiscard]] const Rational& gamma() const { return gamma_; }
  [[nodiscard]] const Rational& frac_gg() const { return frac_gg_; }
  [[nodiscard]] const Rational& frac_aa() const { return frac_aa_; }
  [[nodiscard]] const Rational& frac_ga() const { return frac_ga_; }
  [[nodiscard]] const Rational& frac_ag() const { return frac_ag_; }

  [[nodiscard]] bool symmetric() const { return frac_ga_ == frac_ag_; }

  [[nodiscard]] const Rational& exponent(Quality q) const { return q == Quality::alpha ? alpha_ : gamma_; }

  [[nodiscard]] const Rational& fraction(CsitState s) const {
    if (s == kStateGG) return frac_gg_;
    if (s == kStateAA) return frac_aa_;
    if (s == kStateGA) return frac_ga_;
    return frac_ag_;
  }

  friend bool operator==(const QualityConfig&, const QualityConfig&) = default;

 private:
  QualityConfig() = default;
  Rational alpha_, gamma_, frac_gg_, frac_aa_, frac_ga_, frac_ag_;
};

/// Average current-CSIT quality: (l_ga + l_gg) gamma + (l_ag + l_aa) alpha.
inline Rational lambda_bar(const QualityConfig& cfg) {
  return (cfg.frac_ga() + cfg.frac_gg()) * cfg.gamma() + (cfg.frac_ag() + cfg.frac_aa()) * cfg.alpha();
}

struct DoFPoint {
  Rational d1;
  Rational d2;

  friend bool operator==(const DoFPoint&, const DoFPoint&) = default;

  [[nodiscard]] DoFPoint swapped() const { return {d2, d1}; }
  [[nodiscard]] Rational sum() const { return d1 + d2; }
  [[nodiscard]] std::string str() const { return "(" + d1.str() + ", " + d2.str() + ")"; }
};

/// Convex polygon of DoF tuples; vertices run counterclockwise from (0,0).
struct DoFRegion {
  std::vector<DoFPoint> vertices;

  friend bool operator==(const DoFRegion&, const DoFRegion&) = default;
};

}  // namespace misobc
