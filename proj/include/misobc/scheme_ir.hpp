#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "misobc/core.hpp"

namespace misobc {

enum class User : int { one = 1, two = 2 };

inline User other(User u) { return u == User::one ? User::two : User::one; }
inline int index_of(User u) { return static_cast<int>(u) - 1; }

enum class Owner { user1, user2, common };

/// Which user's DoF a symbol's bits count toward. Carriers of quantized
/// side information count toward nobody.
enum class Credit { none, user1, user2 };

/// Beam role of a transmitted symbol. "perp" roles zero-force the estimate of
/// the named channel; "generic" is a random unit vector independent of all
/// channels and estimates.
enum class Beam { perp_g_hat, along_h_hat, perp_h_hat, along_g_hat, generic };

inline const char* to_string(Owner o) {
  switch (o) {
    case Owner::user1: return "user1";
    case Owner::user2: return "user2";
    case Owner::common: return "common";
  }
  return "?";
}
inline const char* to_string(Credit c) {
  switch (c) {
    case Credit::none: return "none";
    case Credit::user1: return "user1";
    case Credit::user2: return "user2";
  }
  return "?";
}
inline const char* to_string(Beam b) {
  switch (b) {
    case Beam::perp_g_hat: return "perp_g_hat";
    case Beam::along_h_hat: return "along_h_hat";
    case Beam::perp_h_hat: return "perp_h_hat";
    case Beam::along_g_hat: return "along_g_hat";
    case Beam::generic: return "generic";
  }
  return "?";
}

inline Credit credit_for(User u) { return u == User::one ? Credit::user1 : Credit::user2; }

/// One transmission of a symbol in one slot. A symbol sent in several slots
/// appears once per site with the same id, owner, credit and prelog.
struct SymbolSpec {
  std::string id;
  Owner owner = Owner::common;
  Credit credit = Credit::none;
  Beam beam = Beam::generic;
  Rational power_exponent;
  Rational prelog;

  friend bool operator==(const SymbolSpec&, const SymbolSpec&) = default;
};

/// 1-based (phase, slot-within-phase).
struct Location {
  int phase = 1;
  int slot = 1;

  friend bool operator==(const Location&, const Location&) = default;
  friend auto operator<=>(const Location&, const Location&) = default;

  [[nodiscard]] std::string str() const { return "(" + std::to_string(phase) + "," + std::to_string(slot) + ")"; }
};

struct Phase {
  int duration = 1;
  CsitState csit_state;
  std::vector<std::vector<SymbolSpec>> slots;  // one entry per slot, size == duration

  friend bool operator==(const Phase&, const Phase&) = default;
};

/// The interference seen by `observer` at `site`, made of the listed symbols.
struct InterferenceSource {
  std::string id;
  User observer = User::one;
  Location site;
  std::vector<std::string> symbols;

  friend bool operator==(const InterferenceSource&, const InterferenceSource&) = default;
};

struct QuantizeForwardLink {
  InterferenceSource source;
  Rational quantization_prelog;
  std::vector<std::string> carriers;

  friend bool operator==(const QuantizeForwardLink&, const QuantizeForwardLink&) = default;
};

enum class DecodeKind { treat_as_noise, remove_known, successive, joint_with_extra_observation };

inline const char* to_string(DecodeKind k) {
  switch (k) {
    case DecodeKind::treat_as_noise: return "treat_as_noise";
    case DecodeKind::remove_known: return "remove_known";
    case DecodeKind::successive: return "successive";
    case DecodeKind::joint_with_extra_observation: return "joint_with_extra_observation";
  }
  return "?";
}

/// One step of a user's decoding program.
///
///   treat_as_noise  each target decoded from the site observation, all other
///                   remaining terms treated as noise; nothing is removed.
///   successive      targets decoded in order, each subtracted once decoded.
///   remove_known    subtracts the listed decoded symbols, and the listed
///                   reconstructed interferences (extra_observations), from the
///                   site observation.
///   joint_with_extra_observation
///                   targets decoded jointly from the site observation plus one
///                   observation per listed reconstructed interference, then
///                   subtracted from the site observation.
struct DecodeStep {
  User user = User::one;
  DecodeKind kind = DecodeKind::successive;
  std::vector<std::string> targets;
  Location site;
  std::vector<std::string> extra_observations;

  friend bool operator==(const DecodeStep&, const DecodeStep&) = default;
};

struct SchemePlan {
  std::string name;
  Rational alpha;
  Rational gamma;
  bool requires_delayed_csit = false;
  bool declared_only = false;  // no symbol-level description (X4)
  std::vector<Phase> phases;
  std::vector<QuantizeForwardLink> links;
  std::array<std::vector<DecodeStep>, 2> decode_programs;
  DoFPoint claimed_dof;

  friend bool operator==(const SchemePlan&, const SchemePlan&) = default;

  [[nodiscard]] const std::vector<DecodeStep>& program(User u) const { return decode_programs[index_of(u)]; }

  [[nodiscard]] const Rational& exponent(Quality q) const { return q == Quality::alpha ? alpha : gamma; }

  [[nodiscard]] const Phase& phase(int p) const { return phases.at(static_cast<std::size_t>(p - 1)); }

  [[nodiscard]] const std::vector<SymbolSpec>& slot(const Location& l) const {
    return phase(l.phase).slots.at(static_cast<std::size_t>(l.slot - 1));
  }
};

/// Raised by builders for parameters outside a scheme's domain.
class SchemeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline int total_slots(const SchemePlan& plan) {
  int n = 0;
  for (const auto& ph : plan.phases) n += ph.duration;
  return n;
}

inline std::vector<Location> all_locations(const SchemePlan& plan) {
  std::vector<Location> out;
  for (std::size_t p = 0; p < plan.phases.size(); ++p)
    for (int t = 1; t <= plan.phases[p].duration; ++t) out.push_back({static_cast<int>(p) + 1, t});
  return out;
}

/// First transmission site of every symbol, keyed by id.
inline std::map<std::string, SymbolSpec> symbol_table(const SchemePlan& plan) {
  std::map<std::string, SymbolSpec> table;
  for (const auto& ph : plan.phases)
    for (const auto& slot : ph.slots)
      for (const auto& s : slot) table.emplace(s.id, s);
  return table;
}

inline const QuantizeForwardLink* find_link(const SchemePlan& plan, const std::string& interference_id) {
  for (const auto& l : plan.links)
    if (l.source.id == interference_id) return &l;
  return nullptr;
}

/// Sum of declared prelogs credited to each user, per slot. Repeated symbols
/// count once.
inline DoFPoint declared_dof(const SchemePlan& plan) {
  Rational d1, d2;
  for (const auto& [id, s] : symbol_table(plan)) {
    if (s.credit == Credit::user1) d1 += s.prelog;
    if (s.credit == Credit::user2) d2 += s.prelog;
  }
  const int n = total_slots(plan);
  if (n == 0) return plan.claimed_dof;
  return {d1 / Rational(n), d2 / Rational(n)};
}

// ---------------------------------------------------------------------------
// Durations

/// T2 / T1 for X1': (2 - gamma - alpha) / (3 (1 - gamma)).
inline Rational x1_duration_ratio(const Rational& alpha, const Rational& gamma) {
  if (gamma >= Rational(1)) throw SchemeError("duration singularity: X1' phase lengths need gamma < 1");
  return (Rational(2) - gamma - alpha) / (Rational(3) * (Rational(1) - gamma));
}

/// Smallest phase-1 length making the later phase lengths integral.
inline int minimal_t1(const Rational& alpha, const Rational& gamma) {
  return static_cast<int>(x1_duration_ratio(alpha, gamma).den());
}

/// Length of phases 2-4 given phase-1 length t1.
inline int x1_later_phase_length(const Rational& alpha, const Rational& gamma, int t1) {
  if (t1 < 1) throw SchemeError("non-integer duration: t1 must be a positive integer");
  Rational t2 = x1_duration_ratio(alpha, gamma) * Rational(t1);
  if (!t2.is_integer())
    throw SchemeError("non-integer duration: t1 = " + std::to_string(t1) + " gives T2 = " + t2.str() +
                      " (smallest valid t1 is " + std::to_string(minimal_t1(alpha, gamma)) + ")");
  return static_cast<int>(t2.num());
}

// ---------------------------------------------------------------------------
// Plan transforms

namespace detail {

inline std::string site_id(const std::string& base, int s, int t) {
  return base + "[" + std::to_string(s) + "," + std::to_string(t) + "]";
}

inline DecodeStep step(User u, DecodeKind k, Location site, std::vector<std::string> targets,
                       std::vector<std::string> extras = {}) {
  return DecodeStep{u, k, std::move(targets), site, std::move(extras)};
}

/// Removes zero-prelog symbols, zero-rate links and every reference to them.
inline void prune(SchemePlan& plan) {
  std::set<std::string> live;
  for (auto& ph : plan.phases)
    for (auto& slot : ph.slots) {
      std::erase_if(slot, [](const SymbolSpec& s) { return s.prelog.is_zero(); });
      for (const auto& s : slot) live.insert(s.id);
    }
  auto keep_live = [&](std::vector<std::string>& ids) { std::erase_if(ids, [&](const auto& id) { return !live.count(id); }); };

  std::set<std::string> live_links;
  for (auto& l : plan.links) {
    keep_live(l.source.symbols);
    keep_live(l.carriers);
  }
  std::erase_if(plan.links, [](const QuantizeForwardLink& l) {
    return l.quantization_prelog.is_zero() || l.source.symbols.empty() || l.carriers.empty();
  });
  for (const auto& l : plan.links) live_links.insert(l.source.id);

  for (auto& prog : plan.decode_programs) {
    for (auto& st : prog) {
      keep_live(st.targets);
      std::erase_if(st.extra_observations, [&](const auto& id) { return !live_links.count(id); });
    }
    std::erase_if(prog, [](const DecodeStep& st) {
      if (st.kind == DecodeKind::remove_known) return st.targets.empty() && st.extra_observations.empty();
      return st.targets.empty();
    });
  }
  plan.requires_delayed_csit = !plan.links.empty();
}

inline std::string mirror_id(const std::string& id) {
  if (id.empty()) return id;
  std::string out = id;
  if (out[0] == 'a') {
    out[0] = 'b';
  } else if (out[0] == 'b') {
    out[0] = 'a';
  } else if (out.rfind("i1", 0) == 0) {
    out[1] = '2';
  } else if (out.rfind("i2", 0) == 0) {
    out[1] = '1';
  }
  return out;
}

inline Beam mirror_beam(Beam b) {
  switch (b) {
    case Beam::perp_g_hat: return Beam::perp_h_hat;
    case Beam::perp_h_hat: return Beam::perp_g_hat;
    case Beam::along_h_hat: return Beam::along_g_hat;
    case Beam::along_g_hat: return Beam::along_h_hat;
    case Beam::generic: return Beam::generic;
  }
  return b;
}

inline Owner mirror_owner(Owner o) {
  if (o == Owner::user1) return Owner::user2;
  if (o == Owner::user2) return Owner::user1;
  return o;
}

inline Credit mirror_credit(Credit c) {
  if (c == Credit::user1) return Credit::user2;
  if (c == Credit::user2) return Credit::user1;
  return c;
}

}  // namespace detail

/// Swaps the roles of the two users: channels, beams, owners, credits, CSIT
/// states, interference observers and decoding programs. Symbol names swap
/// their a/b prefixes. Applying it twice returns the original plan (up to the
/// name, which the caller supplies).
inline SchemePlan mirror(const SchemePlan& plan, std::string name) {
  using detail::mirror_id;
  SchemePlan m = plan;
  m.name = std::move(name);
  m.claimed_dof = plan.claimed_dof.swapped();
  for (auto& ph : m.phases) {
    ph.csit_state = ph.csit_state.swapped();
    for (auto& slot : ph.slots)
      for (auto& s : slot) {
        s.id = mirror_id(s.id);
        s.owner = detail::mirror_owner(s.owner);
        s.credit = detail::mirror_credit(s.credit);
        s.beam = detail::mirror_beam(s.beam);
      }
  }
  auto remap = [&](std::vector<std::string>& ids) {
    for (auto& id : ids) id = mirror_id(id);
  };
  for (auto& l : m.links) {
    l.source.id = mirror_id(l.source.id);
    l.source.observer = other(l.source.observer);
    remap(l.source.symbols);
    remap(l.carriers);
  }
  std::swap(m.decode_programs[0], m.decode_programs[1]);
  for (auto& prog : m.decode_programs)
    for (auto& st : prog) {
      st.user = other(st.user);
      remap(st.targets);
      remap(st.extra_observations);
    }
  return m;
}

/// Strips everything that depends on delayed CSIT: quantize-forward links,
/// extra observations, and removal of reconstructed interference. Joint steps
/// are kept but see only the slot observation.
inline SchemePlan ablate_delayed(const SchemePlan& plan) {
  SchemePlan a = plan;
  a.name = plan.name + " (delayed CSIT ablated)";
  a.links.clear();
  a.requires_delayed_csit = false;
  for (auto& prog : a.decode_programs) {
    for (auto& st : prog) st.extra_observations.clear();
    std::erase_if(prog, [](const DecodeStep& st) { return st.kind == DecodeKind::remove_known && st.targets.empty(); });
  }
  return a;
}

// ---------------------------------------------------------------------------
// Builders

/// X1': four phases under the pattern (ag, ga, ag, ga); phase 1 sends fresh
/// private symbols, phases 2-4 carry the quantized phase-1 interference on
/// common symbols alongside new private symbols. Needs gamma < 1.
inline SchemePlan build_x1_prime(const Rational& alpha, const Rational& gamma, int t1) {
  if (alpha < Rational(0) || alpha > gamma) throw SchemeError("X1' needs 0 <= alpha <= gamma");
  const int t2 = x1_later_phase_length(alpha, gamma, t1);
  using detail::site_id;
  using detail::step;
  const Rational one(1);
  const Rational &a = alpha, &g = gamma;

  SchemePlan p;
  p.name = "X1'";
  p.alpha = alpha;
  p.gamma = gamma;
  p.requires_delayed_csit = true;

  auto priv = [](std::string id, User u, Beam b, Rational pow, Rational r) {
    Owner o = u == User::one ? Owner::user1 : Owner::user2;
    return SymbolSpec{std::move(id), o, credit_for(u), b, pow, r};
  };
  auto common = [](std::string id, Rational pow, Rational r) {
    return SymbolSpec{std::move(id), Owner::common, Credit::none, Beam::generic, pow, r};
  };

  Phase p1{t1, kStateAG, {}};
  for (int t = 1; t <= t1; ++t) {
    p1.slots.push_back({
        priv(site_id("a", 1, t), User::one, Beam::perp_g_hat, one, one),
        priv(site_id("a'", 1, t), User::one, Beam::along_h_hat, one - g, one - g),
        priv(site_id("b", 1, t), User::two, Beam::perp_h_hat, one, one),
        priv(site_id("b'", 1, t), User::two, Beam::along_g_hat, one - a, one - a),
    });
  }
  Phase p2{t2, kStateGA, {}};
  Phase p3{t2, kStateAG, {}};
  Phase p4{t2, kStateGA, {}};
  for (int t = 1; t <= t2; ++t) {
    p2.slots.push_back({
        common(site_id("c", 2, t), one, one - g),
        priv(site_id("a", 2, t), User::one, Beam::perp_g_hat, g, g - a),
        priv(site_id("a'", 2, t), User::one, Beam::perp_g_hat, a, a),
        priv(site_id("a''", 2, t), User::one, Beam::perp_h_hat, g - a, g - a),
        priv(site_id("b", 2, t), User::two, Beam::perp_h_hat, g, g),
    });
    const std::string cp = site_id("c'", 3, t);
    p3.slots.push_back({
        common(site_id("c", 3, t), one, one - g),
        priv(site_id("a", 3, t), User::one, Beam::perp_g_hat, g, g),
        SymbolSpec{cp, Owner::common, Credit::none, Beam::along_g_hat, g, g - a},
        priv(site_id("b", 3, t), User::two, Beam::perp_h_hat, a, a),
    });
    p4.slots.push_back({
        common(site_id("c", 4, t), one, one - g),
        priv(site_id("a", 4, t), User::one, Beam::perp_g_hat, a, a),
        SymbolSpec{cp, Owner::common, Credit::none, Beam::along_g_hat, g, g - a},
        priv(site_id("b", 4, t), User::two, Beam::perp_h_hat, g, g),
    });
  }
  p.phases = {p1, p2, p3, p4};

  // Phase-1 side information is spread over every phase-2..4 common symbol.
  std::vector<std::string> c_all;
  for (int s = 2; s <= 4; ++s)
    for (int t = 1; t <= t2; ++t) c_all.push_back(site_id("c", s, t));
  for (int t = 1; t <= t1; ++t) {
    p.links.push_back({{site_id("i1", 1, t), User::one, {1, t}, {site_id("b", 1, t), site_id("b'", 1, t)}}, one - a, c_all});
    p.links.push_back({{site_id("i2", 1, t), User::two, {1, t}, {site_id("a", 1, t), site_id("a'", 1, t)}}, one - g, c_all});
  }
  for (int t = 1; t <= t2; ++t) {
    p.links.push_back(
        {{site_id("i2", 2, t), User::two, {2, t}, {site_id("a", 2, t), site_id("a''", 2, t)}}, g - a, {site_id("c'", 3, t)}});
  }

  using K = DecodeKind;
  auto& u1 = p.decode_programs[0];
  auto& u2 = p.decode_programs[1];
  for (User u : {User::one, User::two}) {
    auto& prog = p.decode_programs[index_of(u)];
    for (int s = 2; s <= 4; ++s)
      for (int t = 1; t <= t2; ++t) prog.push_back(step(u, K::treat_as_noise, {s, t}, {site_id("c", s, t)}));
  }
  for (int t = 1; t <= t2; ++t) {
    u1.push_back(step(User::one, K::remove_known, {2, t}, {site_id("c", 2, t)}));
    u1.push_back(step(User::one, K::successive, {2, t}, {site_id("a", 2, t), site_id("a'", 2, t)}));
  }
  for (int t = 1; t <= t2; ++t) {
    u1.push_back(step(User::one, K::remove_known, {4, t}, {site_id("c", 4, t)}));
    u1.push_back(step(User::one, K::successive, {4, t}, {site_id("c'", 3, t), site_id("a", 4, t)}));
  }
  for (int t = 1; t <= t2; ++t) {
    u1.push_back(step(User::one, K::remove_known, {3, t}, {site_id("c", 3, t), site_id("c'", 3, t)}));
    u1.push_back(step(User::one, K::successive, {3, t}, {site_id("a", 3, t)}));
  }
  for (int t = 1; t <= t2; ++t)
    u1.push_back(step(User::one, K::joint_with_extra_observation, {2, t}, {site_id("a''", 2, t)}, {site_id("i2", 2, t)}));

  for (int t = 1; t <= t2; ++t) {
    u2.push_back(step(User::two, K::remove_known, {3, t}, {site_id("c", 3, t)}));
    u2.push_back(step(User::two, K::successive, {3, t}, {site_id("c'", 3, t), site_id("b", 3, t)}));
  }
  for (int t = 1; t <= t2; ++t) {
    u2.push_back(step(User::two, K::remove_known, {4, t}, {site_id("c'", 3, t), site_id("c", 4, t)}));
    u2.push_back(step(User::two, K::successive, {4, t}, {site_id("b", 4, t)}));
  }
  for (int t = 1; t <= t2; ++t) {
    u2.push_back(step(User::two, K::remove_known, {2, t}, {site_id("c", 2, t)}, {site_id("i2", 2, t)}));
    u2.push_back(step(User::two, K::successive, {2, t}, {site_id("b", 2, t)}));
  }

  for (int t = 1; t <= t1; ++t) {
    u1.push_back(step(User::one, K::remove_known, {1, t}, {}, {site_id("i1", 1, t)}));
    u1.push_back(step(User::one, K::joint_with_extra_observation, {1, t}, {site_id("a", 1, t), site_id("a'", 1, t)},
                      {site_id("i2", 1, t)}));
    u2.push_back(step(User::two, K::remove_known, {1, t}, {}, {site_id("i2", 1, t)}));
    u2.push_back(step(User::two, K::joint_with_extra_observation, {1, t}, {site_id("b", 1, t), site_id("b'", 1, t)},
                      {site_id("i1", 1, t)}));
  }

  detail::prune(p);

  const Rational T1(t1), T2(t2);
  const Rational slots = T1 + Rational(3) * T2;
  p.claimed_dof = {(T1 * (Rational(2) - g) + Rational(3) * g * T2) / slots,
                   (T1 * (Rational(2) - a) + T2 * (Rational(2) * g + a)) / slots};
  return p;
}

/// X1'': X1' with the a and b symbols interchanged, under (ga, ag, ga, ag).
inline SchemePlan build_x1_double_prime(const Rational& alpha, const Rational& gamma, int t1) {
  return mirror(build_x1_prime(alpha, gamma, t1), "X1''");
}

/// X2: two slots (ga then ag) without delayed CSIT; the common symbols are
/// credited to the favored user, reaching (1, (gamma+alpha)/2) or its mirror.
inline SchemePlan build_x2(const Rational& alpha, const Rational& gamma, User favored) {
  if (alpha < Rational(0) || alpha > gamma || gamma > Rational(1)) throw SchemeError("X2 needs 0 <= alpha <= gamma <= 1");
  if (favored == User::two) return mirror(build_x2(alpha, gamma, User::one), "X2(user2)");
  using detail::step;
  using K = DecodeKind;
  const Rational one(1);
  const Rational &a = alpha, &g = gamma;

  SchemePlan p;
  p.name = "X2(user1)";
  p.alpha = alpha;
  p.gamma = gamma;
  p.phases = {
      Phase{1, kStateGA,
            {{
                SymbolSpec{"c1", Owner::common, Credit::user1, Beam::generic, one, one - g},
                SymbolSpec{"a1", Owner::user1, Credit::user1, Beam::perp_g_hat, g, g - a},
                SymbolSpec{"a'1", Owner::user1, Credit::user1, Beam::perp_g_hat, a, a},
                SymbolSpec{"b1", Owner::user2, Credit::user2, Beam::perp_h_hat, g, g},
            }}},
      Phase{1, kStateAG,
            {{
                SymbolSpec{"c2", Owner::common, Credit::user1, Beam::generic, one, one - g},
                SymbolSpec{"a2", Owner::user1, Credit::user1, Beam::perp_g_hat, g, g},
                SymbolSpec{"a1", Owner::user1, Credit::user1, Beam::along_h_hat, g, g - a},
                SymbolSpec{"b2", Owner::user2, Credit::user2, Beam::perp_h_hat, a, a},
            }}},
  };
  const Location s1{1, 1}, s2{2, 1};
  p.decode_programs[0] = {
      step(User::one, K::treat_as_noise, s1, {"c1"}),
      step(User::one, K::treat_as_noise, s2, {"c2"}),
      step(User::one, K::remove_known, s1, {"c1"}),
      step(User::one, K::successive, s1, {"a1", "a'1"}),
      step(User::one, K::remove_known, s2, {"c2", "a1"}),
      step(User::one, K::successive, s2, {"a2"}),
  };
  p.decode_programs[1] = {
      step(User::two, K::treat_as_noise, s1, {"c1"}),
      step(User::two, K::treat_as_noise, s2, {"c2"}),
      step(User::two, K::remove_known, s2, {"c2"}),
      step(User::two, K::successive, s2, {"a1", "b2"}),
      step(User::two, K::remove_known, s1, {"c1", "a1"}),
      step(User::two, K::successive, s1, {"b1"}),
  };
  detail::prune(p);
  p.claimed_dof = {one, (g + a) / Rational(2)};
  return p;
}

/// X3: one slot with a single quality exponent q for both users (state gg, or
/// aa when `state_tag` is alpha); the common symbol goes to the favored user.
inline SchemePlan build_x3(const Rational& q, User favored, Quality state_tag = Quality::gamma) {
  if (q < Rational(0) || q > Rational(1)) throw SchemeError("X3 needs 0 <= q <= 1");
  if (favored == User::two) return mirror(build_x3(q, User::one, state_tag), "X3(user2)");
  using detail::step;
  using K = DecodeKind;
  const Rational one(1);
  SchemePlan p;
  p.name = "X3(user1)";
  p.alpha = q;
  p.gamma = q;
  const CsitState state{state_tag, state_tag};
  p.phases = {Phase{1, state,
                    {{
                        SymbolSpec{"c1", Owner::common, Credit::user1, Beam::generic, one, one - q},
                        SymbolSpec{"a1", Owner::user1, Credit::user1, Beam::perp_g_hat, q, q},
                        SymbolSpec{"b1", Owner::user2, Credit::user2, Beam::perp_h_hat, q, q},
                    }}}};
  p.decode_programs[0] = {step(User::one, K::successive, {1, 1}, {"c1", "a1"})};
  p.decode_programs[1] = {step(User::two, K::successive, {1, 1}, {"c1", "b1"})};
  detail::prune(p);
  p.claimed_dof = {one, q};
  return p;
}

/// X4 is carried only as a declared DoF point ((2+q)/3, (2+q)/3); it has no
/// symbol-level description and cannot be verified or simulated.
inline SchemePlan x4_stub(const Rational& q) {
  if (q < Rational(0) || q > Rational(1)) throw SchemeError("X4 needs 0 <= q <= 1");
  SchemePlan p;
  p.name = "X4";
  p.alpha = q;
  p.gamma = q;
  p.requires_delayed_csit = true;
  p.declared_only = true;
  Rational d = (Rational(2) + q) / Rational(3);
  p.claimed_dof = {d, d};
  return p;
}

// ---------------------------------------------------------------------------
// Structural checks

struct AccountingGroup {
  std::vector<std::string> carriers;
  std::vector<std::string> sources;
  Rational quantized_bits;  // x log P
  Rational carried_bits;    // x log P
};

/// Groups links by carrier set and totals the quantized and carried bits.
inline std::vector<AccountingGroup> bit_accounting(const SchemePlan& plan) {
  auto table = symbol_table(plan);
  std::vector<AccountingGroup> groups;
  for (const auto& l : plan.links) {
    auto carriers = l.carriers;
    std::sort(carriers.begin(), carriers.end());
    auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.carriers == carriers; });
    if (it == groups.end()) {
      AccountingGroup g;
      g.carriers = carriers;
      for (const auto& c : carriers) g.carried_bits += table.at(c).prelog;
      groups.push_back(std::move(g));
      it = groups.end() - 1;
    }
    it->sources.push_back(l.source.id);
    it->quantized_bits += l.quantization_prelog;
  }
  return groups;
}

/// Returns a description of every violated structural invariant; empty when
/// the plan is well formed.
inline std::vector<std::string> validate_plan(const SchemePlan& plan) {
  std::vector<std::string> problems;
  if (plan.declared_only) return problems;
  const Rational zero(0), one(1);
  std::map<std::string, SymbolSpec> seen;
  // Carriers of quantized interference may be beamformed (c' rides on g-hat).
  std::set<std::string> carriers;
  for (const auto& l : plan.links) carriers.insert(l.carriers.begin(), l.carriers.end());
  for (const auto& loc : all_locations(plan)) {
    const auto& slot = plan.slot(loc);
    if (slot.size() > 5) problems.push_back("slot " + loc.str() + " carries more than five symbols");
    for (const auto& s : slot) {
      if (s.prelog < zero || s.prelog > s.power_exponent || s.power_exponent > one)
        problems.push_back("symbol " + s.id + " violates 0 <= prelog <= power <= 1");
      if (s.owner == Owner::common && s.beam != Beam::generic && !carriers.count(s.id))
        problems.push_back("common symbol " + s.id + " must use a generic beam");
      auto [it, fresh] = seen.emplace(s.id, s);
      if (!fresh && (it->second.prelog != s.prelog || it->second.owner != s.owner || it->second.credit != s.credit))
        problems.push_back("repeated symbol " + s.id + " changes owner, credit or prelog");
    }
  }
  for (const auto& prog : plan.decode_programs)
    for (const auto& st : prog) {
      for (const auto& t : st.targets)
        if (!seen.count(t)) problems.push_back("decode step references unknown symbol " + t);
      for (const auto& x : st.extra_observations)
        if (!find_link(plan, x)) problems.push_back("decode step references unknown interference " + x);
    }
  for (const auto& g : bit_accounting(plan)) {
    if (g.carried_bits < g.quantized_bits)
      problems.push_back("carriers hold " + g.carried_bits.str() + " log P bits but " + g.quantized_bits.str() +
                         " log P bits are quantized");
  }
  if (plan.requires_delayed_csit != !plan.links.empty())
    problems.push_back("requires_delayed_csit does not match the presence of quantize-forward links");
  return problems;
}

}  // namespace misobc
