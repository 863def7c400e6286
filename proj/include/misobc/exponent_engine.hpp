#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "misobc/decode_walker.hpp"
#include "misobc/scheme_ir.hpp"

namespace misobc {

/// Who observes a received term.
enum class Observer { user1, user2, reconstructed };

struct TermExponent {
  std::string symbol;  // "noise" for the receiver noise term
  Observer observer = Observer::user1;
  Rational exponent;

  friend bool operator==(const TermExponent&, const TermExponent&) = default;
};

struct SymbolVerdict {
  User user = User::one;
  std::string symbol;
  Location site;
  DecodeKind kind = DecodeKind::successive;
  Rational declared;
  Rational supported;
  Rational sinr_exponent;  // gap with every other target of the step known
  bool ok = false;
};

struct ExponentReport {
  std::string scheme;
  int total_slots = 0;
  std::vector<SymbolVerdict> verdicts;
  DoFPoint dof;
  std::vector<std::string> failures;

  [[nodiscard]] bool ok() const { return failures.empty(); }
};

/// Received power exponent of one transmitted symbol at `user`: the symbol
/// power, lowered by the user's current quality exponent when the beam
/// zero-forces the estimate of that user's own channel.
inline Rational received_exponent(const SchemePlan& plan, const CsitState& state, User user, const SymbolSpec& s) {
  const bool leaks = (user == User::one && s.beam == Beam::perp_h_hat) || (user == User::two && s.beam == Beam::perp_g_hat);
  if (!leaks) return s.power_exponent;
  return s.power_exponent - plan.exponent(user == User::one ? state.i1 : state.i2);
}

/// Terms of the received signal of `user` in (phase, slot), plus the noise.
inline std::vector<TermExponent> expand_received(const SchemePlan& plan, User user, int phase, int slot) {
  if (plan.declared_only) throw SchemeError(plan.name + " has no symbol-level description");
  const auto& ph = plan.phase(phase);
  if (slot < 1 || slot > ph.duration) throw std::out_of_range("slot outside phase");
  const Observer obs = user == User::one ? Observer::user1 : Observer::user2;
  std::vector<TermExponent> out;
  for (const auto& s : plan.slot({phase, slot})) out.push_back({s.id, obs, received_exponent(plan, ph.csit_state, user, s)});
  out.push_back({"noise", obs, Rational(0)});
  return out;
}

/// Exponent of det(C C^H) for a matrix whose entries have power exponents:
/// for generic coefficients this is the best total exponent over assignments
/// of rows to distinct columns (a maximum-weight matching).
inline std::optional<Rational> tropical_log_det(std::span<const Row<Rational>* const> rows, const ColumnFilter& keep) {
  const std::size_t r = rows.size();
  const std::size_t full = (std::size_t{1} << r) - 1;
  std::set<std::string> columns;
  for (const auto* row : rows)
    for (const auto& [c, _] : *row)
      if (keep(c)) columns.insert(c);

  std::vector<std::optional<Rational>> best(full + 1);
  best[0] = Rational(0);
  for (const auto& c : columns) {
    auto next = best;
    for (std::size_t mask = 0; mask <= full; ++mask) {
      if (!best[mask]) continue;
      for (std::size_t i = 0; i < r; ++i) {
        if (mask >> i & 1U) continue;
        auto it = rows[i]->find(c);
        if (it == rows[i]->end()) continue;
        Rational v = *best[mask] + it->second;
        auto& slot = next[mask | (std::size_t{1} << i)];
        if (!slot || *slot < v) slot = v;
      }
    }
    best = std::move(next);
  }
  return best[full];
}

/// Backend for the walker working in exact power exponents.
class ExponentBackend {
 public:
  using Value = Rational;
  using Scalar = Rational;

  explicit ExponentBackend(const SchemePlan& plan) : plan_(plan) {}

  [[nodiscard]] Row<Rational> slot_row(User u, const Location& loc) const {
    Row<Rational> row;
    const auto& state = plan_.phase(loc.phase).csit_state;
    for (const auto& s : plan_.slot(loc)) row[s.id] = received_exponent(plan_, state, u, s);
    row[noise_name(u, loc)] = Rational(0);
    return row;
  }

  [[nodiscard]] Row<Rational> interference_terms(const QuantizeForwardLink& link) const {
    Row<Rational> full = slot_row(link.source.observer, link.source.site);
    Row<Rational> out;
    for (const auto& s : link.source.symbols) {
      auto it = full.find(s);
      if (it != full.end()) out.insert(*it);
    }
    return out;
  }

  /// A quantized interference of exponent e at prelog phi differs from the
  /// true interference by distortion of exponent e - phi.
  [[nodiscard]] std::pair<std::string, Rational> quantization_noise(const QuantizeForwardLink& link) const {
    auto terms = interference_terms(link);
    if (terms.empty()) throw ProgramError("interference " + link.source.id + " has no terms");
    Rational e = terms.begin()->second;
    for (const auto& [_, x] : terms) e = std::max(e, x);
    return {"q:" + link.source.id, e - link.quantization_prelog};
  }

  [[nodiscard]] Rational log_det(std::span<const Row<Rational>* const> rows, const ColumnFilter& keep) const {
    auto v = tropical_log_det(rows, keep);
    if (!v) throw ProgramError("observation without a noise term");
    return *v;
  }

  [[nodiscard]] Rational scaled(const Rational& prelog) const { return prelog; }

  static std::string noise_name(User u, const Location& loc) {
    return "z:" + std::to_string(static_cast<int>(u)) + "@" + loc.str();
  }

 private:
  const SchemePlan& plan_;
};

/// Standalone joint decoding in exponent arithmetic. Each observation is a
/// list of (name, exponent) terms and must include its own noise term.
/// Returns the supported prelog of each target.
inline std::vector<Rational> joint_elimination(const std::vector<std::vector<std::pair<std::string, Rational>>>& observations,
                                               const std::vector<std::pair<std::string, Rational>>& targets) {
  std::vector<Row<Rational>> rows;
  for (const auto& obs : observations) rows.emplace_back(obs.begin(), obs.end());
  std::vector<const Row<Rational>*> ptrs;
  for (const auto& r : rows) ptrs.push_back(&r);
  std::vector<std::string> names;
  std::vector<Rational> declared;
  for (const auto& [n, d] : targets) {
    names.push_back(n);
    declared.push_back(d);
  }
  SchemePlan dummy;
  ExponentBackend be(dummy);
  auto res = joint_supported_rates(be, std::span<const Row<Rational>* const>(ptrs), names, declared);
  std::vector<Rational> out;
  for (const auto& [supported, _] : res) out.push_back(supported);
  return out;
}

/// Runs both users' programs in exponent arithmetic and certifies every
/// decoded symbol. Unsupported rates become failures; malformed programs
/// throw ProgramError.
inline ExponentReport run_decode_program(const SchemePlan& plan) {
  if (plan.declared_only)
    throw SchemeError(plan.name + " is a declared-DoF component without a symbol-level description; it cannot be verified");
  ExponentReport rep;
  rep.scheme = plan.name;
  rep.total_slots = total_slots(plan);
  ExponentBackend be(plan);
  ProgramRunner<ExponentBackend> runner(plan, be);
  std::map<std::string, std::vector<const SymbolVerdict*>> by_symbol;
  for (User u : {User::one, User::two}) {
    for (const auto& o : runner.run(u)) {
      rep.verdicts.push_back({o.user, o.symbol, o.site, o.kind, o.declared, o.supported, o.alone, o.supported >= o.declared});
    }
  }
  for (const auto& v : rep.verdicts) {
    by_symbol[v.symbol].push_back(&v);
    if (!v.ok)
      rep.failures.push_back("user " + std::to_string(static_cast<int>(v.user)) + ": " + v.symbol + " at " + v.site.str() +
                             " supports " + v.supported.str() + " < declared " + v.declared.str());
  }

  Rational d[2];
  for (const auto& [id, s] : symbol_table(plan)) {
    if (s.credit == Credit::none) continue;
    const User u = s.credit == Credit::user1 ? User::one : User::two;
    const auto it = by_symbol.find(id);
    bool credited_user_decodes = false;
    Rational rate = s.prelog;
    if (it != by_symbol.end()) {
      for (const auto* v : it->second) {
        if (v->user == u) credited_user_decodes = true;
        rate = std::min(rate, std::max(Rational(0), v->supported));
      }
    }
    if (!credited_user_decodes) {
      rep.failures.push_back("user " + std::to_string(static_cast<int>(u)) + " never decodes its symbol " + id);
      rate = 0;
    }
    d[index_of(u)] += rate;
  }
  const Rational n(rep.total_slots);
  rep.dof = {d[0] / n, d[1] / n};
  return rep;
}

}  // namespace misobc
