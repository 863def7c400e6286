#pragma once

// Executes a user's decoding program against an abstract observation backend.
//
// An observation is a row mapping column names (symbol ids, noise sources) to
// backend values. Two backends exist: exact power exponents (the verifier)
// and realized complex gains (the Monte Carlo simulator). Both supply
//
//   using Value, Scalar;
//   Row<Value> slot_row(User, Location) const;
//   Row<Value> interference_terms(const QuantizeForwardLink&) const;
//   std::pair<std::string, Value> quantization_noise(const QuantizeForwardLink&) const;
//   Scalar log_det(std::span<const Row<Value>* const>, const ColumnFilter&) const;
//   Scalar scaled(const Rational& prelog) const;   // rate carried by a prelog
//
// where log_det(rows, keep) is log det(C C^H) for the matrix C of the kept
// columns. Every row must own a noise column so the result is finite.

#include <functional>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "misobc/scheme_ir.hpp"

namespace misobc {

template <class Value>
using Row = std::map<std::string, Value>;

using ColumnFilter = std::function<bool(const std::string&)>;

/// A decoding program that references something not yet known to the user.
class ProgramError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

template <class Scalar>
struct DecodeOutcome {
  User user = User::one;
  std::size_t step = 0;
  DecodeKind kind = DecodeKind::successive;
  Location site;
  std::string symbol;
  Scalar declared{};   // backend-scaled prelog
  Scalar supported{};  // best rate for this target with the others at their declared rates
  Scalar alone{};      // rate with every other target of the step already known
};

/// Supported rate of each target when `targets` are decoded jointly from
/// `rows`, treating every other column as Gaussian noise.
///
/// With f(S) = I(x_S; y | x_{T\S}), target s is supported at
///   min over S containing s of  f(S) - sum_{j in S, j != s} declared_j,
/// which is the largest rate for s that keeps the declared vector inside the
/// multiple-access region. Returns (supported, alone) per target.
template <class Backend>
std::vector<std::pair<typename Backend::Scalar, typename Backend::Scalar>> joint_supported_rates(
    const Backend& be, std::span<const Row<typename Backend::Value>* const> rows,
    const std::vector<std::string>& targets, const std::vector<typename Backend::Scalar>& declared) {
  using Scalar = typename Backend::Scalar;
  const std::size_t k = targets.size();
  if (k > 16) throw ProgramError("joint decoding of more than 16 targets is not supported");
  const std::set<std::string> target_set(targets.begin(), targets.end());

  const Scalar base = be.log_det(rows, [&](const std::string& c) { return !target_set.count(c); });
  std::vector<Scalar> f(std::size_t{1} << k);
  for (std::size_t mask = 1; mask < f.size(); ++mask) {
    std::set<std::string> chosen;
    for (std::size_t i = 0; i < k; ++i)
      if (mask >> i & 1U) chosen.insert(targets[i]);
    f[mask] = be.log_det(rows, [&](const std::string& c) { return !target_set.count(c) || chosen.count(c); }) - base;
  }

  std::vector<std::pair<Scalar, Scalar>> out(k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t bit = std::size_t{1} << i;
    bool first = true;
    Scalar best{};
    for (std::size_t mask = 1; mask < f.size(); ++mask) {
      if (!(mask & bit)) continue;
      Scalar v = f[mask];
      for (std::size_t j = 0; j < k; ++j)
        if (j != i && (mask >> j & 1U)) v = v - declared[j];
      if (first || v < best) best = v;
      first = false;
    }
    out[i] = {best, f[bit]};
  }
  return out;
}

template <class Backend>
class ProgramRunner {
 public:
  using Value = typename Backend::Value;
  using Scalar = typename Backend::Scalar;
  using Outcome = DecodeOutcome<Scalar>;

  ProgramRunner(const SchemePlan& plan, const Backend& backend) : plan_(plan), be_(backend) {
    for (const auto& [id, s] : symbol_table(plan)) prelog_[id] = s.prelog;
  }

  std::vector<Outcome> run(User user) {
    user_ = user;
    rows_.clear();
    decoded_.clear();
    out_.clear();
    const auto& prog = plan_.program(user);
    for (std::size_t i = 0; i < prog.size(); ++i) execute(i, prog[i]);
    return out_;
  }

  [[nodiscard]] const std::set<std::string>& decoded() const { return decoded_; }

 private:
  const SchemePlan& plan_;
  const Backend& be_;
  User user_ = User::one;
  std::map<std::string, Rational> prelog_;
  std::map<Location, Row<Value>> rows_;
  std::set<std::string> decoded_;
  std::vector<Outcome> out_;

  Row<Value>& row_at(const Location& loc) {
    auto it = rows_.find(loc);
    if (it == rows_.end()) it = rows_.emplace(loc, be_.slot_row(user_, loc)).first;
    return it->second;
  }

  Scalar declared(const std::string& id) const {
    auto it = prelog_.find(id);
    if (it == prelog_.end()) throw ProgramError("decode program names unknown symbol " + id);
    return be_.scaled(it->second);
  }

  const QuantizeForwardLink& available_link(const std::string& id) const {
    const auto* link = find_link(plan_, id);
    if (!link) throw ProgramError("decode program names unknown interference " + id);
    for (const auto& c : link->carriers)
      if (!decoded_.count(c))
        throw ProgramError("user " + std::to_string(static_cast<int>(user_)) + " references interference " + id +
                           " before decoding its carrier " + c);
    return *link;
  }

  Row<Value> extra_row(const QuantizeForwardLink& link) const {
    Row<Value> r = be_.interference_terms(link);
    std::erase_if(r, [&](const auto& kv) { return decoded_.count(kv.first) > 0; });
    auto [name, v] = be_.quantization_noise(link);
    r.emplace(name, v);
    return r;
  }

  void decode_one(std::size_t i, const DecodeStep& st, Row<Value>& row, const std::string& target) {
    const Row<Value>* rows[] = {&row};
    std::vector<Scalar> decl{declared(target)};
    auto res = joint_supported_rates(be_, std::span<const Row<Value>* const>(rows), {target}, decl);
    out_.push_back({user_, i, st.kind, st.site, target, decl[0], res[0].first, res[0].second});
    decoded_.insert(target);
  }

  void execute(std::size_t i, const DecodeStep& st) {
    Row<Value>& row = row_at(st.site);
    switch (st.kind) {
      case DecodeKind::treat_as_noise:
        for (const auto& t : st.targets) decode_one(i, st, row, t);
        break;
      case DecodeKind::successive:
        for (const auto& t : st.targets) {
          decode_one(i, st, row, t);
          row.erase(t);
        }
        break;
      case DecodeKind::remove_known:
        for (const auto& t : st.targets) {
          if (!decoded_.count(t)) throw ProgramError("remove_known of undecoded symbol " + t + " at " + st.site.str());
          row.erase(t);
        }
        for (const auto& x : st.extra_observations) {
          const auto& link = available_link(x);
          if (link.source.observer != user_ || !(link.source.site == st.site))
            throw ProgramError("interference " + x + " can only be removed from its own observation");
          for (const auto& s : link.source.symbols) {
            if (!row.count(s)) throw ProgramError("interference " + x + " term " + s + " already removed");
            row.erase(s);
          }
          auto [name, v] = be_.quantization_noise(link);
          row[name] = v;
        }
        break;
      case DecodeKind::joint_with_extra_observation: {
        std::vector<Row<Value>> extras;
        extras.reserve(st.extra_observations.size());
        for (const auto& x : st.extra_observations) extras.push_back(extra_row(available_link(x)));
        std::vector<const Row<Value>*> rows{&row};
        for (const auto& e : extras) rows.push_back(&e);
        std::vector<Scalar> decl;
        for (const auto& t : st.targets) decl.push_back(declared(t));
        auto res = joint_supported_rates(be_, std::span<const Row<Value>* const>(rows), st.targets, decl);
        for (std::size_t k = 0; k < st.targets.size(); ++k) {
          out_.push_back({user_, i, st.kind, st.site, st.targets[k], decl[k], res[k].first, res[k].second});
          decoded_.insert(st.targets[k]);
        }
        for (const auto& t : st.targets) row.erase(t);
        break;
      }
    }
  }
};

}  // namespace misobc
