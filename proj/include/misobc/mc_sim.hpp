#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "misobc/decode_walker.hpp"
#include "misobc/scheme_ir.hpp"

namespace misobc {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

// ---------------------------------------------------------------------------
// Random numbers

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of trial `trial` under master seed `seed`. Trials are independent of
/// each other and of the order in which they are run.
inline std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) {
  return splitmix64(splitmix64(seed) ^ splitmix64(trial + 0x632be59bd9b4e019ULL));
}

/// mt19937_64 with fixed-formula uniform and Gaussian draws, so that streams
/// are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  /// Circularly symmetric complex Gaussian with E|z|^2 = 1.
  cplx complex_normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(t), r * std::sin(t)};
  }

  CVec complex_normal_vec(int m, double variance) {
    CVec v(static_cast<std::size_t>(m));
    const double s = std::sqrt(variance);
    for (auto& x : v) x = s * complex_normal();
    return v;
  }

 private:
  std::mt19937_64 eng_;
};

// ---------------------------------------------------------------------------
// Channels and beams

inline cplx dot_t(const CVec& a, const CVec& b) {
  cplx s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const CVec& a) {
  double s = 0;
  for (const auto& x : a) s += std::norm(x);
  return s;
}

/// One slot's channels to user 1 (h) and user 2 (g) with their current
/// estimates and estimation errors.
struct ChannelDraw {
  CVec h, g;
  CVec h_hat, g_hat;
  CVec h_err, g_err;
};

/// Estimate-first draw: per entry, the estimate has variance 1 - P^-I / M and
/// the independent error has variance P^-I / M, so the channel has unit
/// variance entries and E||error||^2 = P^-I.
inline ChannelDraw draw_channel(double i1, double i2, double P, int m, Rng& rng) {
  if (!(P > 0)) throw std::invalid_argument("draw_channel needs P > 0");
  if (m < 2) throw std::invalid_argument("draw_channel needs at least two transmit antennas");
  const double e1 = std::pow(P, -i1) / m;
  const double e2 = std::pow(P, -i2) / m;
  ChannelDraw d;
  d.h_hat = rng.complex_normal_vec(m, 1.0 - e1);
  d.h_err = rng.complex_normal_vec(m, e1);
  d.g_hat = rng.complex_normal_vec(m, 1.0 - e2);
  d.g_err = rng.complex_normal_vec(m, e2);
  d.h.resize(static_cast<std::size_t>(m));
  d.g.resize(static_cast<std::size_t>(m));
  for (std::size_t i = 0; i < d.h.size(); ++i) {
    d.h[i] = d.h_hat[i] + d.h_err[i];
    d.g[i] = d.g_hat[i] + d.g_err[i];
  }
  return d;
}

inline ChannelDraw draw_channel(const SchemePlan& plan, const CsitState& state, double P, int m, Rng& rng) {
  return draw_channel(plan.exponent(state.i1).to_double(), plan.exponent(state.i2).to_double(), P, m, rng);
}

/// Unit vector v with est^T v = 0.
inline CVec perp_beam(const CVec& est, Rng& rng) {
  CVec v(est.size());
  if (est.size() == 2) {
    v[0] = -est[1];
    v[1] = est[0];
  } else {
    const double n = std::sqrt(norm2(est));
    CVec u(est.size());
    for (std::size_t i = 0; i < est.size(); ++i) u[i] = std::conj(est[i]) / n;
    CVec r = rng.complex_normal_vec(static_cast<int>(est.size()), 1.0);
    cplx proj{};
    for (std::size_t i = 0; i < est.size(); ++i) proj += std::conj(u[i]) * r[i];
    for (std::size_t i = 0; i < est.size(); ++i) v[i] = r[i] - u[i] * proj;
  }
  const double n = std::sqrt(norm2(v));
  for (auto& x : v) x /= n;
  return v;
}

/// Unit vector along the conjugate of est (maximizes |est^T v|).
inline CVec along_beam(const CVec& est) {
  const double n = std::sqrt(norm2(est));
  CVec v(est.size());
  for (std::size_t i = 0; i < est.size(); ++i) v[i] = std::conj(est[i]) / n;
  return v;
}

inline CVec generic_beam(int m, Rng& rng) {
  CVec v = rng.complex_normal_vec(m, 1.0);
  const double n = std::sqrt(norm2(v));
  for (auto& x : v) x /= n;
  return v;
}

/// A realized slot: channels, one beam and amplitude per symbol.
struct SlotRealization {
  ChannelDraw channel;
  std::vector<CVec> beams;
  std::vector<double> amplitudes;
};

/// Symbol amplitudes: power P^e each, scaled down together when the nominal
/// total exceeds P.
inline std::vector<double> slot_amplitudes(const std::vector<SymbolSpec>& slot, double P) {
  double total = 0;
  for (const auto& s : slot) total += std::pow(P, s.power_exponent.to_double());
  const double scale = total > P ? P / total : 1.0;
  std::vector<double> a;
  for (const auto& s : slot) a.push_back(std::sqrt(std::pow(P, s.power_exponent.to_double()) * scale));
  return a;
}

inline SlotRealization realize_slot(const SchemePlan& plan, const Location& loc, double P, int m, Rng& rng) {
  SlotRealization r;
  const auto& slot = plan.slot(loc);
  r.channel = draw_channel(plan, plan.phase(loc.phase).csit_state, P, m, rng);
  for (const auto& s : slot) {
    switch (s.beam) {
      case Beam::perp_g_hat: r.beams.push_back(perp_beam(r.channel.g_hat, rng)); break;
      case Beam::perp_h_hat: r.beams.push_back(perp_beam(r.channel.h_hat, rng)); break;
      case Beam::along_h_hat: r.beams.push_back(along_beam(r.channel.h_hat)); break;
      case Beam::along_g_hat: r.beams.push_back(along_beam(r.channel.g_hat)); break;
      case Beam::generic: r.beams.push_back(generic_beam(m, rng)); break;
    }
  }
  r.amplitudes = slot_amplitudes(slot, P);
  return r;
}

/// Effective gain of symbol k of the slot at `user`. The part through the
/// user's own estimate is exactly zero for a beam that zero-forces it.
inline cplx effective_gain(const SchemePlan& plan, const Location& loc, const SlotRealization& r, User user, std::size_t k) {
  const auto& s = plan.slot(loc)[k];
  const bool u1 = user == User::one;
  const CVec& est = u1 ? r.channel.h_hat : r.channel.g_hat;
  const CVec& err = u1 ? r.channel.h_err : r.channel.g_err;
  const bool zf = (u1 && s.beam == Beam::perp_h_hat) || (!u1 && s.beam == Beam::perp_g_hat);
  cplx c = dot_t(err, r.beams[k]);
  if (!zf) c += dot_t(est, r.beams[k]);
  return r.amplitudes[k] * c;
}

// ---------------------------------------------------------------------------
// Walker backend

namespace detail {

using lcplx = std::complex<long double>;

inline lcplx small_det(std::vector<std::vector<lcplx>> a) {
  const std::size_t n = a.size();
  lcplx det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (a[piv][c] == lcplx{}) return 0;
    if (piv != c) {
      std::swap(a[piv], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const lcplx f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  return det;
}

}  // namespace detail

/// log2 det(C C^H) by the Cauchy-Binet expansion over column subsets, which
/// stays accurate when rows differ in scale by many orders of magnitude.
inline double log2_gram_det(std::span<const Row<cplx>* const> rows, const ColumnFilter& keep) {
  using detail::lcplx;
  std::vector<std::string> cols;
  for (const auto* row : rows)
    for (const auto& [c, _] : *row)
      if (keep(c) && std::find(cols.begin(), cols.end(), c) == cols.end()) cols.push_back(c);
  std::sort(cols.begin(), cols.end());
  const std::size_t r = rows.size(), n = cols.size();
  if (n < r) return -std::numeric_limits<double>::infinity();
  std::vector<std::vector<lcplx>> full(r, std::vector<lcplx>(n));
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      auto it = rows[i]->find(cols[j]);
      if (it != rows[i]->end()) full[i][j] = lcplx(it->second.real(), it->second.imag());
    }
  long double sum = 0;
  std::vector<std::size_t> pick(r);
  for (std::size_t i = 0; i < r; ++i) pick[i] = i;
  while (true) {
    std::vector<std::vector<lcplx>> minor(r, std::vector<lcplx>(r));
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < r; ++j) minor[i][j] = full[i][pick[j]];
    sum += std::norm(detail::small_det(std::move(minor)));
    std::size_t k = r;
    while (k > 0 && pick[k - 1] == n - r + k - 1) --k;
    if (k == 0) break;
    ++pick[k - 1];
    for (std::size_t j = k; j < r; ++j) pick[j] = pick[j - 1] + 1;
  }
  return static_cast<double>(std::log2(sum));
}

/// Backend for the walker over one trial's channel realizations. Rates are in
/// bits per channel use.
class McBackend {
 public:
  using Value = cplx;
  using Scalar = double;

  McBackend(const SchemePlan& plan, double P, int m, Rng& rng) : plan_(plan), P_(P), log2p_(std::log2(P)) {
    for (const auto& loc : all_locations(plan)) slots_.emplace(loc, realize_slot(plan, loc, P, m, rng));
  }

  [[nodiscard]] Row<cplx> slot_row(User u, const Location& loc) const {
    Row<cplx> row;
    const auto& r = slots_.at(loc);
    const auto& slot = plan_.slot(loc);
    for (std::size_t k = 0; k < slot.size(); ++k) row[slot[k].id] = effective_gain(plan_, loc, r, u, k);
    row["z:" + std::to_string(static_cast<int>(u)) + "@" + loc.str()] = 1.0;
    return row;
  }

  [[nodiscard]] Row<cplx> interference_terms(const QuantizeForwardLink& link) const {
    Row<cplx> full = slot_row(link.source.observer, link.source.site);
    Row<cplx> out;
    for (const auto& s : link.source.symbols) {
      auto it = full.find(s);
      if (it != full.end()) out.insert(*it);
    }
    return out;
  }

  /// Rate-distortion test channel: distortion power is the interference power
  /// times 2^-(phi log2 P).
  [[nodiscard]] std::pair<std::string, cplx> quantization_noise(const QuantizeForwardLink& link) const {
    return {"q:" + link.source.id, std::sqrt(distortion_power(link))};
  }

  [[nodiscard]] double distortion_power(const QuantizeForwardLink& link) const {
    double power = 0;
    for (const auto& [_, c] : interference_terms(link)) power += std::norm(c);
    return power * std::pow(P_, -link.quantization_prelog.to_double());
  }

  [[nodiscard]] double log_det(std::span<const Row<cplx>* const> rows, const ColumnFilter& keep) const {
    return log2_gram_det(rows, keep);
  }

  [[nodiscard]] double scaled(const Rational& prelog) const { return prelog.to_double() * log2p_; }

  [[nodiscard]] const SlotRealization& realization(const Location& loc) const { return slots_.at(loc); }

 private:
  const SchemePlan& plan_;
  double P_;
  double log2p_;
  std::map<Location, SlotRealization> slots_;
};

// ---------------------------------------------------------------------------
// Simulation

struct SimOptions {
  int trials = 200;
  std::uint64_t seed = 1;
  int antennas = 2;
  unsigned threads = 0;  // 0: hardware concurrency
};

inline void check_simulatable(const SchemePlan& plan, int trials) {
  if (plan.declared_only)
    throw SchemeError(plan.name + " is a declared-DoF component without a symbol-level description; it cannot be simulated");
  if (trials < 1) throw std::invalid_argument("trials must be at least 1 (got " + std::to_string(trials) + ")");
}

/// Per-user rate in bits per slot for one trial.
inline std::array<double, 2> simulate_trial(const SchemePlan& plan, double P, int antennas, std::uint64_t seed) {
  Rng rng(seed);
  McBackend be(plan, P, antennas, rng);
  ProgramRunner<McBackend> runner(plan, be);
  std::map<std::string, std::vector<std::pair<User, double>>> events;
  for (User u : {User::one, User::two})
    for (const auto& o : runner.run(u)) events[o.symbol].emplace_back(u, o.supported);

  std::array<double, 2> rate{0, 0};
  for (const auto& [id, s] : symbol_table(plan)) {
    if (s.credit == Credit::none) continue;
    const User u = s.credit == Credit::user1 ? User::one : User::two;
    double r = be.scaled(s.prelog);
    bool decoded = false;
    if (auto it = events.find(id); it != events.end())
      for (const auto& [who, supported] : it->second) {
        decoded = decoded || who == u;
        r = std::min(r, supported);
      }
    rate[index_of(u)] += decoded ? std::max(0.0, r) : 0.0;
  }
  const double n = total_slots(plan);
  return {rate[0] / n, rate[1] / n};
}

/// Runs fn(trial) for every trial across worker threads and returns the
/// results in trial order.
template <class Fn>
auto parallel_trials(int trials, unsigned threads, Fn fn) {
  using R = decltype(fn(0));
  std::vector<R> out(static_cast<std::size_t>(trials));
  unsigned workers = threads ? threads : std::max(1U, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(trials));
  if (workers <= 1) {
    for (int t = 0; t < trials; ++t) out[static_cast<std::size_t>(t)] = fn(t);
    return out;
  }
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mu;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int t = static_cast<int>(w); t < trials; t += static_cast<int>(workers)) out[static_cast<std::size_t>(t)] = fn(t);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
  return out;
}

struct RateEstimate {
  std::array<double, 2> mean{0, 0};
  std::array<double, 2> stderr_{0, 0};
};

inline RateEstimate summarize(const std::vector<std::array<double, 2>>& samples) {
  RateEstimate est;
  const double n = static_cast<double>(samples.size());
  for (int u = 0; u < 2; ++u) {
    double sum = 0;
    for (const auto& s : samples) sum += s[static_cast<std::size_t>(u)];
    const double mean = sum / n;
    double ss = 0;
    for (const auto& s : samples) ss += (s[static_cast<std::size_t>(u)] - mean) * (s[static_cast<std::size_t>(u)] - mean);
    est.mean[static_cast<std::size_t>(u)] = mean;
    est.stderr_[static_cast<std::size_t>(u)] = samples.size() > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
  }
  return est;
}

/// Trial-averaged per-user rate (bits per slot) at linear SNR P.
inline RateEstimate simulate_scheme(const SchemePlan& plan, double P, const SimOptions& opt) {
  check_simulatable(plan, opt.trials);
  if (!(P > 0)) throw std::invalid_argument("P must be positive");
  return summarize(parallel_trials(opt.trials, opt.threads, [&](int t) {
    return simulate_trial(plan, P, opt.antennas, trial_seed(opt.seed, static_cast<std::uint64_t>(t)));
  }));
}

struct FitResult {
  double slope = 0;
  double intercept = 0;
  double residual = 0;  // root-mean-square residual
};

/// Least-squares line through (log2 P, rate) points. Needs at least three
/// points spanning at least 40 dB.
inline FitResult fit_dof(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw std::invalid_argument("degenerate ladder: a fit needs at least 3 points");
  double lo = points.front().first, hi = lo;
  for (const auto& [x, _] : points) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  const double span_db = (hi - lo) * 10.0 * std::log10(2.0);
  if (span_db < 40.0 - 1e-9)
    throw std::invalid_argument("degenerate ladder: points span " + std::to_string(span_db) + " dB, at least 40 dB needed");
  const double n = static_cast<double>(points.size());
  double mx = 0, my = 0;
  for (const auto& [x, y] : points) {
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (const auto& [x, y] : points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  FitResult f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0;
  for (const auto& [x, y] : points) {
    const double e = y - (f.intercept + f.slope * x);
    rss += e * e;
  }
  f.residual = std::sqrt(rss / n);
  return f;
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

struct SimPoint {
  double snr_db = 0;
  RateEstimate rate;
};

struct SimResult {
  std::string scheme;
  std::vector<SimPoint> points;
  std::optional<std::array<FitResult, 2>> fit;  // absent when the ladder is too short
  int trials = 0;
  std::uint64_t seed = 0;
  int antennas = 2;
};

/// Sweeps the SNR ladder. Every ladder point reuses the same per-trial seeds.
inline SimResult simulate_ladder(const SchemePlan& plan, const std::vector<double>& snr_db, const SimOptions& opt) {
  check_simulatable(plan, opt.trials);
  if (snr_db.empty()) throw std::invalid_argument("empty SNR ladder");
  SimResult res;
  res.scheme = plan.name;
  res.trials = opt.trials;
  res.seed = opt.seed;
  res.antennas = opt.antennas;
  for (double db : snr_db) res.points.push_back({db, simulate_scheme(plan, db_to_linear(db), opt)});
  std::vector<std::pair<double, double>> pts[2];
  for (const auto& p : res.points)
    for (int u = 0; u < 2; ++u) pts[u].emplace_back(std::log2(db_to_linear(p.snr_db)), p.rate.mean[static_cast<std::size_t>(u)]);
  try {
    res.fit = std::array<FitResult, 2>{fit_dof(pts[0]), fit_dof(pts[1])};
  } catch (const std::invalid_argument&) {
    res.fit.reset();
  }
  return res;
}

/// Parses "A:B:STEP" (dB) into the ladder A, A+STEP, ..., B.
inline std::vector<double> parse_ladder(const std::string& text) {
  auto c1 = text.find(':');
  auto c2 = c1 == std::string::npos ? c1 : text.find(':', c1 + 1);
  if (c2 == std::string::npos) throw std::invalid_argument("SNR ladder must look like A:B:STEP (got '" + text + "')");
  double a = 0, b = 0, step = 0;
  try {
    std::size_t used = 0;
    a = std::stod(text.substr(0, c1), &used);
    b = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    step = std::stod(text.substr(c2 + 1));
  } catch (const std::exception&) {
    throw std::invalid_argument("SNR ladder must look like A:B:STEP (got '" + text + "')");
  }
  if (!(step > 0) || b < a) throw std::invalid_argument("SNR ladder needs STEP > 0 and A <= B (got '" + text + "')");
  std::vector<double> out;
  for (int k = 0;; ++k) {
    const double v = a + k * step;
    if (v > b + 1e-9 * std::max(1.0, std::abs(b))) break;
    out.push_back(v);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sample checks

/// Largest ratio of sample-mean ||x||^2 to P over the plan's slots, with
/// unit-power Gaussian symbols.
inline double max_power_ratio(const SchemePlan& plan, double P, int samples, std::uint64_t seed, int antennas = 2) {
  check_simulatable(plan, samples);
  Rng rng(seed);
  double worst = 0;
  for (const auto& loc : all_locations(plan)) {
    const auto r = realize_slot(plan, loc, P, antennas, rng);
    double sum = 0;
    for (int n = 0; n < samples; ++n) {
      CVec x(static_cast<std::size_t>(antennas));
      for (std::size_t k = 0; k < r.beams.size(); ++k) {
        const cplx s = rng.complex_normal();
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += r.amplitudes[k] * r.beams[k][i] * s;
      }
      sum += norm2(x);
    }
    worst = std::max(worst, sum / samples / P);
  }
  return worst;
}

/// Mean power left after subtracting the reconstructed interference `link_id`
/// from its observer's signal, at linear SNR P.
inline double residual_interference_power(const SchemePlan& plan, const std::string& link_id, double P, int trials,
                                          std::uint64_t seed, int antennas = 2) {
  check_simulatable(plan, trials);
  const auto* link = find_link(plan, link_id);
  if (!link) throw std::invalid_argument("unknown interference " + link_id);
  double sum = 0;
  for (int t = 0; t < trials; ++t) {
    Rng rng(trial_seed(seed, static_cast<std::uint64_t>(t)));
    McBackend be(plan, P, antennas, rng);
    sum += be.distortion_power(*link);
  }
  return sum / trials;
}

/// Mean received power of the interference `link_id` before removal.
inline double interference_power(const SchemePlan& plan, const std::string& link_id, double P, int trials, std::uint64_t seed,
                                 int antennas = 2) {
  check_simulatable(plan, trials);
  const auto* link = find_link(plan, link_id);
  if (!link) throw std::invalid_argument("unknown interference " + link_id);
  double sum = 0;
  for (int t = 0; t < trials; ++t) {
    Rng rng(trial_seed(seed, static_cast<std::uint64_t>(t)));
    McBackend be(plan, P, antennas, rng);
    for (const auto& [_, c] : be.interference_terms(*link)) sum += std::norm(c);
  }
  return sum / trials;
}

}  // namespace misobc
