#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace misobc {

__extension__ typedef __int128 wide_int;

/// Exact rational number with a reduced, positive-denominator representation.
///
/// Intermediate products are formed in 128-bit arithmetic; a result that does
/// not fit back into 64 bits raises std::overflow_error instead of wrapping.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num) : num_(num), den_(1) {}  // NOLINT: implicit by intent
  Rational(std::int64_t num, std::int64_t den) { assign(num, den); }

  [[nodiscard]] std::int64_t num() const { return num_; }
  [[nodiscard]] std::int64_t den() const { return den_; }

  [[nodiscard]] bool is_zero() const { return num_ == 0; }
  [[nodiscard]] bool is_integer() const { return den_ == 1; }
  [[nodiscard]] double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  /// "p/q", or "p" when the denominator is one.
  [[nodiscard]] std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  /// Parses "p/q", "p", or a leading-sign variant of either. Whitespace is not
  /// accepted; decimals are rejected so that configs stay exact.
  static Rational parse(std::string_view text) {
    auto slash = text.find('/');
    auto num = parse_int(text.substr(0, slash), text);
    std::int64_t den = 1;
    if (slash != std::string_view::npos) den = parse_int(text.substr(slash + 1), text);
    if (den == 0) throw std::invalid_argument("rational '" + std::string(text) + "' has zero denominator");
    return Rational(num, den);
  }

  Rational operator-() const {
    if (num_ == INT64_MIN) throw std::overflow_error("rational negation overflow");
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    using W = wide_int;
    W n = W(a.num_) * b.den_ + W(b.num_) * a.den_;
    W d = W(a.den_) * b.den_;
    return from_wide(n, d);
  }
  friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
  friend Rational operator*(const Rational& a, const Rational& b) {
    using W = wide_int;
    return from_wide(W(a.num_) * b.num_, W(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("rational division by zero");
    using W = wide_int;
    return from_wide(W(a.num_) * b.den_, W(a.den_) * b.num_);
  }

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    using W = wide_int;
    W lhs = W(a.num_) * b.den_;
    W rhs = W(b.num_) * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;

  void assign(std::int64_t n, std::int64_t d) {
    if (d == 0) throw std::domain_error("rational with zero denominator");
    *this = from_wide(n, d);
  }

  static wide_int wide_gcd(wide_int a, wide_int b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
      wide_int t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  static Rational from_wide(wide_int n, wide_int d) {
    if (d == 0) throw std::domain_error("rational with zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    wide_int g = wide_gcd(n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    if (n == 0) d = 1;
    constexpr wide_int lo = INT64_MIN + 1;
    constexpr wide_int hi = INT64_MAX;
    if (n < lo || n > hi || d > hi) throw std::overflow_error("rational arithmetic overflow");
    Rational r;
    r.num_ = static_cast<std::int64_t>(n);
    r.den_ = static_cast<std::int64_t>(d);
    return r;
  }

  static std::int64_t parse_int(std::string_view part, std::string_view whole) {
    auto fail = [&] { throw std::invalid_argument("malformed rational '" + std::string(whole) + "'"); };
    if (part.empty()) fail();
    std::size_t i = 0;
    bool neg = false;
    if (part[0] == '-' || part[0] == '+') {
      neg = part[0] == '-';
      i = 1;
    }
    if (i == part.size()) fail();
    wide_int v = 0;
    for (; i < part.size(); ++i) {
      char c = part[i];
      if (c < '0' || c > '9') fail();
      v = v * 10 + (c - '0');
      if (v > INT64_MAX) throw std::overflow_error("rational component out of range in '" + std::string(whole) + "'");
    }
    return static_cast<std::int64_t>(neg ? -v : v);
  }
};

inline Rational abs(const Rational& r) { return r < Rational(0) ? -r : r; }

}  // namespace misobc
