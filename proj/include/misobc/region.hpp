#pragma once

#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "misobc/core.hpp"

namespace misobc {

/// Half-plane  d1_coef * d1 + d2_coef * d2 <= bound.
struct HalfPlane {
  Rational d1_coef;
  Rational d2_coef;
  Rational bound;

  friend bool operator==(const HalfPlane&, const HalfPlane&) = default;

  [[nodiscard]] bool satisfied_by(const DoFPoint& p) const { return d1_coef * p.d1 + d2_coef * p.d2 <= bound; }
  [[nodiscard]] bool tight_at(const DoFPoint& p) const { return d1_coef * p.d1 + d2_coef * p.d2 == bound; }

  [[nodiscard]] std::string str() const {
    auto term = [](const Rational& c, const char* var) -> std::string {
      if (c == Rational(1)) return var;
      if (c == Rational(-1)) return std::string("-") + var;
      return c.str() + "*" + var;
    };
    std::string lhs;
    if (!d1_coef.is_zero()) lhs = term(d1_coef, "d1");
    if (!d2_coef.is_zero()) {
      std::string t = term(d2_coef, "d2");
      if (lhs.empty()) {
        lhs = t;
      } else if (t[0] == '-') {
        lhs += " - " + t.substr(1);
      } else {
        lhs += " + " + t;
      }
    }
    return lhs + " <= " + bound.str();
  }
};

namespace detail {

inline Rational cross(const DoFPoint& o, const DoFPoint& a, const DoFPoint& b) {
  return (a.d1 - o.d1) * (b.d2 - o.d2) - (a.d2 - o.d2) * (b.d1 - o.d1);
}

/// Drops repeated and collinear vertices of a closed counterclockwise walk and
/// re-checks strict convexity of what remains.
inline DoFRegion normalize_polygon(std::vector<DoFPoint> pts) {
  std::vector<DoFPoint> dedup;
  for (const auto& p : pts) {
    if (dedup.empty() || !(dedup.back() == p)) dedup.push_back(p);
  }
  while (dedup.size() > 1 && dedup.front() == dedup.back()) dedup.pop_back();

  bool changed = true;
  while (changed && dedup.size() > 2) {
    changed = false;
    for (std::size_t i = 0; i < dedup.size(); ++i) {
      const auto& prev = dedup[(i + dedup.size() - 1) % dedup.size()];
      const auto& next = dedup[(i + 1) % dedup.size()];
      if (cross(prev, dedup[i], next).is_zero()) {
        dedup.erase(dedup.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
  }
  for (std::size_t i = 0; i < dedup.size(); ++i) {
    const auto& a = dedup[i];
    const auto& b = dedup[(i + 1) % dedup.size()];
    const auto& c = dedup[(i + 2) % dedup.size()];
    if (cross(a, b, c) < Rational(0)) throw std::logic_error("region polygon is not convex");
  }
  return DoFRegion{std::move(dedup)};
}

}  // namespace detail

/// Optimal region with perfect delayed CSIT. Requires lambda_ga == lambda_ag.
inline DoFRegion region_with_delayed(const QualityConfig& cfg) {
  if (!cfg.symmetric())
    throw ConfigError("invariant violated: frac_ga == frac_ag is required with delayed CSIT (frac_ga = " +
                      cfg.frac_ga().str() + ", frac_ag = " + cfg.frac_ag().str() + ")");
  const Rational lb = lambda_bar(cfg);
  const Rational sym = (Rational(2) + lb) / Rational(3);
  return detail::normalize_polygon({{0, 0}, {1, 0}, {1, lb}, {sym, sym}, {lb, 1}, {0, 1}});
}

/// Achievable (inner-bound) region without delayed CSIT.
inline DoFRegion region_no_delayed(const QualityConfig& cfg) {
  const Rational lb = lambda_bar(cfg);
  return detail::normalize_polygon({{0, 0}, {1, 0}, {1, lb}, {lb, 1}, {0, 1}});
}

/// Bounding half-planes of the region, one per edge, scaled so the smallest
/// nonzero coefficient has magnitude one.
inline std::vector<HalfPlane> edge_half_planes(const DoFRegion& region) {
  std::vector<HalfPlane> out;
  const auto& v = region.vertices;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& p = v[i];
    const auto& q = v[(i + 1) % v.size()];
    Rational a = q.d2 - p.d2;
    Rational b = p.d1 - q.d1;
    Rational c = a * p.d1 + b * p.d2;
    Rational scale;
    for (const auto& x : {a, b}) {
      if (x.is_zero()) continue;
      Rational m = abs(x);
      if (scale.is_zero() || m < scale) scale = m;
    }
    if (scale.is_zero()) continue;
    out.push_back({a / scale, b / scale, c / scale});
  }
  return out;
}

/// Exact membership via the edge half-planes.
inline bool contains(const DoFRegion& region, const DoFPoint& p) {
  if (region.vertices.size() < 3) return false;
  for (const auto& h : edge_half_planes(region)) {
    if (!h.satisfied_by(p)) return false;
  }
  return true;
}

/// The defining inequalities of the delayed-CSIT region, including the two
/// nonnegativity constraints.
inline std::vector<HalfPlane> delayed_region_inequalities(const Rational& lb) {
  return {{-1, 0, 0}, {0, -1, 0}, {1, 0, 1}, {0, 1, 1}, {2, 1, Rational(2) + lb}, {1, 2, Rational(2) + lb}};
}

inline std::vector<HalfPlane> no_delayed_region_inequalities(const Rational& lb) {
  return {{-1, 0, 0}, {0, -1, 0}, {1, 0, 1}, {0, 1, 1}, {1, 1, Rational(1) + lb}};
}

/// Vertex-wise containment: for convex polygons, inner is a subset of outer iff
/// every vertex of inner lies in outer.
inline bool is_subset(const DoFRegion& inner, const DoFRegion& outer) {
  for (const auto& v : inner.vertices) {
    if (!contains(outer, v)) return false;
  }
  return true;
}

struct RegionRow {
  std::size_t index = 0;
  DoFPoint point;
};

inline std::vector<RegionRow> export_region(const DoFRegion& region) {
  std::vector<RegionRow> rows;
  rows.reserve(region.vertices.size());
  for (std::size_t i = 0; i < region.vertices.size(); ++i) rows.push_back({i, region.vertices[i]});
  return rows;
}

/// Decimal rendering with 12 significant digits.
inline std::string decimal12(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline std::string region_csv(const DoFRegion& region) {
  std::string out = "index,d1_exact,d2_exact,d1_decimal,d2_decimal\n";
  for (const auto& row : export_region(region)) {
    out += std::to_string(row.index) + "," + row.point.d1.str() + "," + row.point.d2.str() + "," +
           decimal12(row.point.d1.to_double()) + "," + decimal12(row.point.d2.to_double()) + "\n";
  }
  return out;
}

/// Barycentric weights of p over the region's vertices using the fan
/// triangulation from vertex 0. Returns nullopt when p lies outside.
inline std::optional<std::vector<Rational>> vertex_weights(const DoFRegion& region, const DoFPoint& p) {
  const auto& v = region.vertices;
  if (v.size() < 3 || !contains(region, p)) return std::nullopt;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    const auto& a = v[0];
    const auto& b = v[i];
    const auto& c = v[i + 1];
    Rational area = detail::cross(a, b, c);
    Rational wb = detail::cross(a, p, c) / area;
    Rational wc = detail::cross(a, b, p) / area;
    Rational wa = Rational(1) - wb - wc;
    if (wa < Rational(0) || wb < Rational(0) || wc < Rational(0)) continue;
    std::vector<Rational> w(v.size(), Rational(0));
    w[0] = wa;
    w[i] = wb;
    w[i + 1] = wc;
    return w;
  }
  return std::nullopt;
}

}  // namespace misobc
