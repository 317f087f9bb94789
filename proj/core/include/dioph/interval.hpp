#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace dioph {

// Closed interval with outward rounding: every operation widens its result by
// one ulp on each side, so enclosures stay sound under round-to-nearest.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  constexpr Interval() = default;
  constexpr explicit Interval(double x) : lo(x), hi(x) {}
  constexpr Interval(double l, double h) : lo(l), hi(h) {}

  [[nodiscard]] double width() const { return hi - lo; }
  [[nodiscard]] double mid() const { return 0.5 * (lo + hi); }
  [[nodiscard]] double mag() const { return std::max(std::abs(lo), std::abs(hi)); }
  [[nodiscard]] double mig() const {
    if (lo <= 0.0 && hi >= 0.0) return 0.0;
    return std::min(std::abs(lo), std::abs(hi));
  }
  [[nodiscard]] bool contains(double x) const { return lo <= x && x <= hi; }
};

namespace detail {
inline double down(double x) { return std::nextafter(x, -std::numeric_limits<double>::infinity()); }
inline double up(double x) { return std::nextafter(x, std::numeric_limits<double>::infinity()); }
}  // namespace detail

inline Interval operator+(Interval a, Interval b) {
  return {detail::down(a.lo + b.lo), detail::up(a.hi + b.hi)};
}

inline Interval operator-(Interval a, Interval b) {
  return {detail::down(a.lo - b.hi), detail::up(a.hi - b.lo)};
}

inline Interval operator-(Interval a) { return {-a.hi, -a.lo}; }

inline Interval operator*(Interval a, Interval b) {
  const double p1 = a.lo * b.lo;
  const double p2 = a.lo * b.hi;
  const double p3 = a.hi * b.lo;
  const double p4 = a.hi * b.hi;
  return {detail::down(std::min({p1, p2, p3, p4})), detail::up(std::max({p1, p2, p3, p4}))};
}

inline Interval operator*(double s, Interval a) { return Interval(s) * a; }

namespace detail {
// |x|^k by repeated multiplication, then widened by k ulps in the given direction.
inline double pow_bound(double x, int k, bool upward) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  for (int i = 0; i < k; ++i) r = upward ? up(r) : down(r);
  return r;
}
}  // namespace detail

// Tight enclosure of x^k using monotonicity of odd powers and evenness of even ones.
inline Interval pow(Interval a, int k) {
  if (k == 0) return Interval(1.0);
  if (k == 1) return a;
  if (k % 2 == 1) {
    return {detail::pow_bound(a.lo, k, false), detail::pow_bound(a.hi, k, true)};
  }
  const double lo_abs = a.mig();
  const double hi_abs = a.mag();
  return {std::max(0.0, detail::pow_bound(lo_abs, k, false)), detail::pow_bound(hi_abs, k, true)};
}

inline Interval hull(Interval a, Interval b) { return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)}; }

inline Interval intersect(Interval a, Interval b) { return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)}; }

}  // namespace dioph
