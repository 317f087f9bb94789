#include "dioph/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <regex>

#include "dioph/errors.hpp"

namespace dioph {

MongeMap::MongeMap(int d, std::vector<Polynomial> coordinates, std::string name)
    : d_(d), coords_(std::move(coordinates)), name_(std::move(name)) {
  if (d_ < 1) throw InputError("manifold domain dimension must be >= 1");
  if (coords_.empty()) throw InputError("manifold needs at least one coordinate function");
  for (const auto& p : coords_) {
    if (p.num_vars() != d_) throw InputError("coordinate function has wrong number of variables");
  }
  const auto dd = static_cast<size_t>(d_);
  grad_.reserve(coords_.size() * dd);
  hess_.reserve(coords_.size() * dd * dd);
  for (const auto& p : coords_) {
    for (int i = 0; i < d_; ++i) grad_.push_back(p.derivative(i));
  }
  for (size_t g = 0; g < grad_.size(); ++g) {
    for (int k = 0; k < d_; ++k) hess_.push_back(grad_[g].derivative(k));
  }
}

const Polynomial& MongeMap::gradient(int j, int i) const {
  return grad_.at(static_cast<size_t>(j * d_ + i));
}

const Polynomial& MongeMap::hessian(int j, int i, int k) const {
  return hess_.at(static_cast<size_t>((j * d_ + i) * d_ + k));
}

int MongeMap::max_degree() const {
  int deg = 0;
  for (const auto& p : coords_) deg = std::max(deg, p.degree());
  return deg;
}

namespace {

template <class T>
void check_domain(const MongeMap& map, std::span<const T> alpha) {
  if (static_cast<int>(alpha.size()) != map.d()) {
    throw InputError("point has " + std::to_string(alpha.size()) + " coordinates, expected " +
                     std::to_string(map.d()));
  }
  for (const auto& a : alpha) {
    if (!(a >= 0 && a <= 1)) throw InputError("point lies outside [0,1]^d");
  }
}

// Determinant by Gaussian elimination with partial pivoting.
double determinant(std::vector<std::vector<double>> a) {
  const size_t n = a.size();
  double det = 1.0;
  for (size_t c = 0; c < n; ++c) {
    size_t piv = c;
    for (size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    }
    if (a[piv][c] == 0.0) return 0.0;
    if (piv != c) {
      std::swap(a[piv], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (size_t r = c + 1; r < n; ++r) {
      const double factor = a[r][c] / a[c][c];
      for (size_t k = c; k < n; ++k) a[r][k] -= factor * a[c][k];
    }
  }
  return det;
}

Rational determinant(std::vector<std::vector<Rational>> a) {
  const size_t n = a.size();
  Rational det = 1;
  for (size_t c = 0; c < n; ++c) {
    size_t piv = c;
    while (piv < n && a[piv][c] == 0) ++piv;
    if (piv == n) return Rational(0);
    if (piv != c) {
      std::swap(a[piv], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (size_t r = c + 1; r < n; ++r) {
      if (a[r][c] == 0) continue;
      const Rational factor = a[r][c] / a[c][c];
      for (size_t k = c; k < n; ++k) a[r][k] -= factor * a[c][k];
    }
  }
  det.canonicalize();
  return det;
}

// Cofactor expansion; interval Gaussian elimination would blow up.
Interval determinant(const std::vector<std::vector<Interval>>& a) {
  const size_t n = a.size();
  if (n == 1) return a[0][0];
  if (n == 2) return a[0][0] * a[1][1] - a[0][1] * a[1][0];
  Interval sum(0.0);
  for (size_t c = 0; c < n; ++c) {
    std::vector<std::vector<Interval>> minor;
    minor.reserve(n - 1);
    for (size_t r = 1; r < n; ++r) {
      std::vector<Interval> row;
      row.reserve(n - 1);
      for (size_t k = 0; k < n; ++k) {
        if (k != c) row.push_back(a[r][k]);
      }
      minor.push_back(std::move(row));
    }
    Interval term = a[0][c] * determinant(minor);
    sum = (c % 2 == 0) ? sum + term : sum - term;
  }
  return sum;
}

// Entry (i, j) of the Jacobian-condition matrix is ∂²f_j/∂α_1∂α_i.
template <class T, class P>
std::vector<std::vector<T>> jacobian_matrix(const MongeMap& map, const P& point) {
  const int m = map.m();
  std::vector<std::vector<T>> a(static_cast<size_t>(m), std::vector<T>(static_cast<size_t>(m)));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) a[static_cast<size_t>(i)][static_cast<size_t>(j)] = map.hessian(j, 0, i)(point);
  }
  return a;
}

template <class T, class P>
std::vector<std::vector<T>> hessian_matrix(const MongeMap& map, const P& point) {
  const int d = map.d();
  std::vector<std::vector<T>> a(static_cast<size_t>(d), std::vector<T>(static_cast<size_t>(d)));
  for (int i = 0; i < d; ++i) {
    for (int k = 0; k < d; ++k) a[static_cast<size_t>(i)][static_cast<size_t>(k)] = map.hessian(0, i, k)(point);
  }
  return a;
}

void require_jacobian_shape(const MongeMap& map) {
  if (map.m() > map.d()) {
    throw ShapeError("Jacobian condition needs m <= d (got d=" + std::to_string(map.d()) +
                     ", m=" + std::to_string(map.m()) + ")");
  }
}

void require_hessian_shape(const MongeMap& map) {
  if (map.m() != 1) throw ShapeError("Hessian condition needs m = 1");
}

// All partial derivatives of order 2..l, as polynomials, per coordinate.
std::vector<std::vector<Polynomial>> derivative_family(const MongeMap& map, int l) {
  std::vector<std::vector<Polynomial>> family;  // family[k] = vector over j
  std::vector<std::vector<Polynomial>> layer;   // current order, each entry over j
  {
    std::vector<Polynomial> base;
    for (int j = 0; j < map.m(); ++j) base.push_back(map.coordinate(j));
    layer.push_back(std::move(base));
  }
  // Walk multi-indices in non-decreasing variable order to avoid duplicates.
  std::vector<int> last_var{0};
  for (int order = 1; order <= l; ++order) {
    std::vector<std::vector<Polynomial>> next;
    std::vector<int> next_last;
    for (size_t idx = 0; idx < layer.size(); ++idx) {
      for (int i = last_var[idx]; i < map.d(); ++i) {
        std::vector<Polynomial> deriv;
        for (const auto& p : layer[idx]) deriv.push_back(p.derivative(i));
        next.push_back(std::move(deriv));
        next_last.push_back(i);
      }
    }
    layer = std::move(next);
    last_var = std::move(next_last);
    if (order >= 2) {
      for (const auto& v : layer) family.push_back(v);
    }
  }
  return family;
}

int rank_exact(std::vector<std::vector<Rational>> rows, size_t cols) {
  int rank = 0;
  size_t r0 = 0;
  for (size_t c = 0; c < cols && r0 < rows.size(); ++c) {
    size_t piv = r0;
    while (piv < rows.size() && rows[piv][c] == 0) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[piv], rows[r0]);
    for (size_t r = r0 + 1; r < rows.size(); ++r) {
      if (rows[r][c] == 0) continue;
      const Rational f = rows[r][c] / rows[r0][c];
      for (size_t k = c; k < cols; ++k) rows[r][k] -= f * rows[r0][k];
    }
    ++r0;
    ++rank;
  }
  return rank;
}

int rank_numeric(std::vector<std::vector<double>> rows, size_t cols, double tol) {
  double scale = 0.0;
  for (const auto& r : rows) {
    for (double v : r) scale = std::max(scale, std::abs(v));
  }
  if (scale == 0.0) return 0;
  const double threshold = tol * scale;
  int rank = 0;
  size_t r0 = 0;
  for (size_t c = 0; c < cols && r0 < rows.size(); ++c) {
    size_t piv = r0;
    for (size_t r = r0; r < rows.size(); ++r) {
      if (std::abs(rows[r][c]) > std::abs(rows[piv][c])) piv = r;
    }
    if (std::abs(rows[piv][c]) <= threshold) continue;
    std::swap(rows[piv], rows[r0]);
    for (size_t r = r0 + 1; r < rows.size(); ++r) {
      const double f = rows[r][c] / rows[r0][c];
      for (size_t k = c; k < cols; ++k) rows[r][k] -= f * rows[r0][k];
    }
    ++r0;
    ++rank;
  }
  return rank;
}

// Visits the nested grid {i/res}^d.
void for_each_grid_point(int d, int res, const std::function<void(std::span<const double>)>& fn) {
  std::vector<int> idx(static_cast<size_t>(d), 0);
  std::vector<double> point(static_cast<size_t>(d), 0.0);
  while (true) {
    for (int i = 0; i < d; ++i) point[static_cast<size_t>(i)] = static_cast<double>(idx[static_cast<size_t>(i)]) / res;
    fn(point);
    int pos = d - 1;
    while (pos >= 0 && idx[static_cast<size_t>(pos)] == res) {
      idx[static_cast<size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++idx[static_cast<size_t>(pos)];
  }
}

}  // namespace

std::vector<double> evaluate(const MongeMap& map, std::span<const double> alpha) {
  check_domain(map, alpha);
  std::vector<double> out;
  out.reserve(static_cast<size_t>(map.m()));
  for (int j = 0; j < map.m(); ++j) out.push_back(map.coordinate(j)(alpha));
  return out;
}

std::vector<Rational> evaluate(const MongeMap& map, std::span<const Rational> alpha) {
  check_domain(map, alpha);
  std::vector<Rational> out;
  out.reserve(static_cast<size_t>(map.m()));
  for (int j = 0; j < map.m(); ++j) out.push_back(map.coordinate(j)(alpha));
  return out;
}

double jacobian_condition_value(const MongeMap& map, std::span<const double> alpha) {
  require_jacobian_shape(map);
  check_domain(map, alpha);
  return std::abs(determinant(jacobian_matrix<double>(map, alpha)));
}

Rational jacobian_condition_value(const MongeMap& map, std::span<const Rational> alpha) {
  require_jacobian_shape(map);
  check_domain(map, alpha);
  return abs(determinant(jacobian_matrix<Rational>(map, alpha)));
}

double hessian_condition_value(const MongeMap& map, std::span<const double> alpha) {
  require_hessian_shape(map);
  check_domain(map, alpha);
  return std::abs(determinant(hessian_matrix<double>(map, alpha)));
}

Rational hessian_condition_value(const MongeMap& map, std::span<const Rational> alpha) {
  require_hessian_shape(map);
  check_domain(map, alpha);
  return abs(determinant(hessian_matrix<Rational>(map, alpha)));
}

bool nondegeneracy_check(const MongeMap& map, std::span<const Rational> alpha, int l) {
  if (l < 2) throw InputError("non-degeneracy order l must be >= 2");
  check_domain(map, alpha);
  std::vector<std::vector<Rational>> rows;
  for (const auto& vec : derivative_family(map, l)) {
    std::vector<Rational> row;
    row.reserve(vec.size());
    for (const auto& p : vec) row.push_back(p(alpha));
    rows.push_back(std::move(row));
  }
  return rank_exact(std::move(rows), static_cast<size_t>(map.m())) == map.m();
}

bool nondegeneracy_check(const MongeMap& map, std::span<const double> alpha, int l, double rank_tolerance) {
  if (l < 2) throw InputError("non-degeneracy order l must be >= 2");
  check_domain(map, alpha);
  std::vector<std::vector<double>> rows;
  for (const auto& vec : derivative_family(map, l)) {
    std::vector<double> row;
    row.reserve(vec.size());
    for (const auto& p : vec) row.push_back(p(alpha));
    rows.push_back(std::move(row));
  }
  return rank_numeric(std::move(rows), static_cast<size_t>(map.m()), rank_tolerance) == map.m();
}

CurvatureReport estimate_constants(const MongeMap& map, int grid_resolution, double safety) {
  const ConditionKind kind = ConditionKind::jacobian_mm;
  return estimate_constants(map, grid_resolution, safety, kind);
}

CurvatureReport estimate_constants(const MongeMap& map, int grid_resolution, double safety,
                                   ConditionKind kind) {
  if (grid_resolution < 2) throw InputError("grid_resolution must be >= 2");
  if (!(safety >= 1.0)) throw InputError("safety factor must be >= 1");
  const int d = map.d();
  const int m = map.m();
  const bool condition_applies =
      kind == ConditionKind::jacobian_mm ? m <= d : m == 1;

  double max_second = 0.0;
  double max_first = 0.0;
  double min_condition = std::numeric_limits<double>::infinity();
  for_each_grid_point(d, grid_resolution, [&](std::span<const double> p) {
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i < d; ++i) {
        max_first = std::max(max_first, std::abs(map.gradient(j, i)(p)));
        for (int k = 0; k < d; ++k) max_second = std::max(max_second, std::abs(map.hessian(j, i, k)(p)));
      }
    }
    if (condition_applies) {
      const double v = kind == ConditionKind::jacobian_mm
                           ? std::abs(determinant(jacobian_matrix<double>(map, p)))
                           : std::abs(determinant(hessian_matrix<double>(map, p)));
      min_condition = std::min(min_condition, v);
    }
  });

  CurvatureReport report;
  report.grid_resolution = grid_resolution;
  report.safety = safety;
  report.condition_kind = kind;
  report.eta_estimate = condition_applies ? min_condition / safety : 0.0;
  report.c1 = std::max(1.0, safety * max_first * d);
  report.C1 = safety * static_cast<double>(d) * d * max_second;
  // A map with vanishing second derivatives still needs δ = 1/C₁ finite.
  if (report.C1 <= 0.0) report.C1 = std::numeric_limits<double>::min();
  return report;
}

namespace {

struct Box {
  std::vector<Interval> sides;
};

Interval condition_enclosure(const MongeMap& map, ConditionKind kind, std::span<const Interval> box) {
  if (kind == ConditionKind::jacobian_mm) {
    auto a = jacobian_matrix<Interval>(map, box);
    return determinant(a);
  }
  auto a = hessian_matrix<Interval>(map, box);
  return determinant(a);
}

double certify_box(const MongeMap& map, ConditionKind kind, Box box, int depth) {
  const Interval enc = condition_enclosure(map, kind, box.sides);
  const double lower = enc.mig();
  if (lower > 0.0) return lower;
  if (depth == 0) return 0.0;
  size_t widest = 0;
  for (size_t i = 1; i < box.sides.size(); ++i) {
    if (box.sides[i].width() > box.sides[widest].width()) widest = i;
  }
  Box left = box;
  Box right = box;
  const double mid = box.sides[widest].mid();
  left.sides[widest].hi = mid;
  right.sides[widest].lo = mid;
  const double a = certify_box(map, kind, std::move(left), depth - 1);
  if (a == 0.0) return 0.0;
  return std::min(a, certify_box(map, kind, std::move(right), depth - 1));
}

}  // namespace

double certify_eta(const MongeMap& map, ConditionKind kind, int max_depth) {
  if (kind == ConditionKind::jacobian_mm) {
    require_jacobian_shape(map);
  } else {
    require_hessian_shape(map);
  }
  Box unit{std::vector<Interval>(static_cast<size_t>(map.d()), Interval(0.0, 1.0))};
  return certify_box(map, kind, std::move(unit), max_depth);
}

double certify_second_derivative_bound(const MongeMap& map) {
  const int d = map.d();
  std::vector<Interval> unit(static_cast<size_t>(d), Interval(0.0, 1.0));
  double sup = 0.0;
  for (int j = 0; j < map.m(); ++j) {
    for (int i = 0; i < d; ++i) {
      for (int k = 0; k < d; ++k) sup = std::max(sup, map.hessian(j, i, k)(std::span<const Interval>(unit)).mag());
    }
  }
  return static_cast<double>(d) * d * sup;
}

MongeMap relabel(const MongeMap& map, std::span<const int> perm) {
  const int d = map.d();
  if (static_cast<int>(perm.size()) != d) throw InputError("relabel permutation has wrong length");
  std::vector<int> seen(static_cast<size_t>(d), 0);
  for (int p : perm) {
    if (p < 0 || p >= d || seen[static_cast<size_t>(p)]++) throw InputError("relabel needs a permutation of 0..d-1");
  }
  std::vector<Polynomial> coords;
  for (int j = 0; j < map.m(); ++j) {
    Polynomial out(d);
    for (const auto& t : map.coordinate(j).terms()) {
      std::vector<int> e(static_cast<size_t>(d));
      for (int i = 0; i < d; ++i) e[static_cast<size_t>(i)] = t.exponents[static_cast<size_t>(perm[static_cast<size_t>(i)])];
      out.add_term(e, t.coeff);
    }
    coords.push_back(std::move(out));
  }
  return MongeMap(d, std::move(coords), map.name() + "/relabelled");
}

namespace presets {

namespace {
Polynomial monomial(int d, std::vector<int> e, const Rational& c = Rational(1)) {
  Polynomial p(d);
  p.add_term(e, c);
  return p;
}
}  // namespace

MongeMap parabola() { return MongeMap(1, {monomial(1, {2})}, "parabola"); }

MongeMap moment_curve(int n) {
  if (n < 2) throw InputError("moment_curve needs n >= 2");
  std::vector<Polynomial> coords;
  for (int k = 2; k <= n; ++k) coords.push_back(monomial(1, {k}));
  return MongeMap(1, std::move(coords), "moment_curve(" + std::to_string(n) + ")");
}

MongeMap paraboloid(int d) {
  if (d < 1) throw InputError("paraboloid needs d >= 1");
  Polynomial p(d);
  for (int i = 0; i < d; ++i) {
    std::vector<int> e(static_cast<size_t>(d), 0);
    e[static_cast<size_t>(i)] = 2;
    p.add_term(e, Rational(1));
  }
  return MongeMap(d, {p}, "paraboloid(" + std::to_string(d) + ")");
}

MongeMap veronese_counterexample(int k) {
  if (k < 0) throw InputError("veronese_counterexample needs k >= 0");
  const int d = k + 2;
  auto e = [d](int x, int y) {
    std::vector<int> v(static_cast<size_t>(d), 0);
    v[0] = x;
    v[1] = y;
    return v;
  };
  return MongeMap(d, {monomial(d, e(2, 0)), monomial(d, e(1, 1)), monomial(d, e(0, 2))},
                  "veronese_counterexample(" + std::to_string(k) + ")");
}

MongeMap by_name(const std::string& spec) {
  static const std::regex pattern(R"(^\s*([a-z_]+)\s*(?:[(:]\s*(-?\d+)\s*\)?)?\s*$)");
  std::smatch match;
  if (!std::regex_match(spec, match, pattern)) throw InputError("unknown preset '" + spec + "'");
  const std::string name = match[1];
  const bool has_arg = match[2].matched;
  const int arg = has_arg ? std::stoi(match[2]) : 0;
  auto need_arg = [&](const char* what) {
    if (!has_arg) throw InputError(std::string("preset '") + what + "' needs an integer argument");
  };
  if (name == "parabola") {
    if (has_arg) throw InputError("preset 'parabola' takes no argument");
    return parabola();
  }
  if (name == "moment_curve") {
    need_arg("moment_curve");
    return moment_curve(arg);
  }
  if (name == "paraboloid") {
    need_arg("paraboloid");
    return paraboloid(arg);
  }
  if (name == "veronese_counterexample") {
    need_arg("veronese_counterexample");
    return veronese_counterexample(arg);
  }
  throw InputError("unknown preset '" + spec + "'");
}

std::vector<PresetInfo> list() {
  return {
      {"parabola", "f(a) = a^2; d = 1, m = 1"},
      {"moment_curve(n)", "f(a) = (a^2, ..., a^n); d = 1, m = n - 1"},
      {"paraboloid(d)", "f(a) = a_1^2 + ... + a_d^2; m = 1"},
      {"veronese_counterexample(k)", "f(x, y, z_1..z_k) = (x^2, xy, y^2); d = k + 2, m = 3"},
  };
}

bool satisfies_jacobian_condition(const MongeMap& map) {
  if (map.m() > map.d()) return false;
  return certify_eta(map, ConditionKind::jacobian_mm) > 0.0;
}

}  // namespace presets

}  // namespace dioph
