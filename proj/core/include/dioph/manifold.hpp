#pragma once

#include <span>
#include <string>
#include <vector>

#include "dioph/polynomial.hpp"
#include "dioph/rational.hpp"

namespace dioph {

/// A Monge map f = (f_1, ..., f_m) : [0,1]^d -> R^m with polynomial
/// coordinates. First and second partial derivatives are derived symbolically
/// at construction. Immutable once built.
class MongeMap {
 public:
  MongeMap(int d, std::vector<Polynomial> coordinates, std::string name = "custom");

  [[nodiscard]] int d() const { return d_; }
  [[nodiscard]] int m() const { return static_cast<int>(coords_.size()); }
  [[nodiscard]] int n() const { return d() + m(); }
  [[nodiscard]] const std::string& name() const { return name_; }

  [[nodiscard]] const Polynomial& coordinate(int j) const { return coords_.at(static_cast<size_t>(j)); }
  /// ∂f_j/∂α_i
  [[nodiscard]] const Polynomial& gradient(int j, int i) const;
  /// ∂²f_j/∂α_i∂α_k
  [[nodiscard]] const Polynomial& hessian(int j, int i, int k) const;

  /// Unchecked evaluation (used internally at points just outside U).
  [[nodiscard]] double value(int j, std::span<const double> alpha) const {
    return coordinate(j)(alpha);
  }

  [[nodiscard]] int max_degree() const;

 private:
  int d_;
  std::vector<Polynomial> coords_;
  std::vector<Polynomial> grad_;  // j*d + i
  std::vector<Polynomial> hess_;  // (j*d + i)*d + k
  std::string name_;
};

enum class ConditionKind { jacobian_mm, hessian_dd };

/// Constants driving the counting bounds and the cover construction.
struct CurvatureReport {
  double eta_estimate = 0.0;  ///< grid minimum of the condition value / safety
  double c1 = 1.0;            ///< Lipschitz constant, sup-norm in α
  double C1 = 0.0;            ///< d² · sup |∂²f_j/∂α_i∂α_k| · safety
  int grid_resolution = 0;
  double safety = 1.0;
  ConditionKind condition_kind = ConditionKind::jacobian_mm;
};

std::vector<double> evaluate(const MongeMap& map, std::span<const double> alpha);
std::vector<Rational> evaluate(const MongeMap& map, std::span<const Rational> alpha);

/// |det(∂²f_j/∂α_1∂α_i)|, i, j = 1..m. Throws ShapeError when m > d.
double jacobian_condition_value(const MongeMap& map, std::span<const double> alpha);
Rational jacobian_condition_value(const MongeMap& map, std::span<const Rational> alpha);

/// |det Hessian(f)| for hypersurfaces. Throws ShapeError when m != 1.
double hessian_condition_value(const MongeMap& map, std::span<const double> alpha);
Rational hessian_condition_value(const MongeMap& map, std::span<const Rational> alpha);

/// True iff the partial derivatives of orders 2..l at α span R^m. The rational
/// overload computes the rank exactly; the double overload uses a relative
/// singular-value style tolerance on a pivoted elimination.
bool nondegeneracy_check(const MongeMap& map, std::span<const Rational> alpha, int l);
bool nondegeneracy_check(const MongeMap& map, std::span<const double> alpha, int l,
                         double rank_tolerance = 1e-10);

/// Grid estimate of η, c₁ and C₁ on the nested grid {i / grid_resolution}^d.
CurvatureReport estimate_constants(const MongeMap& map, int grid_resolution, double safety = 1.1);
CurvatureReport estimate_constants(const MongeMap& map, int grid_resolution, double safety,
                                   ConditionKind kind);

/// Certified lower bound for inf_U of the condition value, by interval
/// subdivision to the given depth. Returns 0 when no positive bound is proven.
double certify_eta(const MongeMap& map, ConditionKind kind, int max_depth = 12);

/// Certified upper bound on d² · sup_U |∂²f_j/∂α_i∂α_k|.
double certify_second_derivative_bound(const MongeMap& map);

/// Reorders the domain coordinates: new α_i is old α_{perm[i]}. Exposed so a
/// caller can move a favourable direction into the α₁ slot of the Jacobian
/// condition.
MongeMap relabel(const MongeMap& map, std::span<const int> perm);

namespace presets {

MongeMap parabola();
/// Curve (α, α², ..., α^n) in R^n: d = 1, m = n - 1.
MongeMap moment_curve(int n);
/// α₁² + ... + α_d².
MongeMap paraboloid(int d);
/// (x, y, z_1..z_k, x², xy, y²): d = k + 2, m = 3. Two-non-degenerate
/// everywhere, yet the Jacobian condition determinant vanishes identically.
MongeMap veronese_counterexample(int k);

/// "parabola", "moment_curve(3)", "paraboloid:2", ...
MongeMap by_name(const std::string& spec);

struct PresetInfo {
  std::string name;
  std::string description;
};
std::vector<PresetInfo> list();

/// Whether the preset satisfies the uniform Jacobian condition on U.
bool satisfies_jacobian_condition(const MongeMap& map);

}  // namespace presets

}  // namespace dioph
