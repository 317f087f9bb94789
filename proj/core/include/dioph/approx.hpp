#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dioph/rational.hpp"

namespace dioph {

/// ψ(q) = q^{-τ}
struct PowerForm {
  Rational tau;
};

/// ψ(q) = q^{-τ} (log q)^β, natural logarithm; undefined at q = 1.
struct PowerLogForm {
  Rational tau;
  Rational beta;
};

/// Explicit q -> ψ(q); absent keys mean ψ(q) = 0.
struct TableForm {
  std::map<std::int64_t, Rational> values;
};

struct ConstantForm {
  Rational value;
};

using PsiForm = std::variant<PowerForm, PowerLogForm, TableForm, ConstantForm>;

struct AllSupport {};

/// {base^t : t >= 1}
struct LacunarySupport {
  std::int64_t base = 2;
};

struct ExplicitSupport {
  std::vector<std::int64_t> values;  ///< sorted, unique
};

using Support = std::variant<AllSupport, LacunarySupport, ExplicitSupport>;

/// ψ(q) together with the exact rational it denotes. When the closed form is
/// rational (tables, constants, integer τ) `exact` is that rational; otherwise
/// it is the exact value of the double `value`.
struct PsiValue {
  double value = 0.0;
  Rational exact;
  bool exact_is_closed_form = false;

  static PsiValue from_rational(const Rational& r);
  static PsiValue from_double(double x);
};

/// Approximating function with restricted integer support.
class ApproxFunction {
 public:
  ApproxFunction(PsiForm form, Support support = AllSupport{}, Rational scale = Rational(1));

  [[nodiscard]] const PsiForm& form() const { return form_; }
  [[nodiscard]] const Support& support() const { return support_; }
  [[nodiscard]] const Rational& scale() const { return scale_; }

  [[nodiscard]] bool in_support(std::int64_t q) const;

  /// Support members in [lo, hi], ascending.
  [[nodiscard]] std::vector<std::int64_t> support_in(std::int64_t lo, std::int64_t hi) const;

  [[nodiscard]] PsiValue value(std::int64_t q) const;

  /// The same function with its scale multiplied by `factor`.
  [[nodiscard]] ApproxFunction scaled(const Rational& factor) const;

  /// Canonical grammar text, e.g. "powlog:1/3:2/3" or "pow:1/2:x3".
  [[nodiscard]] std::string to_string() const;
  [[nodiscard]] std::string support_string() const;

 private:
  PsiForm form_;
  Support support_;
  Rational scale_;
};

/// scale × form(q) for q in the support, else 0.
double psi_eval(const ApproxFunction& psi, std::int64_t q);

enum class ThresholdKind { cor12, cor18 };

struct Threshold {
  ThresholdKind kind = ThresholdKind::cor12;
  int dim = 1;  ///< m for cor12, d for cor18

  static Threshold cor12(int m) { return {ThresholdKind::cor12, m}; }
  static Threshold cor18(int d) { return {ThresholdKind::cor18, d}; }
};

/// q^{-1/(2m+1)}(log q)^{2/(2m+1)} or q^{-d/(2+d)}(log q)^{2d/(2+d)}.
double threshold_floor(Threshold kind, std::int64_t q);

/// floor(q) <= ψ(q) <= 1/2. The lower comparison allows 1e-12 relative slack
/// so a ψ defined as exactly the floor function is accepted.
bool threshold_check(const ApproxFunction& psi, std::int64_t q, Threshold kind);

/// θ = (λ, γ) ∈ R^d × R^m, stored exactly.
struct Shift {
  std::vector<Rational> lambda;
  std::vector<Rational> gamma;

  static Shift zero(int d, int m);
  [[nodiscard]] std::vector<double> lambda_approx() const;
  [[nodiscard]] std::vector<double> gamma_approx() const;
  friend bool operator==(const Shift&, const Shift&) = default;
};

/// Componentwise fractional parts of λ and γ.
Shift reduce_shift(const Shift& theta);

/// "pow:τ", "powlog:τ:β", "const:c", "table:{q:v,...}" or "table:<file>",
/// each optionally followed by ":x<scale>".
ApproxFunction parse_psi(std::string_view grammar, std::string_view support_grammar = "all");

/// "all", "lacunary:<base>", "set:{q,...}" or "set:<file>".
Support parse_support(std::string_view grammar);

/// Comma-separated exact numbers split as d λ's followed by m γ's. An empty
/// string or a single "0" means θ = 0.
Shift parse_shift(std::string_view text, int d, int m);

}  // namespace dioph
