#pragma once

#include <span>
#include <string>
#include <vector>

#include "dioph/interval.hpp"
#include "dioph/rational.hpp"

namespace dioph {

/// One monomial c·α^e. The double coefficient mirrors the exact one for the
/// floating-point fast path.
struct Monomial {
  std::vector<int> exponents;
  Rational coeff;
  double coeff_approx = 0.0;
};

/// Sparse multivariate polynomial with rational coefficients. Terms are kept
/// sorted by exponent vector with no zero coefficients, so two polynomials
/// compare equal iff they are the same function.
class Polynomial {
 public:
  explicit Polynomial(int num_vars = 1);

  static Polynomial constant(int num_vars, const Rational& c);
  static Polynomial variable(int num_vars, int index);

  void add_term(std::span<const int> exponents, const Rational& coeff);

  [[nodiscard]] int num_vars() const { return num_vars_; }
  [[nodiscard]] int degree() const;
  [[nodiscard]] bool is_zero() const { return terms_.empty(); }
  [[nodiscard]] const std::vector<Monomial>& terms() const { return terms_; }

  [[nodiscard]] double operator()(std::span<const double> x) const;
  [[nodiscard]] Rational operator()(std::span<const Rational> x) const;
  [[nodiscard]] Interval operator()(std::span<const Interval> x) const;

  /// Σ |c|·|x^e|, the scale used for floating-point error bounds.
  [[nodiscard]] double abs_sum(std::span<const double> x) const;

  [[nodiscard]] Polynomial derivative(int var) const;

  [[nodiscard]] std::string to_string() const;

  friend bool operator==(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Rational& s, const Polynomial& p);

 private:
  int num_vars_;
  std::vector<Monomial> terms_;
};

}  // namespace dioph
