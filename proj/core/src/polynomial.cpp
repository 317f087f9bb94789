#include "dioph/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dioph/errors.hpp"

namespace dioph {

Polynomial::Polynomial(int num_vars) : num_vars_(num_vars) {
  if (num_vars < 1) throw InputError("polynomial needs at least one variable");
}

Polynomial Polynomial::constant(int num_vars, const Rational& c) {
  Polynomial p(num_vars);
  std::vector<int> zero(static_cast<size_t>(num_vars), 0);
  p.add_term(zero, c);
  return p;
}

Polynomial Polynomial::variable(int num_vars, int index) {
  Polynomial p(num_vars);
  std::vector<int> e(static_cast<size_t>(num_vars), 0);
  e.at(static_cast<size_t>(index)) = 1;
  p.add_term(e, Rational(1));
  return p;
}

void Polynomial::add_term(std::span<const int> exponents, const Rational& coeff) {
  if (static_cast<int>(exponents.size()) != num_vars_) {
    throw InputError("monomial has " + std::to_string(exponents.size()) + " exponents, expected " +
                     std::to_string(num_vars_));
  }
  for (int e : exponents) {
    if (e < 0) throw InputError("negative exponent in monomial");
  }
  std::vector<int> key(exponents.begin(), exponents.end());
  auto it = std::lower_bound(terms_.begin(), terms_.end(), key,
                             [](const Monomial& m, const std::vector<int>& k) { return m.exponents < k; });
  if (it != terms_.end() && it->exponents == key) {
    it->coeff += coeff;
    it->coeff.canonicalize();
    if (it->coeff == 0) {
      terms_.erase(it);
    } else {
      it->coeff_approx = to_double(it->coeff);
    }
    return;
  }
  if (coeff == 0) return;
  Rational c = coeff;
  c.canonicalize();
  terms_.insert(it, Monomial{std::move(key), c, to_double(c)});
}

int Polynomial::degree() const {
  int deg = 0;
  for (const auto& t : terms_) {
    int s = 0;
    for (int e : t.exponents) s += e;
    deg = std::max(deg, s);
  }
  return deg;
}

double Polynomial::operator()(std::span<const double> x) const {
  double sum = 0.0;
  for (const auto& t : terms_) {
    double v = t.coeff_approx;
    for (int i = 0; i < num_vars_; ++i) {
      for (int k = 0; k < t.exponents[static_cast<size_t>(i)]; ++k) v *= x[static_cast<size_t>(i)];
    }
    sum += v;
  }
  return sum;
}

Rational Polynomial::operator()(std::span<const Rational> x) const {
  Rational sum = 0;
  for (const auto& t : terms_) {
    Rational v = t.coeff;
    for (int i = 0; i < num_vars_; ++i) {
      for (int k = 0; k < t.exponents[static_cast<size_t>(i)]; ++k) v *= x[static_cast<size_t>(i)];
    }
    sum += v;
  }
  sum.canonicalize();
  return sum;
}

Interval Polynomial::operator()(std::span<const Interval> x) const {
  Interval sum(0.0);
  for (const auto& t : terms_) {
    // The coefficient itself may not be representable; enclose it.
    Interval v(detail::down(t.coeff_approx), detail::up(t.coeff_approx));
    if (Rational(t.coeff_approx) == t.coeff) v = Interval(t.coeff_approx);
    for (int i = 0; i < num_vars_; ++i) {
      const int e = t.exponents[static_cast<size_t>(i)];
      if (e > 0) v = v * pow(x[static_cast<size_t>(i)], e);
    }
    sum = sum + v;
  }
  return sum;
}

double Polynomial::abs_sum(std::span<const double> x) const {
  double sum = 0.0;
  for (const auto& t : terms_) {
    double v = std::abs(t.coeff_approx);
    for (int i = 0; i < num_vars_; ++i) {
      for (int k = 0; k < t.exponents[static_cast<size_t>(i)]; ++k) v *= std::abs(x[static_cast<size_t>(i)]);
    }
    sum += v;
  }
  return sum;
}

Polynomial Polynomial::derivative(int var) const {
  if (var < 0 || var >= num_vars_) throw InputError("derivative variable out of range");
  Polynomial d(num_vars_);
  for (const auto& t : terms_) {
    const int e = t.exponents[static_cast<size_t>(var)];
    if (e == 0) continue;
    std::vector<int> ex = t.exponents;
    ex[static_cast<size_t>(var)] = e - 1;
    d.add_term(ex, t.coeff * e);
  }
  return d;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& t : terms_) {
    if (!first) out << " + ";
    first = false;
    out << t.coeff.get_str();
    for (int i = 0; i < num_vars_; ++i) {
      const int e = t.exponents[static_cast<size_t>(i)];
      if (e == 0) continue;
      out << "*a" << (i + 1);
      if (e > 1) out << '^' << e;
    }
  }
  return out.str();
}

bool operator==(const Polynomial& a, const Polynomial& b) {
  if (a.num_vars_ != b.num_vars_ || a.terms_.size() != b.terms_.size()) return false;
  for (size_t i = 0; i < a.terms_.size(); ++i) {
    if (a.terms_[i].exponents != b.terms_[i].exponents || a.terms_[i].coeff != b.terms_[i].coeff) return false;
  }
  return true;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  if (a.num_vars_ != b.num_vars_) throw InputError("polynomial variable count mismatch");
  Polynomial r = a;
  for (const auto& t : b.terms_) r.add_term(t.exponents, t.coeff);
  return r;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.num_vars_ != b.num_vars_) throw InputError("polynomial variable count mismatch");
  Polynomial r(a.num_vars_);
  for (const auto& s : a.terms_) {
    for (const auto& t : b.terms_) {
      std::vector<int> e(s.exponents.size());
      for (size_t i = 0; i < e.size(); ++i) e[i] = s.exponents[i] + t.exponents[i];
      r.add_term(e, s.coeff * t.coeff);
    }
  }
  return r;
}

Polynomial operator*(const Rational& s, const Polynomial& p) {
  Polynomial r(p.num_vars_);
  for (const auto& t : p.terms_) r.add_term(t.exponents, s * t.coeff);
  return r;
}

}  // namespace dioph
