#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace dioph {

using Rational = mpq_class;

/// Parses "p/q", an integer, or a decimal literal ("0.25", "-1.5e-3") into an
/// exact rational. Decimal digits are taken literally, so "0.1" is 1/10.
Rational parse_rational(std::string_view text);

/// Exact conversion; every finite double is a dyadic rational.
Rational rational_from_double(double x);

/// Nearest double (mpq_get_d truncates instead).
double to_double(const Rational& x);

std::string to_string(const Rational& x);

/// floor(x + 1/2), the nearest integer with ties rounded up.
mpz_class nearest_integer(const Rational& x);

/// |x - nearest integer|, exactly.
Rational distance_to_integer(const Rational& x);

/// Fractional part in [0, 1).
Rational fractional_part(const Rational& x);

}  // namespace dioph
