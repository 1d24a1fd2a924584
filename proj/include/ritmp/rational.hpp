#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <string_view>

namespace ritmp
{

using Rational = mpq_class;

/// Parses "3", "-2.50", "1/3", "-7/2" or "1.5e-3" exactly.
Rational parse_rational( std::string_view text );

/// Canonical text: "3", "-1/3".
std::string rational_to_string( const Rational& q );

/// Decimal text when the value has a finite decimal expansion ("1.5"), "p/q" otherwise.
std::string rational_to_decimal_or_fraction( const Rational& q );

/// Exact value of the shortest decimal that round-trips to `v` (0.3 -> 3/10).
Rational rational_from_double( double v );

double to_double( const Rational& q );

/// Smallest convenient rational r with r >= sqrt(q); exact when q is a square of a rational.
Rational sqrt_upper( const Rational& q );

bool is_integer( const Rational& q );

} // namespace ritmp
