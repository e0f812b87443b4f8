#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <string>
#include <string_view>

namespace definetti {

using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

/// Parses "p/q", an integer, or a decimal literal ("0.125", "-3e-2") exactly.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" (or "p" when q = 1).
std::string to_string(const Rational& value);

double to_double(const Rational& value);

Rational abs(const Rational& value);

}  // namespace definetti
