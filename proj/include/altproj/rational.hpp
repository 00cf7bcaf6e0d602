#pragma once

#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace altproj {

/// Arbitrary precision rational used for exact polynomial and series data.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(double x) { return x; }
inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// Exact rational value of a finite double (every finite double is dyadic).
Rational rational_from_double(double x);

/// Parses "p", "p/q", or a decimal literal such as "-1.25" or "3e-2" exactly.
Rational parse_rational(std::string_view text);

/// Canonical text: "p" or "p/q" with q > 1.
std::string format_rational(const Rational& r);

/// Returns the exact square root when r is the square of a rational.
bool exact_sqrt(const Rational& r, Rational& root);

}  // namespace altproj
