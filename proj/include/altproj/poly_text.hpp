#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "altproj/multipoly.hpp"

namespace altproj {

/// Default variable names x1, ..., xn.
std::vector<std::string> default_var_names(std::size_t nvars);

/// Parses polynomial text over the named variables.
///
/// Accepts sums of terms `c * x1^e1 * ... * xn^en` with rational `p/q` or
/// decimal coefficients, and additionally parentheses, unary minus, and
/// integer powers of parenthesized subexpressions, e.g. "(x - 1)^2 + (y - 1)^4 - 2".
/// Whitespace is ignored. Throws ParseError with the offending position.
MultiPoly parse_poly(std::string_view text, const std::vector<std::string>& var_names);

/// Canonical text: terms in descending lexicographic exponent order, exact
/// rational coefficients, e.g. "x^2 + 1/2*x*y - 3".
std::string format_poly(const MultiPoly& p, const std::vector<std::string>& var_names);

}  // namespace altproj
