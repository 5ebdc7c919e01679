#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace coalesce {

// Exact probability value. GMP keeps every mpq_class result in lowest terms
// with a positive denominator, provided inputs are canonicalized on entry.
using Rational = mpq_class;

// num/den in lowest terms. Throws Error(MalformedRational) if den is zero.
// Prefer this to the two-argument mpq_class constructor, which does not reduce.
Rational ratio(const mpz_class& num, const mpz_class& den);

// Accepts "p/q", "p", with an optional sign. Throws Error(MalformedRational).
Rational parse_rational(std::string_view text);

std::string to_string(const Rational& value);

// Nearest double, used only for Monte Carlo reporting.
double to_double(const Rational& value);

}  // namespace coalesce
