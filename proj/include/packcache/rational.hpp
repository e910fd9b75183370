#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace packcache {

// Exact arithmetic for budget fractions. Arbitrary precision so that
// repeated renormalization can never overflow or round.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// floor(r) for non-negative r.
std::int64_t floor_to_i64(const Rational& r);

// Nearest double; fine for display and tolerance checks.
double to_double(const Rational& r);

// Accepts "3/16", "0.25", "1", "1e-3"-free decimal forms. Throws
// std::invalid_argument on anything else or on a zero denominator.
Rational parse_rational(const std::string& text);

// "1/2" for proper fractions, "3" when the denominator is 1.
std::string to_string(const Rational& r);

// "[1/2,1/4,1/4]"
std::string to_string(const std::vector<Rational>& fractions);

}  // namespace packcache
