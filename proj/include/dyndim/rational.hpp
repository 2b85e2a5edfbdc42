#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>
#include <vector>

namespace dyndim {

// All quantities in the calculus are exact rationals. Floating point is never
// used for membership tests, orders, capacities, or certificate values.
using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int rat_num(const Rat& r) { return numerator(r); }
inline Int rat_den(const Rat& r) { return denominator(r); }

// Canonical text form: "p" when the denominator is 1, otherwise "p/q" with q > 0.
std::string rat_str(const Rat& r);

// Parses "p", "p/q", or "-p/q". Rejects zero denominators and malformed input.
Rat parse_rat(const std::string& s);

// floor(r) as an exact integer.
Int rat_floor(const Rat& r);

bool rat_is_integer(const Rat& r);

Int int_gcd(Int a, Int b);
Int int_lcm(const Int& a, const Int& b);

std::string format_rat_vec(const std::vector<Rat>& v);

}  // namespace dyndim
