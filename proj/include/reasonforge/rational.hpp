#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace rforge {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Round to the nearest integer, ties to even.
BigInt round_half_even(const Rational& q);

/// Fixed-point decimal rendering with `places` fractional digits (ties to even).
std::string to_decimal(const Rational& q, int places = 6);

/// Exact parse of "12", "-3.25", "4.2e9", "1/3". Throws Error(InvalidArgument).
Rational parse_rational(std::string_view text);

double to_double(const Rational& q);

/// Throws Error(ValueOverflow) when the value does not fit.
std::int64_t to_int64(const BigInt& v);

}  // namespace rforge
