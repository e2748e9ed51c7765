#include "reasonforge/rational.hpp"

#include <cctype>

#include "reasonforge/error.hpp"

namespace rforge {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::CycleDetected: return "CycleDetected";
    case Errc::DivisionNotExact: return "DivisionNotExact";
    case Errc::NegativeResult: return "NegativeResult";
    case Errc::ValueOverflow: return "ValueOverflow";
    case Errc::InvalidGraph: return "InvalidGraph";
    case Errc::InfeasibleConfig: return "InfeasibleConfig";
    case Errc::InstantiationFailed: return "InstantiationFailed";
    case Errc::NoSolvableUnknown: return "NoSolvableUnknown";
    case Errc::NonUniqueSolution: return "NonUniqueSolution";
    case Errc::NonIntegerSolution: return "NonIntegerSolution";
    case Errc::NonlinearConstraint: return "NonlinearConstraint";
    case Errc::ConstraintViolatesPositivity: return "ConstraintViolatesPositivity";
    case Errc::LexiconGap: return "LexiconGap";
    case Errc::PatternGap: return "PatternGap";
    case Errc::KExceedsN: return "KExceedsN";
    case Errc::EmptyBucket: return "EmptyBucket";
    case Errc::BetaOutOfRange: return "BetaOutOfRange";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

BigInt round_half_even(const Rational& q) {
  BigInt num = boost::multiprecision::numerator(q);
  BigInt den = boost::multiprecision::denominator(q);  // always > 0
  BigInt floor_q = num / den;
  BigInt rem = num % den;
  if (rem < 0) {
    floor_q -= 1;
    rem += den;
  }
  BigInt twice = rem * 2;
  if (twice > den) return floor_q + 1;
  if (twice < den) return floor_q;
  return (floor_q % 2 == 0) ? floor_q : floor_q + 1;
}

std::string to_decimal(const Rational& q, int places) {
  BigInt scale = 1;
  for (int i = 0; i < places; ++i) scale *= 10;
  BigInt scaled = round_half_even(q * Rational(scale));
  bool negative = scaled < 0;
  if (negative) scaled = -scaled;
  std::string digits = scaled.str();
  if (places > 0) {
    if (digits.size() <= static_cast<std::size_t>(places)) {
      digits.insert(0, static_cast<std::size_t>(places) + 1 - digits.size(), '0');
    }
    digits.insert(digits.size() - static_cast<std::size_t>(places), ".");
  }
  return negative ? "-" + digits : digits;
}

Rational parse_rational(std::string_view text) {
  auto fail = [&] {
    throw Error(Errc::InvalidArgument, "not a number: '" + std::string(text) + "'");
  };
  std::string s(text);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t start = 0;
  while (start < s.size() && std::isspace(static_cast<unsigned char>(s[start]))) ++start;
  s = s.substr(start);
  if (s.empty()) fail();

  if (auto slash = s.find('/'); slash != std::string::npos) {
    Rational a = parse_rational(s.substr(0, slash));
    Rational b = parse_rational(s.substr(slash + 1));
    if (b == 0) fail();
    return a / b;
  }

  std::size_t i = 0;
  bool negative = false;
  if (s[i] == '+' || s[i] == '-') {
    negative = s[i] == '-';
    ++i;
  }
  BigInt mantissa = 0;
  int frac_digits = 0;
  bool any_digit = false;
  bool seen_dot = false;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      mantissa = mantissa * 10 + (c - '0');
      any_digit = true;
      if (seen_dot) ++frac_digits;
    } else if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else if (c == '_' || c == ',') {
      continue;
    } else {
      break;
    }
  }
  if (!any_digit) fail();
  long exponent = 0;
  if (i < s.size()) {
    if (s[i] != 'e' && s[i] != 'E') fail();
    ++i;
    bool exp_neg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
      exp_neg = s[i] == '-';
      ++i;
    }
    if (i >= s.size()) fail();
    for (; i < s.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) fail();
      exponent = exponent * 10 + (s[i] - '0');
      if (exponent > 400) fail();
    }
    if (exp_neg) exponent = -exponent;
  }
  exponent -= frac_digits;
  Rational value(mantissa);
  BigInt p10 = 1;
  for (long k = 0; k < (exponent < 0 ? -exponent : exponent); ++k) p10 *= 10;
  if (exponent >= 0) {
    value *= Rational(p10);
  } else {
    value /= Rational(p10);
  }
  return negative ? Rational(-value) : value;
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

std::int64_t to_int64(const BigInt& v) {
  if (v > BigInt(INT64_MAX) || v < BigInt(INT64_MIN)) {
    throw Error(Errc::ValueOverflow, "integer does not fit in 64 bits: " + v.str());
  }
  return v.convert_to<std::int64_t>();
}

}  // namespace rforge
