#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace rforge {

/// coeff * x + constant over a single unknown x. coeff == 0 means fully numeric.
struct LinearValue {
  std::int64_t coeff = 0;
  std::int64_t constant = 0;

  static LinearValue number(std::int64_t v) { return {0, v}; }
  static LinearValue unknown() { return {1, 0}; }

  bool numeric() const { return coeff == 0; }
  bool operator==(const LinearValue&) const = default;

  /// Substitutes x; nullopt on overflow.
  std::optional<std::int64_t> at(std::int64_t x) const;

  /// "2x + 18", "-x", "x - 3", "7".
  std::string str() const;
};

// Checked arithmetic; nullopt on overflow, non-linearity or inexact division.
std::optional<LinearValue> lin_add(const LinearValue& a, const LinearValue& b);
std::optional<LinearValue> lin_sub(const LinearValue& a, const LinearValue& b);
std::optional<LinearValue> lin_mul(const LinearValue& a, const LinearValue& b);
std::optional<LinearValue> lin_div(const LinearValue& a, const LinearValue& b);
std::optional<LinearValue> lin_neg(const LinearValue& a);

}  // namespace rforge
