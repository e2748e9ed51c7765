#include "reasonforge/linear.hpp"

namespace rforge {

namespace {

std::optional<std::int64_t> add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) return std::nullopt;
  return r;
}

std::optional<std::int64_t> mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) return std::nullopt;
  return r;
}

std::optional<std::int64_t> neg(std::int64_t a) {
  if (a == INT64_MIN) return std::nullopt;
  return -a;
}

}  // namespace

std::optional<std::int64_t> LinearValue::at(std::int64_t x) const {
  auto cx = mul(coeff, x);
  if (!cx) return std::nullopt;
  return add(*cx, constant);
}

std::string LinearValue::str() const {
  if (coeff == 0) return std::to_string(constant);
  std::string s;
  if (coeff == 1) {
    s = "x";
  } else if (coeff == -1) {
    s = "-x";
  } else {
    s = std::to_string(coeff) + "x";
  }
  if (constant > 0) s += " + " + std::to_string(constant);
  if (constant < 0) s += " - " + std::to_string(constant).substr(1);
  return s;
}

std::optional<LinearValue> lin_add(const LinearValue& a, const LinearValue& b) {
  auto c = add(a.coeff, b.coeff);
  auto k = add(a.constant, b.constant);
  if (!c || !k) return std::nullopt;
  return LinearValue{*c, *k};
}

std::optional<LinearValue> lin_neg(const LinearValue& a) {
  auto c = neg(a.coeff);
  auto k = neg(a.constant);
  if (!c || !k) return std::nullopt;
  return LinearValue{*c, *k};
}

std::optional<LinearValue> lin_sub(const LinearValue& a, const LinearValue& b) {
  auto nb = lin_neg(b);
  if (!nb) return std::nullopt;
  return lin_add(a, *nb);
}

std::optional<LinearValue> lin_mul(const LinearValue& a, const LinearValue& b) {
  if (a.coeff != 0 && b.coeff != 0) return std::nullopt;
  const LinearValue& scalar = a.coeff == 0 ? a : b;
  const LinearValue& other = a.coeff == 0 ? b : a;
  auto c = mul(other.coeff, scalar.constant);
  auto k = mul(other.constant, scalar.constant);
  if (!c || !k) return std::nullopt;
  return LinearValue{*c, *k};
}

std::optional<LinearValue> lin_div(const LinearValue& a, const LinearValue& b) {
  if (b.coeff != 0 || b.constant == 0) return std::nullopt;
  const std::int64_t d = b.constant;
  if (d == -1 && (a.coeff == INT64_MIN || a.constant == INT64_MIN)) return std::nullopt;
  if (a.coeff % d != 0 || a.constant % d != 0) return std::nullopt;
  return LinearValue{a.coeff / d, a.constant / d};
}

}  // namespace rforge
