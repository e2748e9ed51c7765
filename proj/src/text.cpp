#include "reasonforge/text.hpp"

#include <cctype>

namespace rforge {

namespace {

bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_word(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

}  // namespace

std::string collapse_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending = false;
  for (unsigned char c : text) {
    if (is_space(c)) {
      pending = !out.empty();
      continue;
    }
    if (pending) out.push_back(' ');
    pending = false;
    out.push_back(static_cast<char>(c));
  }
  return out;
}

std::string normalize_role(std::string_view role) {
  std::string kept;
  kept.reserve(role.size());
  for (unsigned char c : role) {
    if (is_space(c)) {
      kept.push_back(' ');
    } else if (is_word(c)) {
      kept.push_back(static_cast<char>(std::tolower(c)));
    } else if (c == '-' || c == '\'') {
      kept.push_back(static_cast<char>(c));
    } else {
      kept.push_back(' ');
    }
  }
  return collapse_whitespace(kept);
}

std::size_t count_tokens(std::string_view text) {
  std::size_t n = 0;
  bool in_word = false;
  for (unsigned char c : text) {
    if (is_word(c)) {
      if (!in_word) ++n;
      in_word = true;
    } else {
      in_word = false;
      if (!is_space(c)) ++n;
    }
  }
  return n;
}

std::string normalize_numbers(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const bool boundary = i == 0 || !(std::isalnum(static_cast<unsigned char>(text[i - 1])) || text[i - 1] == '_' || text[i - 1] == '.');
    if (!is_digit(text[i]) || !boundary) {
      out.push_back(text[i++]);
      continue;
    }
    std::string digits;
    std::size_t j = i;
    while (j < text.size() && is_digit(text[j])) digits.push_back(text[j++]);
    auto group_at = [&](std::size_t k) {
      return k + 3 < text.size() && text[k] == ',' && is_digit(text[k + 1]) && is_digit(text[k + 2]) &&
             is_digit(text[k + 3]) && (k + 4 >= text.size() || !is_digit(text[k + 4]));
    };
    if (digits.size() <= 3) {
      while (group_at(j)) {
        digits.append(text.substr(j + 1, 3));
        j += 4;
      }
    }
    std::string frac;
    if (j + 1 < text.size() && text[j] == '.' && is_digit(text[j + 1])) {
      std::size_t k = j + 1;
      while (k < text.size() && is_digit(text[k])) frac.push_back(text[k++]);
      j = k;
      while (!frac.empty() && frac.back() == '0') frac.pop_back();
    }
    std::size_t nz = digits.find_first_not_of('0');
    digits = nz == std::string::npos ? "0" : digits.substr(nz);
    out += digits;
    if (!frac.empty()) out += "." + frac;
    i = j;
  }
  return out;
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find(sep, start);
    parts.emplace_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string trim(std::string_view text) {
  std::size_t b = 0, e = text.size();
  while (b < e && is_space(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && is_space(static_cast<unsigned char>(text[e - 1]))) --e;
  return std::string(text.substr(b, e - b));
}

bool starts_with_ci(std::string_view text, std::string_view prefix) {
  if (text.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(text[i])) != std::tolower(static_cast<unsigned char>(prefix[i]))) return false;
  }
  return true;
}

}  // namespace rforge
