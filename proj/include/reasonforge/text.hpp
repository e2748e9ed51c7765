#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace rforge {

/// Role identity used for matching gold nodes to parsed steps: ASCII
/// case-folded, `$` and punctuation dropped, whitespace collapsed and trimmed.
std::string normalize_role(std::string_view role);

/// Collapses every whitespace run to one space and trims both ends.
std::string collapse_whitespace(std::string_view text);

/// Budget tokenizer: a token is a maximal run of letters/digits (any byte
/// >= 0x80 counts as a letter) or a single other non-space character.
std::size_t count_tokens(std::string_view text);

/// Rewrites numeric literals to a plain form: thousands separators removed,
/// leading zeros stripped, trailing fractional zeros dropped ("16.0" -> "16").
std::string normalize_numbers(std::string_view text);

std::vector<std::string> split(std::string_view text, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::string trim(std::string_view text);
bool starts_with_ci(std::string_view text, std::string_view prefix);

}  // namespace rforge
