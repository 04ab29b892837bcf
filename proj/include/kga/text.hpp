#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace kga::text {

/// Decodes UTF-8; malformed bytes come through as single code points so no
/// input is ever rejected here.
std::vector<char32_t> utf8_decode(std::string_view s);

void utf8_append(std::string& out, char32_t cp);
std::string utf8_encode(const std::vector<char32_t>& cps);

/// Simple case folding for ASCII and the Latin-1 supplement; other code
/// points pass through unchanged.
char32_t fold_case(char32_t cp);

inline bool is_ascii_upper(char32_t cp) { return cp >= U'A' && cp <= U'Z'; }
inline bool is_ascii_lower(char32_t cp) { return cp >= U'a' && cp <= U'z'; }
inline bool is_ascii_digit(char32_t cp) { return cp >= U'0' && cp <= U'9'; }
inline bool is_ascii_alpha(char32_t cp) {
  return is_ascii_upper(cp) || is_ascii_lower(cp);
}

}  // namespace kga::text
