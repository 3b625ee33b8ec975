#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace emdm {

inline std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::string to_upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

inline std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  size_t start = 0;
  while (start <= text.size()) {
    size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.emplace_back(text.substr(start));
      break;
    }
    lines.emplace_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

// Canonical decimal form for free-form numeric answers: strips currency
// symbols and thousands separators, drops leading/trailing zeros, normalizes
// "-0" to "0". Two numerals are equal iff their canonical forms are equal
// (exact rational comparison, no epsilon). Returns nullopt if `raw` is not a
// plain decimal numeral.
inline std::optional<std::string> canonical_number(std::string_view raw) {
  std::string s;
  s.reserve(raw.size());
  for (char c : raw) {
    if (c == ',' || c == '$' || c == ' ' || c == '\t') continue;
    s.push_back(c);
  }
  if (s.empty()) return std::nullopt;

  size_t i = 0;
  bool neg = false;
  if (s[i] == '+' || s[i] == '-') {
    neg = (s[i] == '-');
    ++i;
  }
  std::string int_part, frac_part;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) int_part.push_back(s[i++]);
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) frac_part.push_back(s[i++]);
  }
  if (i != s.size()) return std::nullopt;
  if (int_part.empty() && frac_part.empty()) return std::nullopt;

  size_t nz = int_part.find_first_not_of('0');
  int_part = (nz == std::string::npos) ? "" : int_part.substr(nz);
  size_t fz = frac_part.find_last_not_of('0');
  frac_part = (fz == std::string::npos) ? "" : frac_part.substr(0, fz + 1);

  if (int_part.empty()) int_part = "0";
  std::string out = int_part;
  if (!frac_part.empty()) out += "." + frac_part;
  if (neg && out != "0") out.insert(out.begin(), '-');
  return out;
}

// Gold answers for free-form tasks are normalized once at load time; answers
// that are not numerals pass through trimmed.
inline std::string normalize_freeform_gold(std::string_view raw) {
  if (auto n = canonical_number(trim(raw))) return *n;
  return trim(raw);
}

}  // namespace emdm
