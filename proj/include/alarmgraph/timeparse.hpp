#pragma once

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace alarmgraph {

// Civil <-> serial date conversion (proleptic Gregorian, UTC-naive).
// Timestamps are epoch seconds at 1-second resolution.

inline std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);             // [0, 399]
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;  // [0, 365]
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;            // [0, 146096]
  return static_cast<std::int64_t>(era) * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y = static_cast<int>(yy + (m <= 2));
}

namespace detail {

inline bool read_uint(std::string_view s, std::size_t& pos, int max_digits, int& out) {
  int v = 0;
  int n = 0;
  while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])) && n < max_digits) {
    v = v * 10 + (s[pos] - '0');
    ++pos;
    ++n;
  }
  if (n == 0) return false;
  out = v;
  return true;
}

inline bool expect(std::string_view s, std::size_t& pos, char c) {
  if (pos < s.size() && s[pos] == c) {
    ++pos;
    return true;
  }
  return false;
}

inline bool valid_civil(int y, int m, int d) {
  static const int mdays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m < 1 || m > 12 || d < 1) return false;
  int dm = mdays[m - 1];
  if (m == 2 && ((y % 4 == 0 && y % 100 != 0) || y % 400 == 0)) dm = 29;
  return d <= dm;
}

}  // namespace detail

/// Parse "M/D/YYYY h:mm:ss AM/PM" (Table-style) or ISO-8601
/// "YYYY-MM-DD[T ]HH:MM:SS[Z]". Returns epoch seconds, or nullopt on failure.
inline std::optional<std::int64_t> parse_timestamp(std::string_view s) {
  // trim
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.empty()) return std::nullopt;

  std::size_t pos = 0;
  int a = 0;
  if (!detail::read_uint(s, pos, 4, a)) return std::nullopt;

  int y, mo, d, h, mi, sec;
  if (pos < s.size() && s[pos] == '/') {
    // M/D/YYYY h:mm:ss AM|PM
    ++pos;
    mo = a;
    if (!detail::read_uint(s, pos, 2, d)) return std::nullopt;
    if (!detail::expect(s, pos, '/')) return std::nullopt;
    if (!detail::read_uint(s, pos, 4, y)) return std::nullopt;
    if (!detail::expect(s, pos, ' ')) return std::nullopt;
    while (pos < s.size() && s[pos] == ' ') ++pos;
    if (!detail::read_uint(s, pos, 2, h)) return std::nullopt;
    if (!detail::expect(s, pos, ':')) return std::nullopt;
    if (!detail::read_uint(s, pos, 2, mi)) return std::nullopt;
    if (!detail::expect(s, pos, ':')) return std::nullopt;
    if (!detail::read_uint(s, pos, 2, sec)) return std::nullopt;
    while (pos < s.size() && s[pos] == ' ') ++pos;
    if (pos + 2 > s.size()) return std::nullopt;
    char half = static_cast<char>(std::toupper(static_cast<unsigned char>(s[pos])));
    char em = static_cast<char>(std::toupper(static_cast<unsigned char>(s[pos + 1])));
    if (em != 'M' || (half != 'A' && half != 'P')) return std::nullopt;
    pos += 2;
    if (pos != s.size()) return std::nullopt;
    if (h < 1 || h > 12) return std::nullopt;
    if (half == 'A') {
      if (h == 12) h = 0;  // 12:xx AM is midnight
    } else {
      if (h != 12) h += 12;
    }
  } else if (pos < s.size() && s[pos] == '-') {
    // ISO-8601
    ++pos;
    y = a;
    if (!detail::read_uint(s, pos, 2, mo)) return std::nullopt;
    if (!detail::expect(s, pos, '-')) return std::nullopt;
    if (!detail::read_uint(s, pos, 2, d)) return std::nullopt;
    if (pos >= s.size() || (s[pos] != 'T' && s[pos] != ' ')) return std::nullopt;
    ++pos;
    if (!detail::read_uint(s, pos, 2, h)) return std::nullopt;
    if (!detail::expect(s, pos, ':')) return std::nullopt;
    if (!detail::read_uint(s, pos, 2, mi)) return std::nullopt;
    if (!detail::expect(s, pos, ':')) return std::nullopt;
    if (!detail::read_uint(s, pos, 2, sec)) return std::nullopt;
    if (pos < s.size() && s[pos] == 'Z') ++pos;
    if (pos != s.size()) return std::nullopt;
    if (h > 23) return std::nullopt;
  } else {
    return std::nullopt;
  }

  if (!detail::valid_civil(y, mo, d)) return std::nullopt;
  if (mi > 59 || sec > 59) return std::nullopt;
  return days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + sec;
}

/// Epoch seconds -> "YYYY-MM-DDTHH:MM:SS".
inline std::string format_iso(std::int64_t t) {
  std::int64_t days = t / 86400;
  std::int64_t rem = t % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  int y, m, d;
  civil_from_days(days, y, m, d);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02lld:%02lld:%02lld", y, m, d,
                static_cast<long long>(rem / 3600), static_cast<long long>(rem / 60 % 60),
                static_cast<long long>(rem % 60));
  return buf;
}

}  // namespace alarmgraph
