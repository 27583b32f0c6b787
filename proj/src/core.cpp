#include "vitality/core.hpp"

#include <cstdio>

namespace vitality {

namespace {

int parse_digits(std::string_view s, std::size_t pos, std::size_t n) {
  if (pos + n > s.size()) throw ValidationError("timestamp too short: '" + std::string(s) + "'");
  int v = 0;
  for (std::size_t i = pos; i < pos + n; ++i) {
    const char c = s[i];
    if (c < '0' || c > '9') throw ValidationError("bad digit in timestamp: '" + std::string(s) + "'");
    v = v * 10 + (c - '0');
  }
  return v;
}

void expect_char(std::string_view s, std::size_t pos, char c) {
  if (pos >= s.size() || s[pos] != c)
    throw ValidationError("malformed timestamp: '" + std::string(s) + "'");
}

}  // namespace

Instant parse_instant(std::string_view s) {
  const int year = parse_digits(s, 0, 4);
  expect_char(s, 4, '-');
  const int month = parse_digits(s, 5, 2);
  expect_char(s, 7, '-');
  const int day = parse_digits(s, 8, 2);
  if (month < 1 || month > 12 || day < 1 || day > 31)
    throw ValidationError("out-of-range date: '" + std::string(s) + "'");
  Instant t = days_from_civil(year, month, day) * kSecondsPerDay;
  std::size_t pos = 10;
  if (pos < s.size() && (s[pos] == 'T' || s[pos] == ' ')) {
    const int hh = parse_digits(s, pos + 1, 2);
    expect_char(s, pos + 3, ':');
    const int mm = parse_digits(s, pos + 4, 2);
    expect_char(s, pos + 6, ':');
    const int ss = parse_digits(s, pos + 7, 2);
    if (hh > 23 || mm > 59 || ss > 60)
      throw ValidationError("out-of-range time: '" + std::string(s) + "'");
    t += hh * 3600 + mm * 60 + ss;
    pos += 9;
  }
  if (pos < s.size() && s[pos] == 'Z') ++pos;
  if (pos != s.size()) throw ValidationError("trailing characters in timestamp: '" + std::string(s) + "'");
  return t;
}

std::string format_instant(Instant t) {
  std::int64_t z = t / kSecondsPerDay;
  std::int64_t rem = t % kSecondsPerDay;
  if (rem < 0) {
    rem += kSecondsPerDay;
    --z;
  }
  int y, m, d;
  civil_from_days(z, y, m, d);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", y, m, d,
                static_cast<int>(rem / 3600), static_cast<int>(rem / 60 % 60),
                static_cast<int>(rem % 60));
  return buf;
}

YearMonth parse_year_month(std::string_view s) {
  if (s.size() != 7) throw ValidationError("expected YYYY-MM: '" + std::string(s) + "'");
  const int year = parse_digits(s, 0, 4);
  expect_char(s, 4, '-');
  const int month = parse_digits(s, 5, 2);
  if (month < 1 || month > 12) throw ValidationError("month out of range: '" + std::string(s) + "'");
  return {year, month};
}

}  // namespace vitality
