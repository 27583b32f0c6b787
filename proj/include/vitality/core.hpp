#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace vitality {

// Seconds since the Unix epoch, UTC.
using Instant = std::int64_t;

inline constexpr std::int64_t kSecondsPerDay = 86400;
// Fixed month length used everywhere a fractional duration is needed.
inline constexpr double kDaysPerMonth = 30.4375;

// User-facing input problem (bad config, bad record, contract broken by data).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// A pipeline stage artifact that should exist but does not.
struct MissingInputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---- civil-date arithmetic (proleptic Gregorian, no timezone) ----

constexpr std::int64_t days_from_civil(int y, int m, int d) noexcept {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2) / 5 + static_cast<unsigned>(d) - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

constexpr void civil_from_days(std::int64_t z, int& y, int& m, int& d) noexcept {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
  y = static_cast<int>(yy + (m <= 2));
}

// UTC calendar month. Ordered, hashable via index().
struct YearMonth {
  int year = 1970;
  int month = 1;  // 1..12

  [[nodiscard]] int index() const noexcept { return year * 12 + (month - 1); }
  static YearMonth from_index(int idx) noexcept {
    int y = idx / 12, m = idx % 12;
    if (m < 0) { m += 12; --y; }
    return {y, m + 1};
  }
  auto operator<=>(const YearMonth&) const = default;

  [[nodiscard]] std::string str() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
    return buf;
  }
};

inline YearMonth add_months(YearMonth ym, int n) { return YearMonth::from_index(ym.index() + n); }
// b - a in whole calendar months.
inline int months_between(YearMonth a, YearMonth b) { return b.index() - a.index(); }

inline YearMonth ym_of(Instant t) {
  std::int64_t z = t / kSecondsPerDay;
  if (t < 0 && t % kSecondsPerDay != 0) --z;
  int y, m, d;
  civil_from_days(z, y, m, d);
  return {y, m};
}

inline Instant month_start(YearMonth ym) { return days_from_civil(ym.year, ym.month, 1) * kSecondsPerDay; }
// Last second of the calendar month.
inline Instant month_end(YearMonth ym) { return month_start(add_months(ym, 1)) - 1; }

// Fractional months between two instants, fixed 30.4375-day month.
inline double months_between_frac(Instant a, Instant b) {
  return static_cast<double>(b - a) / kSecondsPerDay / kDaysPerMonth;
}

// Adds calendar months to an instant, clamping the day into the target month.
inline Instant add_months_instant(Instant t, int n) {
  std::int64_t z = t / kSecondsPerDay;
  std::int64_t sec = t % kSecondsPerDay;
  if (sec < 0) {
    sec += kSecondsPerDay;
    --z;
  }
  int y, m, d;
  civil_from_days(z, y, m, d);
  const YearMonth target = add_months(YearMonth{y, m}, n);
  const YearMonth after = add_months(target, 1);
  const int last_day = static_cast<int>(days_from_civil(after.year, after.month, 1) -
                                        days_from_civil(target.year, target.month, 1));
  return days_from_civil(target.year, target.month, d < last_day ? d : last_day) * kSecondsPerDay +
         sec;
}

// ---- ISO-8601 parsing/formatting (UTC only) ----

// Accepts "YYYY-MM-DD" or "YYYY-MM-DDTHH:MM:SS" with optional trailing 'Z'.
Instant parse_instant(std::string_view s);
std::string format_instant(Instant t);
// Accepts "YYYY-MM".
YearMonth parse_year_month(std::string_view s);

// Shortest round-trip decimal representation.
inline std::string fmt_num(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

// Stable 64-bit hash for config fingerprints.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// ---- deterministic RNG helpers ----
// Raw engine draws only; std::uniform_*_distribution is avoided so streams
// are identical across standard library implementations.

template <class Rng>
std::uint64_t rng_u64(Rng& rng) {
  return static_cast<std::uint64_t>(rng());
}

template <class Rng>
double rng_unit(Rng& rng) {  // [0,1)
  return static_cast<double>(rng_u64(rng) >> 11) * 0x1.0p-53;
}

template <class Rng>
std::int64_t rng_int(Rng& rng, std::int64_t lo, std::int64_t hi) {  // inclusive
  const auto n = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<std::int64_t>(rng_u64(rng) % n);
}

template <class Rng>
double rng_range(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * rng_unit(rng);
}

}  // namespace vitality
