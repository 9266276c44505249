#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace proxyval {

// Day-precision calendar date.
using Date = std::chrono::sys_days;

// Calendar month as a flat index (year*12 + month-1) so ranges and gaps are
// plain integer arithmetic.
struct YearMonth {
  int index = 0;

  static YearMonth of(int year, unsigned month) {
    return YearMonth{year * 12 + static_cast<int>(month) - 1};
  }
  int year() const { return index >= 0 ? index / 12 : (index - 11) / 12; }
  unsigned month() const { return static_cast<unsigned>(index - year() * 12) + 1; }

  YearMonth& operator+=(int m) {
    index += m;
    return *this;
  }
  friend YearMonth operator+(YearMonth ym, int m) { return YearMonth{ym.index + m}; }
  friend int operator-(YearMonth a, YearMonth b) { return a.index - b.index; }
  auto operator<=>(const YearMonth&) const = default;
};

// Strict ISO-8601 parsers; nullopt on malformed or non-existent dates.
std::optional<Date> parse_date(std::string_view s);      // YYYY-MM-DD
std::optional<YearMonth> parse_month(std::string_view s);  // YYYY-MM

std::string format_date(Date d);
std::string format_month(YearMonth ym);

YearMonth month_of(Date d);
Date first_day(YearMonth ym);

}  // namespace proxyval
