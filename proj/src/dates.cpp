#include "proxyval/dates.hpp"

#include <cstdio>

namespace proxyval {
namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

int to_int(std::string_view s) {
  int v = 0;
  for (char c : s) v = v * 10 + (c - '0');
  return v;
}

}  // namespace

std::optional<Date> parse_date(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  std::string_view ys = s.substr(0, 4), ms = s.substr(5, 2), ds = s.substr(8, 2);
  if (!all_digits(ys) || !all_digits(ms) || !all_digits(ds)) return std::nullopt;
  std::chrono::year_month_day ymd{std::chrono::year{to_int(ys)},
                                  std::chrono::month{static_cast<unsigned>(to_int(ms))},
                                  std::chrono::day{static_cast<unsigned>(to_int(ds))}};
  if (!ymd.ok()) return std::nullopt;
  return Date{ymd};
}

std::optional<YearMonth> parse_month(std::string_view s) {
  if (s.size() != 7 || s[4] != '-') return std::nullopt;
  std::string_view ys = s.substr(0, 4), ms = s.substr(5, 2);
  if (!all_digits(ys) || !all_digits(ms)) return std::nullopt;
  int m = to_int(ms);
  if (m < 1 || m > 12) return std::nullopt;
  return YearMonth::of(to_int(ys), static_cast<unsigned>(m));
}

std::string format_date(Date d) {
  std::chrono::year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()),
                unsigned(ymd.day()));
  return buf;
}

std::string format_month(YearMonth ym) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%04d-%02u", ym.year(), ym.month());
  return buf;
}

YearMonth month_of(Date d) {
  std::chrono::year_month_day ymd{d};
  return YearMonth::of(int(ymd.year()), unsigned(ymd.month()));
}

Date first_day(YearMonth ym) {
  return Date{std::chrono::year{ym.year()} / std::chrono::month{ym.month()} / 1};
}

}  // namespace proxyval
