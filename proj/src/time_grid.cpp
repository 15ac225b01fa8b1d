#include "billopt/time_grid.hpp"

#include <charconv>
#include <cstdio>

namespace billopt {

bool is_leap_year(int year) {
  return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

int days_in_month(int year, int month) {
  static const int lengths[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month < 1 || month > 12) throw InvalidInput("month out of range: " + std::to_string(month));
  if (month == 2 && is_leap_year(year)) return 29;
  return lengths[month - 1];
}

// Howard Hinnant's civil-from-days / days-from-civil algorithms.
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

static void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
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

std::int64_t minutes_since_epoch(const DateTime& dt) {
  return days_from_civil(dt.year, dt.month, dt.day) * 1440 + dt.hour * 60 + dt.minute;
}

DateTime datetime_from_minutes(std::int64_t minutes) {
  std::int64_t days = minutes / 1440;
  std::int64_t rem = minutes % 1440;
  if (rem < 0) {
    rem += 1440;
    days -= 1;
  }
  DateTime dt;
  civil_from_days(days, dt.year, dt.month, dt.day);
  dt.hour = static_cast<int>(rem / 60);
  dt.minute = static_cast<int>(rem % 60);
  return dt;
}

int day_of_week(int year, int month, int day) {
  std::int64_t z = days_from_civil(year, month, day);
  // 1970-01-01 was a Thursday (= 3 with Monday = 0).
  return static_cast<int>(((z + 3) % 7 + 7) % 7);
}

std::string format_iso(const DateTime& dt) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d", dt.year, dt.month, dt.day, dt.hour,
                dt.minute);
  return buf;
}

std::string format_iso_date(const DateTime& dt) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", dt.year, dt.month, dt.day);
  return buf;
}

namespace {

int parse_int_field(std::string_view text, size_t pos, size_t len, std::string_view what) {
  if (pos + len > text.size()) throw ParseError("truncated timestamp: '" + std::string(text) + "'");
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, value);
  if (ec != std::errc() || ptr != text.data() + pos + len)
    throw ParseError("bad " + std::string(what) + " in timestamp: '" + std::string(text) + "'");
  return value;
}

void expect_char(std::string_view text, size_t pos, char c) {
  if (pos >= text.size() || text[pos] != c)
    throw ParseError("malformed timestamp: '" + std::string(text) + "'");
}

}  // namespace

DateTime parse_iso_date(std::string_view text) {
  if (text.size() != 10) throw ParseError("malformed date: '" + std::string(text) + "'");
  DateTime dt;
  dt.year = parse_int_field(text, 0, 4, "year");
  expect_char(text, 4, '-');
  dt.month = parse_int_field(text, 5, 2, "month");
  expect_char(text, 7, '-');
  dt.day = parse_int_field(text, 8, 2, "day");
  if (dt.month < 1 || dt.month > 12 || dt.day < 1 || dt.day > days_in_month(dt.year, dt.month))
    throw ParseError("date out of range: '" + std::string(text) + "'");
  return dt;
}

DateTime parse_iso_datetime(std::string_view text) {
  if (text.size() != 16 && text.size() != 19)
    throw ParseError("malformed timestamp: '" + std::string(text) + "'");
  DateTime dt = parse_iso_date(text.substr(0, 10));
  expect_char(text, 10, 'T');
  dt.hour = parse_int_field(text, 11, 2, "hour");
  expect_char(text, 13, ':');
  dt.minute = parse_int_field(text, 14, 2, "minute");
  if (text.size() == 19) {
    expect_char(text, 16, ':');
    int sec = parse_int_field(text, 17, 2, "second");
    if (sec != 0) throw ParseError("sub-minute timestamps unsupported: '" + std::string(text) + "'");
  }
  if (dt.hour > 23 || dt.minute > 59)
    throw ParseError("time out of range: '" + std::string(text) + "'");
  return dt;
}

TimeGrid::TimeGrid(DateTime start_, int step_minutes_, int count_)
    : start(start_), step_minutes(step_minutes_), count(count_) {
  if (step_minutes <= 0 || 60 % step_minutes != 0)
    throw InvalidInput("grid step must divide 60, got " + std::to_string(step_minutes));
  if (count < 1) throw InvalidInput("grid needs at least one interval");
}

DateTime TimeGrid::interval_start(int t) const {
  return datetime_from_minutes(minutes_since_epoch(start) +
                               static_cast<std::int64_t>(t) * step_minutes);
}

TimeGrid month_grid(int year, int month, int step_minutes) {
  int days = days_in_month(year, month);
  return TimeGrid({year, month, 1, 0, 0}, step_minutes, days * 1440 / step_minutes);
}

TimeGrid year_grid(int year, int step_minutes) {
  int days = is_leap_year(year) ? 366 : 365;
  return TimeGrid({year, 1, 1, 0, 0}, step_minutes, days * 1440 / step_minutes);
}

}  // namespace billopt
