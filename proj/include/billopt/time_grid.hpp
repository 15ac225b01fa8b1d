#ifndef BILLOPT_TIME_GRID_HPP
#define BILLOPT_TIME_GRID_HPP

#include <cstdint>
#include <string>
#include <string_view>

#include "billopt/common.hpp"

namespace billopt {

// Naive civil timestamp, minute precision. All tariff logic runs in the
// configured local timezone, so no UTC offsets are tracked here; profile
// files must already be expressed in that timezone, one row per interval.
struct DateTime {
  int year = 1970;
  int month = 1;  // 1..12
  int day = 1;    // 1..31
  int hour = 0;   // 0..23
  int minute = 0; // 0..59

  bool operator==(const DateTime&) const = default;
};

bool is_leap_year(int year);
int days_in_month(int year, int month);

// Days since 1970-01-01 of the civil date (proleptic Gregorian).
std::int64_t days_from_civil(int year, int month, int day);

// Minutes since 1970-01-01T00:00.
std::int64_t minutes_since_epoch(const DateTime& dt);
DateTime datetime_from_minutes(std::int64_t minutes);

// 0 = Monday ... 6 = Sunday.
int day_of_week(int year, int month, int day);

// "YYYY-MM-DDTHH:MM"; a trailing ":SS" is accepted on input when SS == 00.
std::string format_iso(const DateTime& dt);
DateTime parse_iso_datetime(std::string_view text);

// "YYYY-MM-DD"
std::string format_iso_date(const DateTime& dt);
DateTime parse_iso_date(std::string_view text);

// The month's ordered sequence of fixed-length intervals. Interval t covers
// [start + t*step, start + (t+1)*step).
struct TimeGrid {
  DateTime start;
  int step_minutes = 15;
  int count = 0;

  TimeGrid() = default;
  TimeGrid(DateTime start_, int step_minutes_, int count_);

  DateTime interval_start(int t) const;
  DateTime end() const { return interval_start(count); }
  double step_hours() const { return step_minutes / 60.0; }

  bool operator==(const TimeGrid&) const = default;
};

// Grid covering one calendar month.
TimeGrid month_grid(int year, int month, int step_minutes);

// Grid covering a full calendar year starting Jan 1.
TimeGrid year_grid(int year, int step_minutes);

}  // namespace billopt

#endif
