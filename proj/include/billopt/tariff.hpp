#ifndef BILLOPT_TARIFF_HPP
#define BILLOPT_TARIFF_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "billopt/time_grid.hpp"

namespace billopt {

// Month-day pair for season boundaries, inclusive on both ends. Ranges may
// wrap the year end (e.g. 10-01 .. 02-29).
struct MonthDay {
  int month = 1;
  int day = 1;
  bool operator==(const MonthDay&) const = default;
  auto operator<=>(const MonthDay&) const = default;
};

struct Season {
  std::string name;
  MonthDay from;
  MonthDay to;
  bool contains(MonthDay md) const {
    if (from <= to) return from <= md && md <= to;
    return md >= from || md <= to;  // wraps year end
  }
};

enum class DayRule { all, weekdays, weekends_and_holidays };

// Clock-hour window [from_hour, to_hour), applicable within one season to the
// dates selected by the day rule. Wrapping windows are expressed as two.
struct PeriodWindow {
  std::string season;
  DayRule days = DayRule::all;
  int from_hour = 0;
  int to_hour = 24;
};

struct TouPeriod {
  std::string name;
  std::vector<PeriodWindow> windows;
};

// Seasons + day classes + period windows. Construction validates that every
// (date, clock time) maps to exactly one period.
struct TouCalendar {
  std::vector<Season> seasons;
  std::set<std::int64_t> holidays;  // day numbers (days_from_civil)
  std::vector<TouPeriod> periods;

  void validate() const;
  const Season& season_of(MonthDay md) const;
  bool is_holiday(const DateTime& dt) const;
  bool is_weekend(const DateTime& dt) const;  // Saturday or Sunday
};

const std::string& period_of(const TouCalendar& calendar, const DateTime& when);

enum class EligibilityOption { none, option_r, option_s };

struct TariffSchedule {
  std::string name;
  std::string timezone;
  TouCalendar calendar;
  std::map<std::string, double> energy_rate_per_period;  // ER, $/kWh
  double monthly_demand_rate = 0.0;                      // DR_max, $/kW
  std::map<std::string, double> period_demand_rates;     // DR_tou(p), $/kW
  std::optional<double> daily_demand_rate;               // $/kW per day's max
  double non_bypassable_charge = 0.0;                    // $/kWh
  EligibilityOption eligibility = EligibilityOption::none;
  std::string notes;

  void validate() const;
};

// Materialized demand-charge periods for one month: label, member intervals
// of the grid, and the $/kW rate. TOU entries come first (one per period with
// a nonzero rate), then one entry per calendar day when a daily rate is set.
struct DemandPeriod {
  std::string label;
  std::vector<int> intervals;
  double rate_per_kw = 0.0;
};

struct DemandPeriodSet {
  std::vector<DemandPeriod> periods;
};

std::vector<double> energy_rate_series(const TariffSchedule& tariff, const TimeGrid& grid);

// NSR(t) = max(ER(t) - non_bypassable_charge, 0).
std::vector<double> nem_sell_rate_series(const TariffSchedule& tariff, const TimeGrid& grid);

DemandPeriodSet demand_periods_for_month(const TariffSchedule& tariff, const TimeGrid& grid);

struct EligibilityResult {
  bool eligible = false;
  std::string reason;
};

// Option R: PV supplies at least 15% of annual energy. Option S: BES power is
// at least 10% of maximum annual demand. Thresholds are inclusive.
EligibilityResult check_eligibility(EligibilityOption option, double annual_pv_energy_kwh,
                                    double annual_consumption_kwh, double bes_power_kw,
                                    double max_annual_demand_kw);

// Tariff file I/O (JSON; schema documented in the README). Round-trip
// parse -> serialize -> parse is lossless.
TariffSchedule parse_tariff(const std::string& json_text, const std::string& origin = "<string>");
std::string serialize_tariff(const TariffSchedule& tariff);
TariffSchedule load_tariff(const std::string& path);
void save_tariff(const TariffSchedule& tariff, const std::string& path);

}  // namespace billopt

#endif
