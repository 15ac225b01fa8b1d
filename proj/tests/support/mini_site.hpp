#ifndef BILLOPT_TESTS_MINI_SITE_HPP
#define BILLOPT_TESTS_MINI_SITE_HPP

#include <cmath>
#include <vector>

#include "billopt/profiles.hpp"
#include "billopt/tariff.hpp"

// Small synthetic year + two-period tariff for analysis-level tests. Hourly
// resolution keeps each monthly LP at 744 intervals.
namespace mini_site {

inline billopt::SiteProfile year_site(int year) {
  billopt::TimeGrid grid = billopt::year_grid(year, 60);
  std::vector<double> base(grid.count), pv(grid.count, 0.0);
  for (int t = 0; t < grid.count; ++t) {
    double hour = grid.interval_start(t).hour;
    base[t] = 60.0 + 40.0 * std::exp(-0.5 * std::pow((hour - 18.0) / 2.5, 2)) +
              10.0 * std::sin(0.211 * t);
    base[t] = std::max(base[t], 5.0);
  }
  return billopt::SiteProfile(grid, std::move(base), std::move(pv));
}

inline billopt::PvUnitProfile year_pv_unit(int year) {
  billopt::TimeGrid grid = billopt::year_grid(year, 60);
  std::vector<double> unit(grid.count, 0.0);
  for (int t = 0; t < grid.count; ++t) {
    double hour = grid.interval_start(t).hour;
    if (hour > 6.0 && hour < 19.0)
      unit[t] = std::max(0.0, std::cos(0.5 * 3.14159265 * (hour - 12.5) / 6.5));
  }
  return billopt::PvUnitProfile(grid, std::move(unit));
}

inline billopt::TariffSchedule two_period_tariff(double peak_rate = 0.20,
                                                 double off_rate = 0.10,
                                                 double dr_max = 8.0,
                                                 double dr_peak = 6.0) {
  billopt::TariffSchedule t;
  t.name = "MINI";
  t.calendar.seasons = {{"all", {1, 1}, {12, 31}}};
  t.calendar.periods = {
      {"peak", {{"all", billopt::DayRule::all, 16, 21}}},
      {"off-peak",
       {{"all", billopt::DayRule::all, 0, 16}, {"all", billopt::DayRule::all, 21, 24}}}};
  t.energy_rate_per_period = {{"peak", peak_rate}, {"off-peak", off_rate}};
  t.monthly_demand_rate = dr_max;
  t.period_demand_rates = {{"peak", dr_peak}};
  t.non_bypassable_charge = 0.025;
  t.validate();
  return t;
}

}  // namespace mini_site

#endif
