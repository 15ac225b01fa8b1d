#include "billopt/tariff.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace billopt {

namespace {

bool rule_applies(DayRule rule, bool weekend_or_holiday) {
  switch (rule) {
    case DayRule::all: return true;
    case DayRule::weekdays: return !weekend_or_holiday;
    case DayRule::weekends_and_holidays: return weekend_or_holiday;
  }
  return false;
}

}  // namespace

const Season& TouCalendar::season_of(MonthDay md) const {
  const Season* found = nullptr;
  for (const auto& s : seasons) {
    if (s.contains(md)) {
      if (found)
        throw InvalidInput("date " + std::to_string(md.month) + "-" + std::to_string(md.day) +
                           " falls in seasons '" + found->name + "' and '" + s.name + "'");
      found = &s;
    }
  }
  if (!found)
    throw InvalidInput("date " + std::to_string(md.month) + "-" + std::to_string(md.day) +
                       " is not covered by any season");
  return *found;
}

bool TouCalendar::is_holiday(const DateTime& dt) const {
  return holidays.count(days_from_civil(dt.year, dt.month, dt.day)) > 0;
}

bool TouCalendar::is_weekend(const DateTime& dt) const {
  return day_of_week(dt.year, dt.month, dt.day) >= 5;
}

void TouCalendar::validate() const {
  if (seasons.empty()) throw InvalidInput("calendar has no seasons");
  if (periods.empty()) throw InvalidInput("calendar has no periods");

  std::set<std::string> period_names;
  for (const auto& p : periods) {
    if (p.name.empty() || p.name.find(',') != std::string::npos)
      throw InvalidInput("period name '" + p.name + "' is empty or contains a comma");
    if (!period_names.insert(p.name).second)
      throw InvalidInput("duplicate period name '" + p.name + "'");
    for (const auto& w : p.windows) {
      if (w.from_hour < 0 || w.to_hour > 24 || w.from_hour >= w.to_hour)
        throw InvalidInput("period '" + p.name + "' has a bad hour range [" +
                           std::to_string(w.from_hour) + ", " + std::to_string(w.to_hour) +
                           "); wrapping ranges must be split in two");
      bool season_known = false;
      for (const auto& s : seasons) season_known |= (s.name == w.season);
      if (!season_known)
        throw InvalidInput("period '" + p.name + "' references unknown season '" + w.season + "'");
    }
  }

  std::set<std::string> season_names;
  for (const auto& s : seasons) {
    if (s.name.empty()) throw InvalidInput("season with empty name");
    if (!season_names.insert(s.name).second)
      throw InvalidInput("duplicate season name '" + s.name + "'");
  }

  // Every month-day (leap year included) must fall in exactly one season.
  for (int month = 1; month <= 12; ++month) {
    for (int day = 1; day <= days_in_month(2020, month); ++day) {
      season_of({month, day});
    }
  }

  // Within each (season, day class), the windows must tile [0, 24) exactly.
  for (const auto& s : seasons) {
    for (bool weekend_or_holiday : {false, true}) {
      int cover[24] = {0};
      for (const auto& p : periods) {
        for (const auto& w : p.windows) {
          if (w.season != s.name || !rule_applies(w.days, weekend_or_holiday)) continue;
          for (int h = w.from_hour; h < w.to_hour; ++h) ++cover[h];
        }
      }
      for (int h = 0; h < 24; ++h) {
        if (cover[h] != 1)
          throw InvalidInput("season '" + s.name + "' (" +
                             (weekend_or_holiday ? "weekend/holiday" : "weekday") + ") hour " +
                             std::to_string(h) +
                             (cover[h] == 0 ? " is not covered by any period"
                                            : " is covered by more than one period"));
      }
    }
  }
}

const std::string& period_of(const TouCalendar& calendar, const DateTime& when) {
  const Season& season = calendar.season_of({when.month, when.day});
  bool weekend_or_holiday = calendar.is_weekend(when) || calendar.is_holiday(when);
  for (const auto& p : calendar.periods) {
    for (const auto& w : p.windows) {
      if (w.season != season.name || !rule_applies(w.days, weekend_or_holiday)) continue;
      if (when.hour >= w.from_hour && when.hour < w.to_hour) return p.name;
    }
  }
  throw InvalidInput("calendar does not cover " + format_iso(when));
}

void TariffSchedule::validate() const {
  calendar.validate();
  if (name.empty() || name.find(',') != std::string::npos)
    throw InvalidInput("tariff name '" + name + "' is empty or contains a comma");
  if (!std::isfinite(monthly_demand_rate) || monthly_demand_rate < 0.0)
    throw InvalidInput("DR_max must be finite and >= 0");
  if (!std::isfinite(non_bypassable_charge) || non_bypassable_charge < 0.0)
    throw InvalidInput("non-bypassable charge must be finite and >= 0");
  if (daily_demand_rate && (!std::isfinite(*daily_demand_rate) || *daily_demand_rate < 0.0))
    throw InvalidInput("daily demand rate must be finite and >= 0");

  std::set<std::string> known;
  for (const auto& p : calendar.periods) known.insert(p.name);
  for (const auto& p : calendar.periods) {
    if (!energy_rate_per_period.count(p.name))
      throw InvalidInput("period '" + p.name + "' has no energy rate");
  }
  for (const auto& [period, rate] : energy_rate_per_period) {
    if (!known.count(period))
      throw InvalidInput("energy rate names unknown period '" + period + "'");
    if (!std::isfinite(rate) || rate < 0.0)
      throw InvalidInput("energy rate for '" + period + "' must be finite and >= 0");
  }
  for (const auto& [period, rate] : period_demand_rates) {
    if (!known.count(period))
      throw InvalidInput("demand rate names unknown period '" + period + "'");
    if (!std::isfinite(rate) || rate < 0.0)
      throw InvalidInput("demand rate for '" + period + "' must be finite and >= 0");
  }
}

std::vector<double> energy_rate_series(const TariffSchedule& tariff, const TimeGrid& grid) {
  std::vector<double> out(grid.count);
  for (int t = 0; t < grid.count; ++t) {
    const std::string& period = period_of(tariff.calendar, grid.interval_start(t));
    auto it = tariff.energy_rate_per_period.find(period);
    if (it == tariff.energy_rate_per_period.end())
      throw InvalidInput("no energy rate for period '" + period + "'");
    out[t] = it->second;
  }
  return out;
}

std::vector<double> nem_sell_rate_series(const TariffSchedule& tariff, const TimeGrid& grid) {
  std::vector<double> out = energy_rate_series(tariff, grid);
  for (double& v : out) v = std::max(v - tariff.non_bypassable_charge, 0.0);
  return out;
}

DemandPeriodSet demand_periods_for_month(const TariffSchedule& tariff, const TimeGrid& grid) {
  DemandPeriodSet set;
  std::vector<const std::string*> interval_period(grid.count);
  for (int t = 0; t < grid.count; ++t)
    interval_period[t] = &period_of(tariff.calendar, grid.interval_start(t));

  for (const auto& p : tariff.calendar.periods) {
    auto it = tariff.period_demand_rates.find(p.name);
    if (it == tariff.period_demand_rates.end() || it->second == 0.0) continue;
    DemandPeriod entry;
    entry.label = p.name;
    entry.rate_per_kw = it->second;
    for (int t = 0; t < grid.count; ++t)
      if (*interval_period[t] == p.name) entry.intervals.push_back(t);
    set.periods.push_back(std::move(entry));
  }

  if (tariff.daily_demand_rate && *tariff.daily_demand_rate > 0.0) {
    std::int64_t current_day = std::numeric_limits<std::int64_t>::min();
    for (int t = 0; t < grid.count; ++t) {
      DateTime ts = grid.interval_start(t);
      std::int64_t day = days_from_civil(ts.year, ts.month, ts.day);
      if (day != current_day) {
        DemandPeriod entry;
        entry.label = "day-" + format_iso_date(ts);
        entry.rate_per_kw = *tariff.daily_demand_rate;
        set.periods.push_back(std::move(entry));
        current_day = day;
      }
      set.periods.back().intervals.push_back(t);
    }
  }
  return set;
}

EligibilityResult check_eligibility(EligibilityOption option, double annual_pv_energy_kwh,
                                    double annual_consumption_kwh, double bes_power_kw,
                                    double max_annual_demand_kw) {
  for (double v : {annual_pv_energy_kwh, annual_consumption_kwh, bes_power_kw, max_annual_demand_kw})
    if (!std::isfinite(v) || v < 0.0) throw InvalidInput("eligibility inputs must be finite and >= 0");

  std::ostringstream reason;
  switch (option) {
    case EligibilityOption::none:
      return {true, "base TOU rates have no asset requirement"};
    case EligibilityOption::option_r: {
      if (annual_consumption_kwh <= 0.0)
        throw InvalidInput("Option R check requires positive annual consumption");
      double share = annual_pv_energy_kwh / annual_consumption_kwh;
      // 1e-12 relative slack keeps the inclusive threshold inclusive under
      // floating-point division.
      bool ok = share >= 0.15 * (1.0 - 1e-12);
      reason << "PV supplies " << share * 100.0 << "% of annual energy; Option R requires >= 15%";
      return {ok, reason.str()};
    }
    case EligibilityOption::option_s: {
      bool ok = bes_power_kw >= 0.10 * max_annual_demand_kw * (1.0 - 1e-12);
      reason << "BES power " << bes_power_kw << " kW vs 10% of max annual demand "
             << 0.10 * max_annual_demand_kw << " kW; Option S requires at least 10%";
      return {ok, reason.str()};
    }
  }
  throw InvalidInput("unknown eligibility option");
}

// --- file format ------------------------------------------------------------

namespace {

using nlohmann::json;

MonthDay parse_month_day(const std::string& text) {
  if (text.size() != 5 || text[2] != '-')
    throw ParseError("bad month-day '" + text + "' (want MM-DD)");
  MonthDay md;
  md.month = std::stoi(text.substr(0, 2));
  md.day = std::stoi(text.substr(3, 2));
  if (md.month < 1 || md.month > 12 || md.day < 1 || md.day > days_in_month(2020, md.month))
    throw ParseError("month-day out of range: '" + text + "'");
  return md;
}

std::string format_month_day(MonthDay md) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%02d-%02d", md.month, md.day);
  return buf;
}

DayRule parse_day_rule(const std::string& text) {
  if (text == "all") return DayRule::all;
  if (text == "weekdays") return DayRule::weekdays;
  if (text == "weekends_and_holidays") return DayRule::weekends_and_holidays;
  throw ParseError("unknown day rule '" + text + "'");
}

std::string format_day_rule(DayRule rule) {
  switch (rule) {
    case DayRule::all: return "all";
    case DayRule::weekdays: return "weekdays";
    case DayRule::weekends_and_holidays: return "weekends_and_holidays";
  }
  return "all";
}

EligibilityOption parse_eligibility(const std::string& text) {
  if (text == "none") return EligibilityOption::none;
  if (text == "option_r") return EligibilityOption::option_r;
  if (text == "option_s") return EligibilityOption::option_s;
  throw ParseError("unknown eligibility option '" + text + "'");
}

std::string format_eligibility(EligibilityOption opt) {
  switch (opt) {
    case EligibilityOption::none: return "none";
    case EligibilityOption::option_r: return "option_r";
    case EligibilityOption::option_s: return "option_s";
  }
  return "none";
}

}  // namespace

TariffSchedule parse_tariff(const std::string& json_text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(origin + ": " + e.what());
  }
  try {
    TariffSchedule t;
    t.name = doc.at("name").get<std::string>();
    t.timezone = doc.value("timezone", std::string("UTC"));
    t.notes = doc.value("notes", std::string());
    t.eligibility = parse_eligibility(doc.value("eligibility", std::string("none")));
    t.non_bypassable_charge = doc.value("non_bypassable_charge_per_kwh", 0.0);
    t.monthly_demand_rate = doc.value("demand_rate_max_per_kw", 0.0);
    if (doc.contains("daily_demand_rate_per_kw"))
      t.daily_demand_rate = doc.at("daily_demand_rate_per_kw").get<double>();

    for (const auto& s : doc.at("seasons")) {
      Season season;
      season.name = s.at("name").get<std::string>();
      season.from = parse_month_day(s.at("from").get<std::string>());
      season.to = parse_month_day(s.at("to").get<std::string>());
      t.calendar.seasons.push_back(std::move(season));
    }
    if (doc.contains("holidays")) {
      for (const auto& h : doc.at("holidays")) {
        DateTime d = parse_iso_date(h.get<std::string>());
        t.calendar.holidays.insert(days_from_civil(d.year, d.month, d.day));
      }
    }
    for (const auto& p : doc.at("periods")) {
      TouPeriod period;
      period.name = p.at("name").get<std::string>();
      for (const auto& w : p.at("windows")) {
        PeriodWindow window;
        window.season = w.at("season").get<std::string>();
        window.days = parse_day_rule(w.value("days", std::string("all")));
        const auto& hours = w.at("hours");
        if (!hours.is_array() || hours.size() != 2)
          throw ParseError("window 'hours' must be [from, to)");
        window.from_hour = hours[0].get<int>();
        window.to_hour = hours[1].get<int>();
        period.windows.push_back(window);
      }
      t.calendar.periods.push_back(std::move(period));
    }
    for (const auto& [period, rate] : doc.at("energy_rates_per_kwh").items())
      t.energy_rate_per_period[period] = rate.get<double>();
    if (doc.contains("demand_rates_tou_per_kw"))
      for (const auto& [period, rate] : doc.at("demand_rates_tou_per_kw").items())
        t.period_demand_rates[period] = rate.get<double>();

    t.validate();
    return t;
  } catch (const json::exception& e) {
    throw ParseError(origin + ": " + e.what());
  }
}

std::string serialize_tariff(const TariffSchedule& t) {
  json doc;
  doc["name"] = t.name;
  doc["timezone"] = t.timezone;
  if (!t.notes.empty()) doc["notes"] = t.notes;
  doc["eligibility"] = format_eligibility(t.eligibility);
  doc["non_bypassable_charge_per_kwh"] = t.non_bypassable_charge;
  doc["demand_rate_max_per_kw"] = t.monthly_demand_rate;
  if (t.daily_demand_rate) doc["daily_demand_rate_per_kw"] = *t.daily_demand_rate;

  doc["seasons"] = json::array();
  for (const auto& s : t.calendar.seasons)
    doc["seasons"].push_back(
        {{"name", s.name}, {"from", format_month_day(s.from)}, {"to", format_month_day(s.to)}});

  doc["holidays"] = json::array();
  for (std::int64_t day : t.calendar.holidays) {
    DateTime d = datetime_from_minutes(day * 1440);
    doc["holidays"].push_back(format_iso_date(d));
  }

  doc["periods"] = json::array();
  for (const auto& p : t.calendar.periods) {
    json windows = json::array();
    for (const auto& w : p.windows)
      windows.push_back({{"season", w.season},
                         {"days", format_day_rule(w.days)},
                         {"hours", {w.from_hour, w.to_hour}}});
    doc["periods"].push_back({{"name", p.name}, {"windows", windows}});
  }

  doc["energy_rates_per_kwh"] = json::object();
  for (const auto& [period, rate] : t.energy_rate_per_period)
    doc["energy_rates_per_kwh"][period] = rate;
  doc["demand_rates_tou_per_kw"] = json::object();
  for (const auto& [period, rate] : t.period_demand_rates)
    doc["demand_rates_tou_per_kw"][period] = rate;

  return doc.dump(2) + "\n";
}

TariffSchedule load_tariff(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open tariff file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_tariff(buf.str(), path);
}

void save_tariff(const TariffSchedule& tariff, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write tariff file: " + path);
  out << serialize_tariff(tariff);
}

}  // namespace billopt
