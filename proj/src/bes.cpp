#include "billopt/bes.hpp"

#include <cmath>
#include <sstream>

namespace billopt {

void BatterySpec::validate() const {
  for (double v : {energy_rating_kwh, power_rating_kw, soc_min_kwh, soc_max_kwh, soc_init_kwh})
    if (!std::isfinite(v)) throw InvalidInput("battery spec has a non-finite field");
  if (energy_rating_kwh < 0.0) throw InvalidInput("BER must be >= 0");
  if (power_rating_kw < 0.0) throw InvalidInput("BPR must be >= 0");
  if (!(round_trip_efficiency > 0.0 && round_trip_efficiency <= 1.0))
    throw InvalidInput("round-trip efficiency must lie in (0, 1]");
  if (!(0.0 <= soc_min_kwh && soc_min_kwh <= soc_init_kwh && soc_init_kwh <= soc_max_kwh &&
        soc_max_kwh <= energy_rating_kwh))
    throw InvalidInput("SOC bounds must satisfy 0 <= J_min <= J_init <= J_max <= BER");
}

BatterySpec BatterySpec::make(double energy_rating_kwh, double power_rating_kw,
                              double round_trip_efficiency) {
  BatterySpec spec;
  spec.energy_rating_kwh = energy_rating_kwh;
  spec.power_rating_kw = power_rating_kw;
  spec.round_trip_efficiency = round_trip_efficiency;
  spec.soc_min_kwh = 0.0;
  spec.soc_max_kwh = energy_rating_kwh;
  spec.soc_init_kwh = 0.5 * energy_rating_kwh;
  spec.validate();
  return spec;
}

double soc_step(double prev_soc_kwh, double charge_kw, double discharge_kw, double eta,
                double step_hours) {
  return prev_soc_kwh + step_hours * (eta * charge_kw - discharge_kw);
}

BatteryDispatch idle_dispatch(const BatterySpec& spec, const TimeGrid& grid) {
  BatteryDispatch d;
  d.grid = grid;
  d.charge_kw.assign(grid.count, 0.0);
  d.discharge_kw.assign(grid.count, 0.0);
  d.soc_kwh.assign(grid.count, spec.soc_init_kwh);
  return d;
}

std::vector<double> recompute_soc(const BatterySpec& spec, const TimeGrid& grid,
                                  const std::vector<double>& charge_kw,
                                  const std::vector<double>& discharge_kw) {
  if (charge_kw.size() != static_cast<size_t>(grid.count) || discharge_kw.size() != charge_kw.size())
    throw InvalidInput("dispatch series length does not match grid");
  std::vector<double> soc(grid.count);
  double prev = spec.soc_init_kwh;
  double h = grid.step_hours();
  for (int t = 0; t < grid.count; ++t) {
    prev = soc_step(prev, charge_kw[t], discharge_kw[t], spec.round_trip_efficiency, h);
    soc[t] = prev;
  }
  return soc;
}

std::string ValidationResult::summary(size_t max_items) const {
  if (violations.empty()) return "ok";
  std::ostringstream out;
  out << violations.size() << " violation(s):";
  for (size_t i = 0; i < violations.size() && i < max_items; ++i) {
    const auto& v = violations[i];
    out << " [" << v.constraint;
    if (v.interval >= 0) out << " t=" << v.interval;
    out << " by " << v.amount << "]";
  }
  if (violations.size() > max_items) out << " ...";
  return out.str();
}

ValidationResult validate_dispatch(const BatterySpec& spec, const BatteryDispatch& dispatch,
                                   const std::vector<double>& base_demand_kw, double tolerance) {
  spec.validate();
  size_t n = static_cast<size_t>(dispatch.grid.count);
  if (dispatch.charge_kw.size() != n || dispatch.discharge_kw.size() != n ||
      dispatch.soc_kwh.size() != n || base_demand_kw.size() != n)
    throw InvalidInput("dispatch/base-demand series lengths do not match the grid");

  ValidationResult result;
  auto flag = [&](const char* constraint, int t, double amount) {
    if (amount > tolerance) result.violations.push_back({constraint, t, amount});
  };

  double h = dispatch.grid.step_hours();
  double eta = spec.round_trip_efficiency;
  double prev = spec.soc_init_kwh;
  for (size_t t = 0; t < n; ++t) {
    double cha = dispatch.charge_kw[t];
    double dis = dispatch.discharge_kw[t];
    double soc = dispatch.soc_kwh[t];

    flag("charge_nonnegative", t, -cha);
    flag("discharge_nonnegative", t, -dis);
    flag("soc_recursion", t, std::fabs(soc - soc_step(prev, cha, dis, eta, h)));
    flag("soc_bounds", t, std::max(spec.soc_min_kwh - soc, soc - spec.soc_max_kwh));
    flag("charge_energy_room", t, h * eta * cha - (spec.energy_rating_kwh - prev));
    flag("discharge_energy_room", t, h * dis - prev);
    flag("power_rating", t, cha + dis - spec.power_rating_kw);
    flag("no_export", t, dis - (base_demand_kw[t] + cha));
    prev = soc;
  }
  flag("terminal_soc", -1, std::fabs(prev - spec.soc_init_kwh));
  return result;
}

}  // namespace billopt
