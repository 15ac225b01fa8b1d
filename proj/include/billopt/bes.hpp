#ifndef BILLOPT_BES_HPP
#define BILLOPT_BES_HPP

#include <string>
#include <vector>

#include "billopt/time_grid.hpp"

namespace billopt {

// Battery parameters. Efficiency is applied entirely on charging, matching
// the SOC recursion used by both the optimizer and the billing oracle.
struct BatterySpec {
  double energy_rating_kwh = 0.0;       // BER
  double power_rating_kw = 0.0;         // BPR
  double round_trip_efficiency = 0.85;  // eta, (0, 1]
  double soc_min_kwh = 0.0;             // J_min
  double soc_max_kwh = 0.0;             // J_max
  double soc_init_kwh = 0.0;            // J_init

  void validate() const;

  // Fills J_min = 0, J_max = BER, J_init = BER/2 unless overridden.
  static BatterySpec make(double energy_rating_kwh, double power_rating_kw,
                          double round_trip_efficiency = 0.85);
  static BatterySpec idle() { return make(0.0, 0.0); }
};

// Per-interval charge/discharge powers and the resulting SOC trajectory.
// soc_kwh[t] is the state of charge at the END of interval t.
struct BatteryDispatch {
  TimeGrid grid;
  std::vector<double> charge_kw;     // P_cha(t) >= 0
  std::vector<double> discharge_kw;  // P_dis(t) >= 0
  std::vector<double> soc_kwh;       // J(t)
};

// J(t) = J(t-1) + step_hours * (eta * P_cha - P_dis).
double soc_step(double prev_soc_kwh, double charge_kw, double discharge_kw, double eta,
                double step_hours);

// Idle dispatch: zero power, SOC pinned at J_init.
BatteryDispatch idle_dispatch(const BatterySpec& spec, const TimeGrid& grid);

// Rebuilds the SOC series from J_init via soc_step.
std::vector<double> recompute_soc(const BatterySpec& spec, const TimeGrid& grid,
                                  const std::vector<double>& charge_kw,
                                  const std::vector<double>& discharge_kw);

struct ConstraintViolation {
  std::string constraint;  // "soc_recursion", "terminal_soc", "soc_bounds", ...
  int interval = -1;       // -1 for whole-horizon checks
  double amount = 0.0;     // how far past the limit, in the constraint's units
};

struct ValidationResult {
  std::vector<ConstraintViolation> violations;
  bool ok() const { return violations.empty(); }
  std::string summary(size_t max_items = 8) const;
};

// Checks the dispatch against the battery operating envelope within
// `tolerance`: SOC recursion and terminal condition, SOC bounds, per-step
// charge/discharge energy room, combined power rating, and the no-export
// rule (discharge never exceeds base demand plus concurrent charging).
ValidationResult validate_dispatch(const BatterySpec& spec, const BatteryDispatch& dispatch,
                                   const std::vector<double>& base_demand_kw, double tolerance);

}  // namespace billopt

#endif
