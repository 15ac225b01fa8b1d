#ifndef BILLOPT_LP_MODEL_HPP
#define BILLOPT_LP_MODEL_HPP

#include <string>
#include <vector>

#include "billopt/bes.hpp"
#include "billopt/lp_problem.hpp"
#include "billopt/profiles.hpp"
#include "billopt/solver.hpp"
#include "billopt/tariff.hpp"

namespace billopt {

// Everything the monthly bill minimization needs, with all series aligned to
// the month's grid.
struct MonthlyInstance {
  TimeGrid grid;
  std::vector<double> base_demand_kw;   // D_base(t)
  std::vector<double> pv_kw;            // P_pv(t)
  BatterySpec spec;
  std::vector<double> energy_rate;      // ER(t), $/kWh
  std::vector<double> nem_sell_rate;    // NSR(t), $/kWh
  double monthly_demand_rate = 0.0;     // DR_max, $/kW
  DemandPeriodSet demand_periods;
  std::string label;

  void validate() const;
};

// Slices the site series to the given month, scales PV from the unit profile
// (or slices the site's own PV series when pv_unit is null), and materializes
// the tariff's rate series and demand periods.
MonthlyInstance build_instance(const SiteProfile& site, const TariffSchedule& tariff,
                               const BatterySpec& spec, int year, int month,
                               double pv_capacity_kw, const PvUnitProfile* pv_unit);

// Variable layout of the assembled LP: for each t, net demand (free), grid
// import (>= 0), SOC, charge and discharge powers; then the monthly maximum
// demand scalar and one maximum per demand-charge period.
struct LpLayout {
  int horizon = 0;
  int period_count = 0;
  int dnet(int t) const { return t; }
  int dpos(int t) const { return horizon + t; }
  int soc(int t) const { return 2 * horizon + t; }
  int chg(int t) const { return 3 * horizon + t; }
  int dis(int t) const { return 4 * horizon + t; }
  int dmax() const { return 5 * horizon; }
  int dtou(int p) const { return 5 * horizon + 1 + p; }
  int total() const { return 5 * horizon + 1 + period_count; }
};

LpLayout lp_layout(const MonthlyInstance& inst);

LpProblem assemble_lp(const MonthlyInstance& inst);

struct SolutionBundle {
  SolveStatus status = SolveStatus::numerical_failure;
  double objective_value = 0.0;
  BatteryDispatch dispatch;
  std::vector<double> net_demand_kw;                       // D_net(t)
  std::vector<double> import_kw;                           // D_net+(t)
  double max_demand_kw = 0.0;                              // D_max
  std::vector<std::pair<std::string, double>> tou_demand_kw;  // D_tou(p)
  long iterations = 0;
  std::string message;
};

// Maps raw solver output back to a dispatch and cross-checks it: the net
// demand identity, tightness of the demand maxima under positive rates, the
// battery operating envelope, and agreement between the LP objective and the
// independently computed bill. Any failed check demotes the result to
// numerical-failure with diagnostics.
SolutionBundle extract_solution(const MonthlyInstance& inst, const LpProblem& lp,
                                const RawSolution& raw);

// assemble_lp + solve + extract_solution.
SolutionBundle solve_month(const MonthlyInstance& inst, const SolverConfig& config = {});

}  // namespace billopt

#endif
