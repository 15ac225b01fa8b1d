#ifndef BILLOPT_ANALYSIS_HPP
#define BILLOPT_ANALYSIS_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "billopt/billing.hpp"
#include "billopt/lp_model.hpp"

namespace billopt {

struct AnalysisConfig {
  SolverConfig solver;
  int year = 2019;
  int workers = 0;  // 0 = hardware concurrency
};

struct MonthResult {
  int month = 0;
  BillBreakdown bill;
  double max_demand_kw = 0.0;
  double discharged_kwh = 0.0;
  double cycles = 0.0;  // full-equivalent cycles: discharged energy / BER
  // The model permits charging and discharging in the same interval; with
  // eta < 1 and NSR >= 0 it is never strictly better, so occurrences are
  // reported rather than forbidden.
  int simultaneous_intervals = 0;
  long iterations = 0;
};

struct AnnualResult {
  std::vector<MonthResult> months;
  double total = 0.0;  // sum of the 12 monthly totals, assembled not re-solved
  double cycles = 0.0;
};

// Twelve independent monthly solves; battery state re-anchors at J_init each
// month. Throws SolveError naming the failing month on any non-optimal solve.
AnnualResult annual_bill(const SiteProfile& site, const TariffSchedule& tariff,
                         const BatterySpec& spec, double pv_capacity_kw,
                         const PvUnitProfile* pv_unit, const AnalysisConfig& config);

// The four sensitivity scenarios: PV capacity sweeps with and without the
// configured battery, and battery power sweeps at fixed two- and four-hour
// durations (BER = duration * BPR at every point).
enum class SweepParameter { pv_capacity_no_bes, pv_capacity, bes_power_2h, bes_power_4h };

const char* to_string(SweepParameter p);
SweepParameter parse_sweep_parameter(const std::string& text);

struct SweepPoint {
  double value = 0.0;  // the swept quantity
  double pv_capacity_kw = 0.0;
  double bes_power_kw = 0.0;
  double bes_energy_kwh = 0.0;
  AnnualResult annual;
};

struct SweepResult {
  std::string tariff;
  SweepParameter parameter = SweepParameter::pv_capacity_no_bes;
  std::vector<SweepPoint> points;
};

// One SweepResult per tariff, points ordered as `values` (must be ascending,
// at least 2). `spec_template` supplies the fixed battery for PV sweeps and
// the efficiency for battery sweeps; `pv_capacity_kw` is the fixed PV size
// for battery sweeps.
std::vector<SweepResult> sweep(const SiteProfile& site,
                               const std::vector<TariffSchedule>& tariffs,
                               const BatterySpec& spec_template, SweepParameter parameter,
                               const std::vector<double>& values, double pv_capacity_kw,
                               const PvUnitProfile& pv_unit, const AnalysisConfig& config);

struct BvaResult {
  AnnualResult with_bes;
  AnnualResult without_bes;
  double value_added = 0.0;  // without_bes.total - with_bes.total
};

// Battery value added: the annual bill without the battery minus the annual
// bill with it, at identical PV capacity. Never meaningfully negative, since
// the idle dispatch is always available.
BvaResult battery_value_added(const SiteProfile& site, const TariffSchedule& tariff,
                              const BatterySpec& spec, double pv_capacity_kw,
                              const PvUnitProfile* pv_unit, const AnalysisConfig& config);

// Deterministic worker pool: runs fn(0..n-1) across threads, rethrowing the
// lowest-index exception. Results must be written to index-addressed slots.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

}  // namespace billopt

#endif
