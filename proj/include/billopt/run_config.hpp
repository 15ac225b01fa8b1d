#ifndef BILLOPT_RUN_CONFIG_HPP
#define BILLOPT_RUN_CONFIG_HPP

#include <string>
#include <vector>

#include "billopt/analysis.hpp"
#include "billopt/bes.hpp"
#include "billopt/profiles.hpp"
#include "billopt/solver.hpp"
#include "billopt/tariff.hpp"

namespace billopt {

// One structured config file drives a run; flags may override scalar fields.
// Relative paths are resolved against the config file's directory.
struct RunConfig {
  std::string timezone = "UTC";
  int year = 2019;
  int resolution_minutes = 60;          // 15, 30 or 60
  int profile_resolution_minutes = 60;  // native step of the CSV files
  std::string load_profile_path;
  std::string pv_unit_profile_path;
  std::vector<std::string> tariff_paths;
  double pv_capacity_kw = 0.0;
  BatterySpec battery = BatterySpec::idle();
  SolverConfig solver;
  int workers = 0;

  // bill command
  int bill_month = 0;       // 1..12, 0 = not configured
  std::string bill_tariff;  // empty = first tariff

  // sweep / bva commands
  bool has_sweep = false;
  SweepParameter sweep_scenario = SweepParameter::pv_capacity_no_bes;
  std::vector<double> sweep_values;
  std::string baseline_tariff;
  std::string relative_mode = "none";  // none | difference | ratio

  void validate() const;
};

RunConfig load_run_config(const std::string& path);

struct LoadedInputs {
  SiteProfile site;       // base demand at the run resolution; PV series zero
  PvUnitProfile pv_unit;  // per-kW PV output at the run resolution
  std::vector<TariffSchedule> tariffs;

  const TariffSchedule& tariff_by_name(const std::string& name) const;
};

// Reads and resamples the profile CSVs and parses every tariff file.
LoadedInputs load_inputs(const RunConfig& config);

AnalysisConfig analysis_config(const RunConfig& config);

}  // namespace billopt

#endif
