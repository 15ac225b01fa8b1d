#ifndef BILLOPT_PROFILES_HPP
#define BILLOPT_PROFILES_HPP

#include <string>
#include <vector>

#include "billopt/time_grid.hpp"

namespace billopt {

// Consumer base demand D_base(t) and PV generation P_pv(t), aligned to a grid.
// Immutable after construction; safe to share across sweep workers.
struct SiteProfile {
  TimeGrid grid;
  std::vector<double> base_demand_kw;
  std::vector<double> pv_generation_kw;

  SiteProfile(TimeGrid grid_, std::vector<double> base_demand, std::vector<double> pv_generation);
};

// Per-kW-of-capacity PV output; scaling it linearly yields P_pv(t) for any
// plant size, which is what the capacity sweeps rely on.
struct PvUnitProfile {
  TimeGrid grid;
  std::vector<double> per_kw_output;

  PvUnitProfile(TimeGrid grid_, std::vector<double> per_kw_output_);
};

// Reads a `timestamp,kw` CSV (header required) and returns one value per grid
// interval, in order. Any missing/duplicate/misaligned row or non-numeric
// value raises ParseError naming the first offending row. Negative readings
// are rejected: base demand is gross consumption, export shows up only in
// net demand.
std::vector<double> parse_profile_csv(const std::string& path, const TimeGrid& expected_grid,
                                      const std::string& value_column = "kw");

void write_profile_csv(const std::string& path, const TimeGrid& grid,
                       const std::vector<double>& values, const std::string& value_column = "kw");

// Power series resampling. Downsampling averages within each coarse interval;
// upsampling repeats the coarse value (piecewise-constant power), so interval
// energy is conserved.
std::vector<double> resample(const std::vector<double>& series, int from_step_minutes,
                             int to_step_minutes);

// P_pv(t) = per_kw_output(t) * capacity_kw.
std::vector<double> scale_pv(const PvUnitProfile& unit, double capacity_kw);

}  // namespace billopt

#endif
