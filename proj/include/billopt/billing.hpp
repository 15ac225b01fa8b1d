#ifndef BILLOPT_BILLING_HPP
#define BILLOPT_BILLING_HPP

#include <string>
#include <utility>
#include <vector>

#include "billopt/lp_model.hpp"

namespace billopt {

// The bill for one month: demand charges (monthly maximum plus per-period
// maxima), the energy charge on imports, and the NEM revenue on exports.
// `total` is the exact sum of the components.
struct BillBreakdown {
  double max_demand_charge = 0.0;
  std::vector<std::pair<std::string, double>> tou_demand_charges;
  double energy_charge = 0.0;
  double nem_revenue = 0.0;  // <= 0 as a bill contribution
  double total = 0.0;

  double tou_demand_total() const;
};

// Evaluates the bill of a fixed, already-validated net-demand series.
// Shared by the dispatch oracle and the enumeration oracle so both sum in
// the same order.
BillBreakdown bill_of_net_demand(const MonthlyInstance& inst, const std::vector<double>& net_kw);

// Validates the dispatch against the instance's battery envelope (throwing
// with the violation list if it fails), then prices the resulting net
// demand. This is the verification oracle for the LP objective.
BillBreakdown bill_of_dispatch(const MonthlyInstance& inst, const BatteryDispatch& dispatch,
                               double validation_tolerance = 1e-6);

struct OracleOptions {
  double tolerance = 1e-9;        // slack on the battery envelope and terminal SOC
  long node_budget = 10'000'000;  // enumeration guard
};

struct OracleResult {
  double bill = 0.0;
  BatteryDispatch dispatch;
  long nodes_visited = 0;
};

// Independent optimum finder for tiny instances: depth-first enumeration of
// battery net-power actions on a uniform grid over [-BPR, +BPR] (negative =
// discharge, no simultaneous charge/discharge), pruned by the battery
// envelope, terminal-SOC reachability, and an admissible cost bound. Every
// kept sequence satisfies the dispatch envelope within `tolerance`, so the
// returned bill is an upper bound on the LP optimum by construction.
OracleResult brute_force_optimal(const MonthlyInstance& inst, int power_levels,
                                 const OracleOptions& options = {});

// Coarser oracle for up to 48 intervals: dynamic program over a uniform SOC
// grid. The path minimizes the time-separable part of the bill; demand
// charges are priced on the resulting dispatch afterwards, so the result is
// the restricted-family optimum only when all demand rates are zero, and an
// upper bound on the LP optimum otherwise. The terminal-SOC check allows one
// SOC-grid cell of slack.
OracleResult dp_optimal(const MonthlyInstance& inst, int soc_levels);

}  // namespace billopt

#endif
