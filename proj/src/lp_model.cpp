#include "billopt/lp_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "billopt/billing.hpp"

namespace billopt {

void MonthlyInstance::validate() const {
  size_t n = static_cast<size_t>(grid.count);
  auto check_len = [&](const std::vector<double>& s, const char* what) {
    if (s.size() != n)
      throw InvalidInput(std::string(what) + " length " + std::to_string(s.size()) +
                         " does not match grid count " + std::to_string(n));
    for (double v : s)
      if (!std::isfinite(v)) throw InvalidInput(std::string(what) + " has a non-finite entry");
  };
  check_len(base_demand_kw, "base demand");
  check_len(pv_kw, "pv series");
  check_len(energy_rate, "energy rate series");
  check_len(nem_sell_rate, "nem sell rate series");
  if (!std::isfinite(monthly_demand_rate) || monthly_demand_rate < 0.0)
    throw InvalidInput("DR_max must be finite and >= 0");
  spec.validate();
  for (const auto& p : demand_periods.periods) {
    if (!std::isfinite(p.rate_per_kw) || p.rate_per_kw < 0.0)
      throw InvalidInput("demand period '" + p.label + "' has a bad rate");
    for (int t : p.intervals)
      if (t < 0 || t >= grid.count)
        throw InvalidInput("demand period '" + p.label + "' references interval " +
                           std::to_string(t) + " outside the grid");
  }
}

MonthlyInstance build_instance(const SiteProfile& site, const TariffSchedule& tariff,
                               const BatterySpec& spec, int year, int month,
                               double pv_capacity_kw, const PvUnitProfile* pv_unit) {
  TimeGrid grid = month_grid(year, month, site.grid.step_minutes);

  std::int64_t offset_minutes =
      minutes_since_epoch(grid.start) - minutes_since_epoch(site.grid.start);
  if (offset_minutes < 0 || offset_minutes % site.grid.step_minutes != 0)
    throw InvalidInput("site profile does not align with " + format_iso(grid.start));
  std::int64_t offset = offset_minutes / site.grid.step_minutes;
  if (offset + grid.count > site.grid.count)
    throw InvalidInput("site profile ends before " + format_iso(grid.end()));

  MonthlyInstance inst;
  inst.grid = grid;
  inst.spec = spec;
  spec.validate();
  inst.base_demand_kw.assign(site.base_demand_kw.begin() + offset,
                             site.base_demand_kw.begin() + offset + grid.count);
  if (pv_unit) {
    if (!(pv_unit->grid == site.grid))
      throw InvalidInput("pv unit profile grid does not match the site grid");
    std::vector<double> sliced(pv_unit->per_kw_output.begin() + offset,
                               pv_unit->per_kw_output.begin() + offset + grid.count);
    PvUnitProfile month_unit(grid, std::move(sliced));
    inst.pv_kw = scale_pv(month_unit, pv_capacity_kw);
  } else {
    inst.pv_kw.assign(site.pv_generation_kw.begin() + offset,
                      site.pv_generation_kw.begin() + offset + grid.count);
  }
  inst.energy_rate = energy_rate_series(tariff, grid);
  inst.nem_sell_rate = nem_sell_rate_series(tariff, grid);
  inst.monthly_demand_rate = tariff.monthly_demand_rate;
  inst.demand_periods = demand_periods_for_month(tariff, grid);

  char stamp[16];
  std::snprintf(stamp, sizeof stamp, "%04d-%02d", year, month);
  inst.label = tariff.name + " " + stamp;
  inst.validate();
  return inst;
}

LpLayout lp_layout(const MonthlyInstance& inst) {
  return {inst.grid.count, static_cast<int>(inst.demand_periods.periods.size())};
}

LpProblem assemble_lp(const MonthlyInstance& inst) {
  inst.validate();
  const LpLayout lay = lp_layout(inst);
  const int T = lay.horizon;
  const double h = inst.grid.step_hours();
  const BatterySpec& bes = inst.spec;
  const double eta = bes.round_trip_efficiency;

  LpProblem lp;
  lp.vars.reserve(lay.total());
  for (int t = 0; t < T; ++t)
    lp.add_variable("dnet[" + std::to_string(t) + "]", -kInf, kInf, h * inst.nem_sell_rate[t]);
  for (int t = 0; t < T; ++t)
    lp.add_variable("dpos[" + std::to_string(t) + "]", 0.0, kInf,
                    h * (inst.energy_rate[t] - inst.nem_sell_rate[t]));
  for (int t = 0; t < T; ++t)
    lp.add_variable("soc[" + std::to_string(t) + "]", bes.soc_min_kwh, bes.soc_max_kwh, 0.0);
  for (int t = 0; t < T; ++t)
    lp.add_variable("chg[" + std::to_string(t) + "]", 0.0, bes.power_rating_kw, 0.0);
  for (int t = 0; t < T; ++t)
    lp.add_variable("dis[" + std::to_string(t) + "]", 0.0, bes.power_rating_kw, 0.0);
  lp.add_variable("dmax", 0.0, kInf, inst.monthly_demand_rate);
  for (int p = 0; p < lay.period_count; ++p)
    lp.add_variable("dtou[" + inst.demand_periods.periods[p].label + "]", 0.0, kInf,
                    inst.demand_periods.periods[p].rate_per_kw);

  for (int t = 0; t < T; ++t) {
    std::string ts = std::to_string(t);
    // Net demand definition.
    lp.add_row("net[" + ts + "]",
               {{lay.dnet(t), 1.0}, {lay.chg(t), -1.0}, {lay.dis(t), 1.0}}, RowSense::eq,
               inst.base_demand_kw[t] - inst.pv_kw[t]);
    // Monthly maximum demand.
    lp.add_row("dmax[" + ts + "]", {{lay.dnet(t), 1.0}, {lay.dmax(), -1.0}}, RowSense::le, 0.0);
    // Import split.
    lp.add_row("imp[" + ts + "]", {{lay.dpos(t), 1.0}, {lay.dnet(t), -1.0}}, RowSense::ge, 0.0);
    // SOC recursion.
    if (t == 0) {
      lp.add_row("soc[0]", {{lay.soc(0), 1.0}, {lay.chg(0), -h * eta}, {lay.dis(0), h}},
                 RowSense::eq, bes.soc_init_kwh);
      lp.add_row("chg[0]", {{lay.chg(0), h * eta}}, RowSense::le,
                 bes.energy_rating_kwh - bes.soc_init_kwh);
      lp.add_row("dis[0]", {{lay.dis(0), h}}, RowSense::le, bes.soc_init_kwh);
    } else {
      lp.add_row("soc[" + ts + "]",
                 {{lay.soc(t), 1.0}, {lay.soc(t - 1), -1.0}, {lay.chg(t), -h * eta},
                  {lay.dis(t), h}},
                 RowSense::eq, 0.0);
      // Charge limited by the room left in the battery, discharge by the
      // energy stored at the start of the interval.
      lp.add_row("chg[" + ts + "]", {{lay.chg(t), h * eta}, {lay.soc(t - 1), 1.0}}, RowSense::le,
                 bes.energy_rating_kwh);
      lp.add_row("dis[" + ts + "]", {{lay.dis(t), h}, {lay.soc(t - 1), -1.0}}, RowSense::le, 0.0);
    }
    // Combined power rating and the no-export rule.
    lp.add_row("pow[" + ts + "]", {{lay.chg(t), 1.0}, {lay.dis(t), 1.0}}, RowSense::le,
               bes.power_rating_kw);
    lp.add_row("exp[" + ts + "]", {{lay.dis(t), 1.0}, {lay.chg(t), -1.0}}, RowSense::le,
               inst.base_demand_kw[t]);
  }
  // Month ends where it started.
  lp.add_row("term", {{lay.soc(T - 1), 1.0}}, RowSense::eq, bes.soc_init_kwh);
  // Per-period maxima.
  for (int p = 0; p < lay.period_count; ++p) {
    const auto& period = inst.demand_periods.periods[p];
    for (int t : period.intervals)
      lp.add_row("dtou[" + period.label + "][" + std::to_string(t) + "]",
                 {{lay.dnet(t), 1.0}, {lay.dtou(p), -1.0}}, RowSense::le, 0.0);
  }
  return lp;
}

namespace {

SolutionBundle failed_bundle(const RawSolution& raw, const std::string& message) {
  SolutionBundle out;
  out.status = raw.status == SolveStatus::optimal ? SolveStatus::numerical_failure : raw.status;
  out.iterations = raw.iterations;
  out.message = message;
  return out;
}

}  // namespace

SolutionBundle extract_solution(const MonthlyInstance& inst, const LpProblem& lp,
                                const RawSolution& raw) {
  if (raw.status != SolveStatus::optimal)
    return failed_bundle(raw, raw.message.empty() ? std::string(to_string(raw.status))
                                                  : raw.message);
  const LpLayout lay = lp_layout(inst);
  if (static_cast<int>(lp.vars.size()) != lay.total() ||
      static_cast<int>(raw.variable_values.size()) != lay.total())
    return failed_bundle(raw, "solver output size does not match the instance layout");

  const int T = lay.horizon;
  const double kTol = 1e-6;

  SolutionBundle out;
  out.iterations = raw.iterations;
  out.dispatch.grid = inst.grid;
  out.dispatch.charge_kw.resize(T);
  out.dispatch.discharge_kw.resize(T);
  for (int t = 0; t < T; ++t) {
    double chg = raw.variable_values[lay.chg(t)];
    double dis = raw.variable_values[lay.dis(t)];
    if (chg < -kTol || dis < -kTol)
      return failed_bundle(raw, "negative battery power at t=" + std::to_string(t));
    // Snap solver noise so the recomputed SOC is clean.
    out.dispatch.charge_kw[t] = std::fabs(chg) < 1e-11 ? 0.0 : std::max(chg, 0.0);
    out.dispatch.discharge_kw[t] = std::fabs(dis) < 1e-11 ? 0.0 : std::max(dis, 0.0);
  }
  out.dispatch.soc_kwh =
      recompute_soc(inst.spec, inst.grid, out.dispatch.charge_kw, out.dispatch.discharge_kw);

  ValidationResult check =
      validate_dispatch(inst.spec, out.dispatch, inst.base_demand_kw, kTol);
  if (!check.ok()) return failed_bundle(raw, "dispatch validation failed: " + check.summary());

  // Net demand: the identity must hold for the raw variables; the bundle
  // carries the exact recomputation.
  out.net_demand_kw.resize(T);
  out.import_kw.resize(T);
  double max_net = 0.0;
  for (int t = 0; t < T; ++t) {
    double net_exact = inst.base_demand_kw[t] - inst.pv_kw[t] + out.dispatch.charge_kw[t] -
                       out.dispatch.discharge_kw[t];
    double net_lp = raw.variable_values[lay.dnet(t)];
    if (std::fabs(net_lp - net_exact) > kTol)
      return failed_bundle(raw, "net demand identity violated at t=" + std::to_string(t) +
                                    " by " + std::to_string(std::fabs(net_lp - net_exact)));
    out.net_demand_kw[t] = net_exact;
    out.import_kw[t] = raw.variable_values[lay.dpos(t)];
    max_net = std::max(max_net, net_exact);
  }

  // With a positive rate the maximum-demand constraints are tight at the
  // optimum; with a zero rate the variable is free-floating, so recompute.
  double dmax_expect = std::max(0.0, max_net);
  double dmax_lp = raw.variable_values[lay.dmax()];
  if (inst.monthly_demand_rate > 0.0 && std::fabs(dmax_lp - dmax_expect) > kTol)
    return failed_bundle(raw, "D_max not tight: solver " + std::to_string(dmax_lp) +
                                  " vs recomputed " + std::to_string(dmax_expect));
  out.max_demand_kw = dmax_expect;
  for (int p = 0; p < lay.period_count; ++p) {
    const auto& period = inst.demand_periods.periods[p];
    double expect = 0.0;
    for (int t : period.intervals) expect = std::max(expect, out.net_demand_kw[t]);
    double got = raw.variable_values[lay.dtou(p)];
    if (period.rate_per_kw > 0.0 && std::fabs(got - expect) > kTol)
      return failed_bundle(raw, "D_tou[" + period.label + "] not tight: solver " +
                                    std::to_string(got) + " vs recomputed " +
                                    std::to_string(expect));
    out.tou_demand_kw.emplace_back(period.label, expect);
  }

  // The objective must agree with the independently evaluated bill.
  BillBreakdown bill = bill_of_dispatch(inst, out.dispatch, kTol);
  double scale = 1.0 + std::fabs(raw.objective);
  if (std::fabs(bill.total - raw.objective) > 1e-6 * scale) {
    std::ostringstream msg;
    msg << "objective cross-check failed: solver " << raw.objective << " vs billed "
        << bill.total;
    return failed_bundle(raw, msg.str());
  }

  out.status = SolveStatus::optimal;
  out.objective_value = raw.objective;
  return out;
}

SolutionBundle solve_month(const MonthlyInstance& inst, const SolverConfig& config) {
  LpProblem lp = assemble_lp(inst);
  RawSolution raw = solve(lp, config);
  return extract_solution(inst, lp, raw);
}

}  // namespace billopt
