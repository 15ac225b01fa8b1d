#include "billopt/commands.hpp"

#include <charconv>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "billopt/billing.hpp"

namespace billopt {

namespace {

// Full precision: the shortest decimal form that parses back to the same
// double. Display columns round to cents separately.
std::string num(double v) {
  char buf[40];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string money2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

std::string month_stamp(int year, int month) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
  return buf;
}

void warn_if_ineligible(const RunConfig& config, const LoadedInputs& inputs,
                        const TariffSchedule& tariff) {
  if (tariff.eligibility == EligibilityOption::none) return;
  double h = inputs.site.grid.step_hours();
  double consumption = 0.0, pv_energy = 0.0, max_demand = 0.0;
  for (int t = 0; t < inputs.site.grid.count; ++t) {
    consumption += inputs.site.base_demand_kw[t];
    pv_energy += inputs.pv_unit.per_kw_output[t];
    max_demand = std::max(max_demand, inputs.site.base_demand_kw[t]);
  }
  consumption *= h;
  pv_energy *= h * config.pv_capacity_kw;
  EligibilityResult check =
      check_eligibility(tariff.eligibility, pv_energy, consumption,
                        config.battery.power_rating_kw, max_demand);
  if (!check.eligible)
    std::cerr << "warning: configured assets do not qualify for " << tariff.name << ": "
              << check.reason << "\n";
}

void write_bill_csv(const std::filesystem::path& path, const BillBreakdown& bill) {
  std::ofstream out = open_csv(path);
  out << "item,label,amount_usd,amount_usd_display\n";
  out << "max_demand,," << num(bill.max_demand_charge) << ',' << money2(bill.max_demand_charge)
      << '\n';
  for (const auto& [label, charge] : bill.tou_demand_charges)
    out << "tou_demand," << label << ',' << num(charge) << ',' << money2(charge) << '\n';
  out << "energy,," << num(bill.energy_charge) << ',' << money2(bill.energy_charge) << '\n';
  out << "nem,," << num(bill.nem_revenue) << ',' << money2(bill.nem_revenue) << '\n';
  out << "total,," << num(bill.total) << ',' << money2(bill.total) << '\n';
}

void write_dispatch_csv(const std::filesystem::path& path, const MonthlyInstance& inst,
                        const SolutionBundle& bundle) {
  std::ofstream out = open_csv(path);
  out << "timestamp,base_kw,pv_kw,charge_kw,discharge_kw,soc_kwh,net_kw,import_kw\n";
  for (int t = 0; t < inst.grid.count; ++t) {
    out << format_iso(inst.grid.interval_start(t)) << ',' << num(inst.base_demand_kw[t]) << ','
        << num(inst.pv_kw[t]) << ',' << num(bundle.dispatch.charge_kw[t]) << ','
        << num(bundle.dispatch.discharge_kw[t]) << ',' << num(bundle.dispatch.soc_kwh[t]) << ','
        << num(bundle.net_demand_kw[t]) << ',' << num(bundle.import_kw[t]) << '\n';
  }
}

}  // namespace

void cmd_bill(const RunConfig& config, const std::string& out_dir, std::ostream& out) {
  if (config.bill_month < 1 || config.bill_month > 12)
    throw ConfigError("bill.month must be set to 1..12");
  LoadedInputs inputs = load_inputs(config);
  const TariffSchedule& tariff = config.bill_tariff.empty()
                                     ? inputs.tariffs.front()
                                     : inputs.tariff_by_name(config.bill_tariff);
  warn_if_ineligible(config, inputs, tariff);

  MonthlyInstance inst = build_instance(inputs.site, tariff, config.battery, config.year,
                                        config.bill_month, config.pv_capacity_kw,
                                        &inputs.pv_unit);
  SolutionBundle bundle = solve_month(inst, config.solver);
  if (bundle.status != SolveStatus::optimal)
    throw SolveError("solve failed for " + inst.label + ": " + to_string(bundle.status) +
                     (bundle.message.empty() ? "" : " (" + bundle.message + ")"));
  BillBreakdown bill = bill_of_dispatch(inst, bundle.dispatch);

  std::filesystem::create_directories(out_dir);
  std::string stamp = month_stamp(config.year, config.bill_month);
  std::filesystem::path bill_path =
      std::filesystem::path(out_dir) / ("bill_" + tariff.name + "_" + stamp + ".csv");
  std::filesystem::path dispatch_path =
      std::filesystem::path(out_dir) / ("dispatch_" + tariff.name + "_" + stamp + ".csv");
  write_bill_csv(bill_path, bill);
  write_dispatch_csv(dispatch_path, inst, bundle);

  out << "tariff " << tariff.name << " month " << stamp << "\n";
  out << "status optimal (" << bundle.iterations << " simplex iterations)\n";
  out << "total " << num(bill.total) << " (" << money2(bill.total) << ")\n";
  out << "wrote " << bill_path.string() << "\n";
  out << "wrote " << dispatch_path.string() << "\n";
}

namespace {

const SweepResult& result_for(const std::vector<SweepResult>& results, const std::string& name) {
  for (const auto& r : results)
    if (r.tariff == name) return r;
  throw ConfigError("baseline tariff '" + name + "' is not among the swept tariffs");
}

void require_baseline_if_relative(const RunConfig& config) {
  if (config.relative_mode != "none" && config.baseline_tariff.empty())
    throw ConfigError("relative_mode is set but sweep.baseline is empty");
}

}  // namespace

void cmd_sweep(const RunConfig& config, const std::string& out_dir, std::ostream& out) {
  if (!config.has_sweep) throw ConfigError("config has no sweep section");
  require_baseline_if_relative(config);
  LoadedInputs inputs = load_inputs(config);

  std::vector<SweepResult> results =
      sweep(inputs.site, inputs.tariffs, config.battery, config.sweep_scenario,
            config.sweep_values, config.pv_capacity_kw, inputs.pv_unit,
            analysis_config(config));

  std::filesystem::create_directories(out_dir);
  const char* scenario = to_string(config.sweep_scenario);

  // Monthly detail: one row per (tariff, sweep value, month).
  std::filesystem::path monthly_path =
      std::filesystem::path(out_dir) / ("sweep_" + std::string(scenario) + "_monthly.csv");
  {
    std::ofstream csv = open_csv(monthly_path);
    csv << "tariff,value,month,pv_capacity_kw,bes_power_kw,bes_energy_kwh,"
           "max_demand_charge_usd,tou_demand_charge_usd,energy_charge_usd,nem_revenue_usd,"
           "total_usd,total_usd_display,cycles,simultaneous_intervals\n";
    for (const auto& result : results)
      for (const auto& point : result.points)
        for (const auto& m : point.annual.months)
          csv << result.tariff << ',' << num(point.value) << ',' << m.month << ','
              << num(point.pv_capacity_kw) << ',' << num(point.bes_power_kw) << ','
              << num(point.bes_energy_kwh) << ',' << num(m.bill.max_demand_charge) << ','
              << num(m.bill.tou_demand_total()) << ',' << num(m.bill.energy_charge) << ','
              << num(m.bill.nem_revenue) << ',' << num(m.bill.total) << ','
              << money2(m.bill.total) << ',' << num(m.cycles) << ','
              << m.simultaneous_intervals << '\n';
  }
  out << "wrote " << monthly_path.string() << "\n";

  const SweepResult* baseline =
      config.baseline_tariff.empty() ? nullptr : &result_for(results, config.baseline_tariff);

  // Summary per (scenario, tariff), one row per sweep value.
  for (const auto& result : results) {
    std::filesystem::path path =
        std::filesystem::path(out_dir) /
        ("sweep_" + std::string(scenario) + "_" + result.tariff + ".csv");
    std::ofstream csv = open_csv(path);
    csv << "value,pv_capacity_kw,bes_power_kw,bes_energy_kwh,annual_total_usd,"
           "annual_total_usd_display,annual_cycles";
    if (baseline && config.relative_mode == "difference") csv << ",total_minus_baseline_usd";
    if (baseline && config.relative_mode == "ratio") csv << ",total_over_baseline";
    csv << '\n';
    for (size_t i = 0; i < result.points.size(); ++i) {
      const auto& point = result.points[i];
      csv << num(point.value) << ',' << num(point.pv_capacity_kw) << ','
          << num(point.bes_power_kw) << ',' << num(point.bes_energy_kwh) << ','
          << num(point.annual.total) << ',' << money2(point.annual.total) << ','
          << num(point.annual.cycles);
      if (baseline && config.relative_mode == "difference")
        csv << ',' << num(point.annual.total - baseline->points[i].annual.total);
      if (baseline && config.relative_mode == "ratio")
        csv << ',' << num(point.annual.total / baseline->points[i].annual.total);
      csv << '\n';
    }
    out << "wrote " << path.string() << "\n";
  }
}

void cmd_bva(const RunConfig& config, const std::string& out_dir, std::ostream& out) {
  if (!config.has_sweep) throw ConfigError("config has no sweep section");
  require_baseline_if_relative(config);
  LoadedInputs inputs = load_inputs(config);
  AnalysisConfig acfg = analysis_config(config);

  std::vector<SweepResult> with_bes =
      sweep(inputs.site, inputs.tariffs, config.battery, config.sweep_scenario,
            config.sweep_values, config.pv_capacity_kw, inputs.pv_unit, acfg);

  // The matching no-battery bills: PV sweeps pair point-by-point with the
  // no-BES scenario; battery sweeps compare against one fixed-PV solve.
  const size_t P = config.sweep_values.size();
  std::vector<std::vector<double>> without_totals(inputs.tariffs.size(),
                                                  std::vector<double>(P, 0.0));
  bool battery_sweep = config.sweep_scenario == SweepParameter::bes_power_2h ||
                       config.sweep_scenario == SweepParameter::bes_power_4h;
  if (battery_sweep) {
    for (size_t ti = 0; ti < inputs.tariffs.size(); ++ti) {
      AnnualResult no_bes = annual_bill(inputs.site, inputs.tariffs[ti], BatterySpec::idle(),
                                        config.pv_capacity_kw, &inputs.pv_unit, acfg);
      without_totals[ti].assign(P, no_bes.total);
    }
  } else {
    std::vector<SweepResult> no_bes =
        sweep(inputs.site, inputs.tariffs, config.battery, SweepParameter::pv_capacity_no_bes,
              config.sweep_values, config.pv_capacity_kw, inputs.pv_unit, acfg);
    for (size_t ti = 0; ti < inputs.tariffs.size(); ++ti)
      for (size_t i = 0; i < P; ++i) without_totals[ti][i] = no_bes[ti].points[i].annual.total;
  }

  std::vector<std::vector<double>> bva(inputs.tariffs.size(), std::vector<double>(P, 0.0));
  for (size_t ti = 0; ti < inputs.tariffs.size(); ++ti)
    for (size_t i = 0; i < P; ++i)
      bva[ti][i] = without_totals[ti][i] - with_bes[ti].points[i].annual.total;

  int baseline_index = -1;
  if (!config.baseline_tariff.empty()) {
    for (size_t ti = 0; ti < inputs.tariffs.size(); ++ti)
      if (inputs.tariffs[ti].name == config.baseline_tariff)
        baseline_index = static_cast<int>(ti);
    if (baseline_index < 0)
      throw ConfigError("baseline tariff '" + config.baseline_tariff +
                        "' is not among the loaded tariffs");
  }

  std::filesystem::create_directories(out_dir);
  const char* scenario = to_string(config.sweep_scenario);
  for (size_t ti = 0; ti < inputs.tariffs.size(); ++ti) {
    std::filesystem::path path =
        std::filesystem::path(out_dir) /
        ("bva_" + std::string(scenario) + "_" + inputs.tariffs[ti].name + ".csv");
    std::ofstream csv = open_csv(path);
    csv << "value,pv_capacity_kw,bes_power_kw,bes_energy_kwh,with_bes_total_usd,"
           "without_bes_total_usd,bva_usd,bva_usd_display";
    if (baseline_index >= 0) csv << ",bva_minus_baseline_usd";
    csv << '\n';
    for (size_t i = 0; i < P; ++i) {
      const auto& point = with_bes[ti].points[i];
      csv << num(point.value) << ',' << num(point.pv_capacity_kw) << ','
          << num(point.bes_power_kw) << ',' << num(point.bes_energy_kwh) << ','
          << num(point.annual.total) << ',' << num(without_totals[ti][i]) << ','
          << num(bva[ti][i]) << ',' << money2(bva[ti][i]);
      if (baseline_index >= 0)
        csv << ',' << num(bva[ti][i] - bva[static_cast<size_t>(baseline_index)][i]);
      csv << '\n';
    }
    out << "wrote " << path.string() << "\n";
  }
}

void cmd_validate_tariff(const std::vector<std::string>& paths, std::ostream& out) {
  if (paths.empty()) throw ConfigError("no tariff files given");
  for (const auto& path : paths) {
    TariffSchedule tariff = load_tariff(path);
    // Round-trip must reproduce the same schedule.
    TariffSchedule again = parse_tariff(serialize_tariff(tariff), path + " (round-trip)");
    if (serialize_tariff(again) != serialize_tariff(tariff))
      throw ParseError(path + ": serialization round-trip is not stable");
    out << "ok " << tariff.name << " (" << path << ")\n";
  }
}

}  // namespace billopt
