#include "billopt/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>

namespace billopt {

void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  if (workers <= 0) {
    unsigned hc = std::thread::hardware_concurrency();
    workers = hc > 0 ? static_cast<int>(hc) : 1;
  }
  workers = std::min(workers, n);
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }

  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  int first_error_index = n;

  auto body = [&]() {
    while (true) {
      int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (i < first_error_index) {
          first_error_index = i;
          first_error = std::current_exception();
        }
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

namespace {

MonthResult month_result_of(int month, const MonthlyInstance& inst,
                            const SolutionBundle& bundle) {
  MonthResult out;
  out.month = month;
  out.bill = bill_of_dispatch(inst, bundle.dispatch);
  out.max_demand_kw = bundle.max_demand_kw;
  out.iterations = bundle.iterations;
  double h = inst.grid.step_hours();
  double discharged = 0.0;
  for (double d : bundle.dispatch.discharge_kw) discharged += d;
  out.discharged_kwh = h * discharged;
  out.cycles = inst.spec.energy_rating_kwh > 0.0
                   ? out.discharged_kwh / inst.spec.energy_rating_kwh
                   : 0.0;
  for (int t = 0; t < inst.grid.count; ++t)
    if (std::min(bundle.dispatch.charge_kw[t], bundle.dispatch.discharge_kw[t]) > 1e-6)
      ++out.simultaneous_intervals;
  return out;
}

AnnualResult assemble_annual(std::vector<MonthResult> months) {
  AnnualResult out;
  out.months = std::move(months);
  for (const auto& m : out.months) {
    out.total += m.bill.total;
    out.cycles += m.cycles;
  }
  return out;
}

MonthResult solve_one_month(const SiteProfile& site, const TariffSchedule& tariff,
                            const BatterySpec& spec, double pv_capacity_kw,
                            const PvUnitProfile* pv_unit, const AnalysisConfig& config,
                            int month) {
  MonthlyInstance inst =
      build_instance(site, tariff, spec, config.year, month, pv_capacity_kw, pv_unit);
  SolutionBundle bundle = solve_month(inst, config.solver);
  if (bundle.status != SolveStatus::optimal)
    throw SolveError("solve failed for " + inst.label + ": " + to_string(bundle.status) +
                     (bundle.message.empty() ? "" : " (" + bundle.message + ")"));
  return month_result_of(month, inst, bundle);
}

}  // namespace

AnnualResult annual_bill(const SiteProfile& site, const TariffSchedule& tariff,
                         const BatterySpec& spec, double pv_capacity_kw,
                         const PvUnitProfile* pv_unit, const AnalysisConfig& config) {
  std::vector<MonthResult> months(12);
  parallel_for(12, config.workers, [&](int i) {
    months[i] = solve_one_month(site, tariff, spec, pv_capacity_kw, pv_unit, config, i + 1);
  });
  return assemble_annual(std::move(months));
}

const char* to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::pv_capacity_no_bes: return "pv_capacity_no_bes";
    case SweepParameter::pv_capacity: return "pv_capacity";
    case SweepParameter::bes_power_2h: return "bes_power_2h";
    case SweepParameter::bes_power_4h: return "bes_power_4h";
  }
  return "unknown";
}

SweepParameter parse_sweep_parameter(const std::string& text) {
  if (text == "pv_capacity_no_bes") return SweepParameter::pv_capacity_no_bes;
  if (text == "pv_capacity") return SweepParameter::pv_capacity;
  if (text == "bes_power_2h") return SweepParameter::bes_power_2h;
  if (text == "bes_power_4h") return SweepParameter::bes_power_4h;
  throw ConfigError("unknown sweep parameter '" + text +
                    "' (want pv_capacity_no_bes, pv_capacity, bes_power_2h or bes_power_4h)");
}

std::vector<SweepResult> sweep(const SiteProfile& site,
                               const std::vector<TariffSchedule>& tariffs,
                               const BatterySpec& spec_template, SweepParameter parameter,
                               const std::vector<double>& values, double pv_capacity_kw,
                               const PvUnitProfile& pv_unit, const AnalysisConfig& config) {
  if (values.size() < 2) throw InvalidInput("a sweep needs at least 2 points");
  if (!std::is_sorted(values.begin(), values.end()))
    throw InvalidInput("sweep values must be ascending");

  struct PointSetup {
    double pv = 0.0;
    BatterySpec spec;
  };
  std::vector<PointSetup> setups;
  for (double v : values) {
    PointSetup s;
    switch (parameter) {
      case SweepParameter::pv_capacity_no_bes:
        s.pv = v;
        s.spec = BatterySpec::idle();
        break;
      case SweepParameter::pv_capacity:
        s.pv = v;
        s.spec = spec_template;
        break;
      case SweepParameter::bes_power_2h:
        s.pv = pv_capacity_kw;
        s.spec = BatterySpec::make(2.0 * v, v, spec_template.round_trip_efficiency);
        break;
      case SweepParameter::bes_power_4h:
        s.pv = pv_capacity_kw;
        s.spec = BatterySpec::make(4.0 * v, v, spec_template.round_trip_efficiency);
        break;
    }
    setups.push_back(std::move(s));
  }

  std::vector<SweepResult> results;
  const int P = static_cast<int>(values.size());
  for (const auto& tariff : tariffs) {
    std::vector<MonthResult> months(static_cast<size_t>(P) * 12);
    parallel_for(P * 12, config.workers, [&](int task) {
      int point = task / 12;
      int month = task % 12 + 1;
      months[task] = solve_one_month(site, tariff, setups[point].spec, setups[point].pv,
                                     &pv_unit, config, month);
    });
    SweepResult result;
    result.tariff = tariff.name;
    result.parameter = parameter;
    for (int p = 0; p < P; ++p) {
      SweepPoint point;
      point.value = values[p];
      point.pv_capacity_kw = setups[p].pv;
      point.bes_power_kw = setups[p].spec.power_rating_kw;
      point.bes_energy_kwh = setups[p].spec.energy_rating_kwh;
      point.annual = assemble_annual(
          std::vector<MonthResult>(months.begin() + p * 12, months.begin() + (p + 1) * 12));
      result.points.push_back(std::move(point));
    }
    results.push_back(std::move(result));
  }
  return results;
}

BvaResult battery_value_added(const SiteProfile& site, const TariffSchedule& tariff,
                              const BatterySpec& spec, double pv_capacity_kw,
                              const PvUnitProfile* pv_unit, const AnalysisConfig& config) {
  BvaResult out;
  out.with_bes = annual_bill(site, tariff, spec, pv_capacity_kw, pv_unit, config);
  out.without_bes =
      annual_bill(site, tariff, BatterySpec::idle(), pv_capacity_kw, pv_unit, config);
  out.value_added = out.without_bes.total - out.with_bes.total;
  return out;
}

}  // namespace billopt
