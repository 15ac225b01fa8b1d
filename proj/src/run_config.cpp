#include "billopt/run_config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace billopt {

namespace {

using nlohmann::json;

std::string resolve(const std::filesystem::path& base, const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_absolute()) return p.string();
  return (base / p).lexically_normal().string();
}

}  // namespace

void RunConfig::validate() const {
  if (resolution_minutes != 15 && resolution_minutes != 30 && resolution_minutes != 60)
    throw ConfigError("resolution_minutes must be 15, 30 or 60");
  if (60 % profile_resolution_minutes != 0 && profile_resolution_minutes % 60 != 0)
    throw ConfigError("profile_resolution_minutes must divide or be a multiple of 60");
  if (load_profile_path.empty()) throw ConfigError("load_profile is required");
  if (pv_unit_profile_path.empty()) throw ConfigError("pv_unit_profile is required");
  if (tariff_paths.empty()) throw ConfigError("at least one tariff file is required");
  if (!(pv_capacity_kw >= 0.0) || !std::isfinite(pv_capacity_kw))
    throw ConfigError("pv_capacity_kw must be finite and >= 0");
  battery.validate();
  solver.validate();
  if (relative_mode != "none" && relative_mode != "difference" && relative_mode != "ratio")
    throw ConfigError("relative_mode must be none, difference or ratio");
  for (const auto& path : {load_profile_path, pv_unit_profile_path}) {
    if (!std::filesystem::exists(path)) throw ConfigError("missing input file: " + path);
  }
  for (const auto& path : tariff_paths)
    if (!std::filesystem::exists(path)) throw ConfigError("missing tariff file: " + path);
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }

  std::filesystem::path base = std::filesystem::path(path).parent_path();
  RunConfig cfg;
  try {
    cfg.timezone = doc.value("timezone", cfg.timezone);
    cfg.year = doc.value("year", cfg.year);
    cfg.resolution_minutes = doc.value("resolution_minutes", cfg.resolution_minutes);
    cfg.profile_resolution_minutes =
        doc.value("profile_resolution_minutes", cfg.resolution_minutes);
    cfg.load_profile_path = resolve(base, doc.at("load_profile").get<std::string>());
    cfg.pv_unit_profile_path = resolve(base, doc.at("pv_unit_profile").get<std::string>());
    for (const auto& t : doc.at("tariffs"))
      cfg.tariff_paths.push_back(resolve(base, t.get<std::string>()));
    cfg.pv_capacity_kw = doc.value("pv_capacity_kw", 0.0);
    cfg.workers = doc.value("workers", 0);

    if (doc.contains("battery")) {
      const json& b = doc.at("battery");
      double power = b.value("power_kw", 0.0);
      double energy = b.contains("energy_kwh")
                          ? b.at("energy_kwh").get<double>()
                          : b.value("duration_hours", 2.0) * power;
      cfg.battery = BatterySpec::make(energy, power, b.value("round_trip_efficiency", 0.85));
      if (b.contains("soc_min_kwh")) cfg.battery.soc_min_kwh = b.at("soc_min_kwh").get<double>();
      if (b.contains("soc_max_kwh")) cfg.battery.soc_max_kwh = b.at("soc_max_kwh").get<double>();
      if (b.contains("soc_init_kwh"))
        cfg.battery.soc_init_kwh = b.at("soc_init_kwh").get<double>();
      cfg.battery.validate();
    }

    if (doc.contains("solver")) {
      const json& s = doc.at("solver");
      cfg.solver.backend = s.value("backend", cfg.solver.backend);
      cfg.solver.feasibility_tolerance =
          s.value("feasibility_tolerance", cfg.solver.feasibility_tolerance);
      cfg.solver.optimality_tolerance =
          s.value("optimality_tolerance", cfg.solver.optimality_tolerance);
      cfg.solver.max_iterations = s.value("max_iterations", cfg.solver.max_iterations);
      cfg.solver.time_limit_seconds =
          s.value("time_limit_seconds", cfg.solver.time_limit_seconds);
      cfg.solver.external_command = s.value("external_command", cfg.solver.external_command);
    }

    if (doc.contains("bill")) {
      const json& b = doc.at("bill");
      cfg.bill_month = b.value("month", 0);
      cfg.bill_tariff = b.value("tariff", std::string());
    }

    if (doc.contains("sweep")) {
      const json& s = doc.at("sweep");
      cfg.has_sweep = true;
      cfg.sweep_scenario = parse_sweep_parameter(s.at("scenario").get<std::string>());
      if (s.contains("values")) {
        for (const auto& v : s.at("values")) cfg.sweep_values.push_back(v.get<double>());
      } else {
        double from = s.value("from", 0.0);
        double to = s.at("to").get<double>();
        int points = s.value("points", 10);
        if (points < 2) throw ConfigError("sweep.points must be >= 2");
        for (int i = 0; i < points; ++i)
          cfg.sweep_values.push_back(from + (to - from) * i / (points - 1));
      }
      cfg.baseline_tariff = s.value("baseline", std::string());
      cfg.relative_mode = s.value("relative_mode", cfg.relative_mode);
    }
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  cfg.validate();
  return cfg;
}

const TariffSchedule& LoadedInputs::tariff_by_name(const std::string& name) const {
  for (const auto& t : tariffs)
    if (t.name == name) return t;
  throw ConfigError("tariff '" + name + "' is not among the loaded tariffs");
}

LoadedInputs load_inputs(const RunConfig& config) {
  TimeGrid file_grid = year_grid(config.year, config.profile_resolution_minutes);
  std::vector<double> base = parse_profile_csv(config.load_profile_path, file_grid, "kw");
  std::vector<double> unit =
      parse_profile_csv(config.pv_unit_profile_path, file_grid, "kw_per_kw");

  TimeGrid run_grid = year_grid(config.year, config.resolution_minutes);
  base = resample(base, config.profile_resolution_minutes, config.resolution_minutes);
  unit = resample(unit, config.profile_resolution_minutes, config.resolution_minutes);

  std::vector<TariffSchedule> tariffs;
  for (const auto& path : config.tariff_paths) tariffs.push_back(load_tariff(path));
  for (size_t i = 0; i < tariffs.size(); ++i)
    for (size_t k = i + 1; k < tariffs.size(); ++k)
      if (tariffs[i].name == tariffs[k].name)
        throw ConfigError("duplicate tariff name '" + tariffs[i].name + "'");

  return LoadedInputs{
      SiteProfile(run_grid, std::move(base), std::vector<double>(run_grid.count, 0.0)),
      PvUnitProfile(run_grid, std::move(unit)), std::move(tariffs)};
}

AnalysisConfig analysis_config(const RunConfig& config) {
  AnalysisConfig out;
  out.solver = config.solver;
  out.year = config.year;
  out.workers = config.workers;
  return out;
}

}  // namespace billopt
