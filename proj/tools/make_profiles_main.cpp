#include <algorithm>
#include <cmath>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "billopt/profiles.hpp"

// Generates the example consumer load and PV unit profiles shipped under
// data/profiles/. Everything is closed-form and deterministic, so the files
// can be regenerated bit-identically. Shapes are synthetic stand-ins for the
// two commercial archetypes studied by the pipeline: a morning-and-evening
// peaking (MEP) consumer and a midday peaking (MDP) consumer.

namespace {

constexpr double kPi = 3.14159265358979323846;

double gauss(double x, double mu, double sigma) {
  double z = (x - mu) / sigma;
  return std::exp(-0.5 * z * z);
}

// Deterministic pseudo-noise in [0, 1).
double hash01(double x) {
  double v = std::sin(x * 12.9898) * 43758.5453;
  return v - std::floor(v);
}

struct Series {
  std::vector<double> values;

  // Scale so the maximum equals `peak` exactly.
  void normalize_to(double peak) {
    double mx = *std::max_element(values.begin(), values.end());
    size_t arg = 0;
    for (size_t i = 0; i < values.size(); ++i)
      if (values[i] == mx) { arg = i; break; }
    double scale = peak / mx;
    for (double& v : values) v = std::round(v * scale * 1e4) / 1e4;
    values[arg] = peak;
    for (double& v : values) v = std::min(v, peak);
  }
};

double seasonal(int day_of_year) {  // 1 at mid-July, 0 at mid-January
  return 0.5 * (1.0 - std::cos(2.0 * kPi * (day_of_year - 14.0) / 365.0));
}

double mep_load(double hour, int day_of_year, bool weekend, double jitter) {
  double s = seasonal(day_of_year);
  double base = 52.0 + 6.0 * s;
  double morning = (62.0 + 8.0 * s) * gauss(hour, 8.2, 2.0);
  double evening = (88.0 + 34.0 * s) * gauss(hour, 19.6, 2.6);
  double work = weekend ? 0.72 : 1.0;
  double v = base + work * (morning + evening);
  return v * (1.0 + jitter);
}

double mdp_load(double hour, int day_of_year, bool weekend, double jitter) {
  double s = seasonal(day_of_year);
  double base = 58.0 + 10.0 * s;
  double midday = (190.0 + 70.0 * s) * gauss(hour, 12.4, 2.5);
  double evening = 8.0 * gauss(hour, 19.0, 2.2);
  double work = weekend ? 0.78 : 1.0;
  double v = base + work * (midday + evening);
  return v * (1.0 + jitter);
}

double pv_unit(double hour, int day_of_year) {
  double s = seasonal(day_of_year);
  double half_width = 4.4 + 1.5 * s;  // daylight half-window, hours
  double x = (hour - 12.2) / half_width;
  if (std::fabs(x) >= 1.0) return 0.0;
  double elevation = std::cos(0.5 * kPi * x);
  double clearness = 0.74 + 0.26 * s;
  double weather = hash01(static_cast<double>(day_of_year));
  if (weather < 0.18) clearness *= 0.35 + 1.8 * weather;  // cloudy day
  return clearness * std::pow(elevation, 1.3);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"generate the example load and PV unit profiles"};
  int year = 2019;
  int step = 60;
  std::string out_dir = "data/profiles";
  app.add_option("--year", year, "calendar year (default 2019)");
  app.add_option("--step", step, "interval length in minutes (default 60)");
  app.add_option("--out", out_dir, "output directory");
  CLI11_PARSE(app, argc, argv);

  try {
    billopt::TimeGrid grid = billopt::year_grid(year, step);
    Series mep, mdp, pv;
    mep.values.resize(grid.count);
    mdp.values.resize(grid.count);
    pv.values.resize(grid.count);

    for (int t = 0; t < grid.count; ++t) {
      billopt::DateTime ts = grid.interval_start(t);
      double hour = ts.hour + ts.minute / 60.0;
      int doy = static_cast<int>(billopt::days_from_civil(ts.year, ts.month, ts.day) -
                                 billopt::days_from_civil(ts.year, 1, 1)) + 1;
      bool weekend = billopt::day_of_week(ts.year, ts.month, ts.day) >= 5;
      double jitter = 0.05 * std::sin(0.7254 * t) + 0.035 * std::sin(0.1117 * t + 1.3);
      mep.values[t] = mep_load(hour, doy, weekend, jitter);
      mdp.values[t] = mdp_load(hour, doy, weekend, jitter);
      pv.values[t] = pv_unit(hour, doy);
    }

    // Case-study maximum demands; PV peaks at exactly 1 kW per kW installed.
    mep.normalize_to(220.9);
    mdp.normalize_to(326.5);
    pv.normalize_to(1.0);

    billopt::write_profile_csv(out_dir + "/mep_load.csv", grid, mep.values, "kw");
    billopt::write_profile_csv(out_dir + "/mdp_load.csv", grid, mdp.values, "kw");
    billopt::write_profile_csv(out_dir + "/pv_unit.csv", grid, pv.values, "kw_per_kw");
    std::cout << "wrote mep_load.csv, mdp_load.csv, pv_unit.csv under " << out_dir << " ("
              << grid.count << " rows each)\n";
  } catch (const std::exception& e) {
    std::cerr << "make-profiles: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
