#include "billopt/profiles.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace billopt {

namespace {

void check_series(const TimeGrid& grid, const std::vector<double>& values, const char* what,
                  double max_allowed) {
  if (static_cast<int>(values.size()) != grid.count)
    throw InvalidInput(std::string(what) + " series has " + std::to_string(values.size()) +
                       " entries, grid has " + std::to_string(grid.count));
  for (size_t i = 0; i < values.size(); ++i) {
    double v = values[i];
    if (!std::isfinite(v))
      throw InvalidInput(std::string(what) + " has non-finite value at index " + std::to_string(i));
    if (v < 0.0)
      throw InvalidInput(std::string(what) + " has negative value " + std::to_string(v) +
                         " at index " + std::to_string(i));
    if (v > max_allowed)
      throw InvalidInput(std::string(what) + " value " + std::to_string(v) + " at index " +
                         std::to_string(i) + " exceeds limit " + std::to_string(max_allowed));
  }
}

}  // namespace

SiteProfile::SiteProfile(TimeGrid grid_, std::vector<double> base_demand,
                         std::vector<double> pv_generation)
    : grid(grid_), base_demand_kw(std::move(base_demand)), pv_generation_kw(std::move(pv_generation)) {
  check_series(grid, base_demand_kw, "base demand", kInf);
  check_series(grid, pv_generation_kw, "pv generation", kInf);
}

PvUnitProfile::PvUnitProfile(TimeGrid grid_, std::vector<double> per_kw_output_)
    : grid(grid_), per_kw_output(std::move(per_kw_output_)) {
  check_series(grid, per_kw_output, "pv unit profile", 1.2);
}

namespace {

// Strips a trailing '\r' so files with CRLF endings parse the same way.
std::string_view trim_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace

std::vector<double> parse_profile_csv(const std::string& path, const TimeGrid& expected_grid,
                                      const std::string& value_column) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");

  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty file");
  std::string expected_header = "timestamp," + value_column;
  if (trim_cr(line) != expected_header)
    throw ParseError(path + ":1: expected header '" + expected_header + "', got '" + line + "'");

  std::vector<double> values;
  values.reserve(expected_grid.count);
  int row = 1;  // header was row 1
  std::int64_t prev_minutes = 0;
  bool have_prev = false;
  while (std::getline(in, line)) {
    ++row;
    std::string_view sv = trim_cr(line);
    if (sv.empty()) continue;
    size_t comma = sv.find(',');
    if (comma == std::string_view::npos)
      throw ParseError(path + ":" + std::to_string(row) + ": missing comma");
    std::string_view ts_text = sv.substr(0, comma);
    std::string_view val_text = sv.substr(comma + 1);

    int t = static_cast<int>(values.size());
    if (t >= expected_grid.count)
      throw ParseError(path + ":" + std::to_string(row) + ": extra row beyond grid end (grid has " +
                       std::to_string(expected_grid.count) + " intervals)");

    DateTime ts;
    try {
      ts = parse_iso_datetime(ts_text);
    } catch (const ParseError& e) {
      throw ParseError(path + ":" + std::to_string(row) + ": " + e.what());
    }
    std::int64_t ts_minutes = minutes_since_epoch(ts);
    if (have_prev && ts_minutes == prev_minutes)
      throw ParseError(path + ":" + std::to_string(row) + ": duplicate timestamp " +
                       format_iso(ts));
    DateTime expected = expected_grid.interval_start(t);
    if (!(ts == expected)) {
      std::int64_t expected_minutes = minutes_since_epoch(expected);
      if (ts_minutes > expected_minutes)
        throw ParseError(path + ":" + std::to_string(row) + ": missing interval " +
                         format_iso(expected) + " (file jumps to " + format_iso(ts) + ")");
      throw ParseError(path + ":" + std::to_string(row) + ": timestamp " + format_iso(ts) +
                       " does not align with grid (expected " + format_iso(expected) + ")");
    }
    prev_minutes = ts_minutes;
    have_prev = true;

    double value = 0.0;
    auto [ptr, ec] = std::from_chars(val_text.data(), val_text.data() + val_text.size(), value);
    if (ec != std::errc() || ptr != val_text.data() + val_text.size())
      throw ParseError(path + ":" + std::to_string(row) + ": non-numeric value '" +
                       std::string(val_text) + "'");
    if (!std::isfinite(value))
      throw ParseError(path + ":" + std::to_string(row) + ": non-finite value");
    if (value < 0.0)
      throw ParseError(path + ":" + std::to_string(row) + ": negative reading " +
                       std::string(val_text) + " rejected");
    values.push_back(value);
  }
  if (static_cast<int>(values.size()) < expected_grid.count)
    throw ParseError(path + ": missing interval " +
                     format_iso(expected_grid.interval_start(static_cast<int>(values.size()))) +
                     " (file ends after " + std::to_string(values.size()) + " of " +
                     std::to_string(expected_grid.count) + " rows)");
  return values;
}

void write_profile_csv(const std::string& path, const TimeGrid& grid,
                       const std::vector<double>& values, const std::string& value_column) {
  if (static_cast<int>(values.size()) != grid.count)
    throw InvalidInput("series length does not match grid");
  std::ofstream out(path);
  if (!out) throw InvalidInput(path + ": cannot open for writing");
  out << "timestamp," << value_column << "\n";
  char buf[40];
  for (int t = 0; t < grid.count; ++t) {
    // Shortest representation that round-trips the exact double.
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, values[t]);
    out << format_iso(grid.interval_start(t)) << ',' << std::string_view(buf, end - buf) << '\n';
  }
  if (!out) throw InvalidInput(path + ": write failed");
}

std::vector<double> resample(const std::vector<double>& series, int from_step_minutes,
                             int to_step_minutes) {
  if (from_step_minutes <= 0 || to_step_minutes <= 0)
    throw InvalidInput("resample steps must be positive");
  if (from_step_minutes == to_step_minutes) return series;
  if (to_step_minutes % from_step_minutes == 0) {
    // Downsample: average power over each coarse interval.
    int k = to_step_minutes / from_step_minutes;
    if (series.size() % k != 0)
      throw InvalidInput("series length " + std::to_string(series.size()) +
                         " is not a multiple of the step ratio " + std::to_string(k));
    std::vector<double> out(series.size() / k);
    for (size_t i = 0; i < out.size(); ++i) {
      double sum = 0.0;
      for (int j = 0; j < k; ++j) sum += series[i * k + j];
      out[i] = sum / k;
    }
    return out;
  }
  if (from_step_minutes % to_step_minutes == 0) {
    // Upsample: constant power within the coarse interval.
    int k = from_step_minutes / to_step_minutes;
    std::vector<double> out;
    out.reserve(series.size() * k);
    for (double v : series)
      for (int j = 0; j < k; ++j) out.push_back(v);
    return out;
  }
  throw InvalidInput("incompatible resample steps " + std::to_string(from_step_minutes) + " -> " +
                     std::to_string(to_step_minutes) +
                     " (one must be an integer multiple of the other)");
}

std::vector<double> scale_pv(const PvUnitProfile& unit, double capacity_kw) {
  if (!std::isfinite(capacity_kw) || capacity_kw < 0.0)
    throw InvalidInput("pv capacity must be finite and >= 0, got " + std::to_string(capacity_kw));
  std::vector<double> out(unit.per_kw_output.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = unit.per_kw_output[i] * capacity_kw;
  return out;
}

}  // namespace billopt
