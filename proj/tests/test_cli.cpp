#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "billopt/billing.hpp"
#include "billopt/commands.hpp"

using namespace billopt;
namespace fs = std::filesystem;

namespace {

std::string data_file(const std::string& name) {
  return std::string(BILLOPT_DATA_DIR) + "/" + name;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("billopt-cli-" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Minimal single-tariff config against the shipped data files.
std::string write_small_config(const TempDir& dir, double pv, double bes_power,
                               const std::string& name = "cfg.json") {
  std::ofstream out(dir.path / name);
  out << "{\n"
      << "  \"year\": 2019,\n"
      << "  \"resolution_minutes\": 60,\n"
      << "  \"load_profile\": \"" << data_file("profiles/mep_load.csv") << "\",\n"
      << "  \"pv_unit_profile\": \"" << data_file("profiles/pv_unit.csv") << "\",\n"
      << "  \"tariffs\": [\"" << data_file("tariffs/e19tou.json") << "\"],\n"
      << "  \"pv_capacity_kw\": " << pv << ",\n"
      << "  \"battery\": {\"power_kw\": " << bes_power << ", \"duration_hours\": 2.0},\n"
      << "  \"workers\": 2,\n"
      << "  \"bill\": {\"month\": 7}\n"
      << "}\n";
  out.close();
  return (dir.path / name).string();
}

}  // namespace

TEST_CASE("shipped example configs load") {
  for (const char* name : {"configs/mep.json", "configs/mdp.json"}) {
    RunConfig cfg = load_run_config(data_file(name));
    CHECK(cfg.year == 2019);
    CHECK(cfg.tariff_paths.size() == 5);
    CHECK(cfg.has_sweep);
    CHECK(cfg.sweep_values.size() == 10);
    CHECK(cfg.baseline_tariff == "E19TOU");
    LoadedInputs inputs = load_inputs(cfg);
    CHECK(inputs.site.grid.count == 8760);
    CHECK(inputs.tariffs.size() == 5);
    double peak = 0.0;
    for (double v : inputs.pv_unit.per_kw_output) peak = std::max(peak, v);
    CHECK(peak == 1.0);
  }
  RunConfig mep = load_run_config(data_file("configs/mep.json"));
  CHECK(mep.pv_capacity_kw == 231.8);
  CHECK(mep.battery.power_rating_kw == 250.0);
  CHECK(mep.battery.energy_rating_kwh == 500.0);
}

TEST_CASE("config validation failures") {
  TempDir dir;
  std::string path = write_small_config(dir, 0.0, 0.0);

  RunConfig cfg = load_run_config(path);
  cfg.resolution_minutes = 45;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = load_run_config(path);
  cfg.tariff_paths.push_back(dir.path / "missing.json");
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = load_run_config(path);
  cfg.relative_mode = "percent";
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  std::ofstream bad(dir.path / "broken.json");
  bad << "{ not json";
  bad.close();
  CHECK_THROWS_AS(load_run_config((dir.path / "broken.json").string()), ParseError);
}

TEST_CASE("profile resampling through the config pipeline") {
  TempDir dir;
  std::string path = write_small_config(dir, 0.0, 0.0);
  RunConfig cfg = load_run_config(path);
  cfg.resolution_minutes = 30;
  cfg.profile_resolution_minutes = 60;
  LoadedInputs inputs = load_inputs(cfg);
  CHECK(inputs.site.grid.count == 2 * 8760);
  CHECK(inputs.site.base_demand_kw[0] == inputs.site.base_demand_kw[1]);  // repeated power
}

TEST_CASE("cmd_bill: zero-asset total matches the direct bill and is reproducible") {
  TempDir dir;
  std::string path = write_small_config(dir, 0.0, 0.0);
  RunConfig cfg = load_run_config(path);

  std::ostringstream out1;
  cmd_bill(cfg, (dir.path / "out1").string(), out1);
  CHECK(out1.str().find("status optimal") != std::string::npos);

  // Direct computation of the same month.
  LoadedInputs inputs = load_inputs(cfg);
  MonthlyInstance inst = build_instance(inputs.site, inputs.tariffs[0], cfg.battery, 2019, 7,
                                        0.0, &inputs.pv_unit);
  BillBreakdown direct = bill_of_dispatch(inst, idle_dispatch(cfg.battery, inst.grid));
  std::ostringstream expect;
  expect << "total ";
  CHECK(out1.str().find(expect.str()) != std::string::npos);

  std::string bill_csv = read_file(dir.path / "out1" / "bill_E19TOU_2019-07.csv");
  std::ostringstream total_line;
  char buf[40];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, direct.total);
  total_line << "total,," << std::string_view(buf, end - buf);
  CHECK_MESSAGE(bill_csv.find(total_line.str()) != std::string::npos,
                "expected '" << total_line.str() << "' in:\n" << bill_csv);

  // Identical run, byte-identical outputs.
  std::ostringstream out2;
  cmd_bill(cfg, (dir.path / "out2").string(), out2);
  CHECK(read_file(dir.path / "out1" / "bill_E19TOU_2019-07.csv") ==
        read_file(dir.path / "out2" / "bill_E19TOU_2019-07.csv"));
  CHECK(read_file(dir.path / "out1" / "dispatch_E19TOU_2019-07.csv") ==
        read_file(dir.path / "out2" / "dispatch_E19TOU_2019-07.csv"));

  // Dispatch CSV follows the profile reader conventions: ISO timestamps,
  // comma delimiting, one row per interval.
  std::istringstream dispatch(read_file(dir.path / "out1" / "dispatch_E19TOU_2019-07.csv"));
  std::string line;
  REQUIRE(std::getline(dispatch, line));
  CHECK(line ==
        "timestamp,base_kw,pv_kw,charge_kw,discharge_kw,soc_kwh,net_kw,import_kw");
  int rows = 0;
  while (std::getline(dispatch, line)) {
    CHECK_NOTHROW(parse_iso_datetime(line.substr(0, line.find(','))));
    ++rows;
  }
  CHECK(rows == 744);
}

TEST_CASE("cmd_bill configuration errors") {
  TempDir dir;
  std::string path = write_small_config(dir, 0.0, 0.0);
  RunConfig cfg = load_run_config(path);
  cfg.bill_month = 0;
  CHECK_THROWS_AS(cmd_bill(cfg, (dir.path / "out").string(), std::cout), ConfigError);
  cfg.bill_month = 7;
  cfg.bill_tariff = "NOPE";
  CHECK_THROWS_AS(cmd_bill(cfg, (dir.path / "out").string(), std::cout), ConfigError);
}

TEST_CASE("cmd_validate_tariff accepts the shipped files and rejects damage") {
  std::ostringstream out;
  cmd_validate_tariff({data_file("tariffs/e19tou.json"), data_file("tariffs/b19ops.json")},
                      out);
  CHECK(out.str().find("ok E19TOU") != std::string::npos);
  CHECK(out.str().find("ok B19OpS") != std::string::npos);

  TempDir dir;
  std::ofstream broken(dir.path / "t.json");
  broken << R"({"name":"X","seasons":[{"name":"all","from":"01-01","to":"12-31"}],)"
         << R"("periods":[{"name":"p","windows":[{"season":"all","hours":[0,23]}]}],)"
         << R"("energy_rates_per_kwh":{"p":0.1}})";  // hour 23 uncovered
  broken.close();
  CHECK_THROWS_AS(cmd_validate_tariff({(dir.path / "t.json").string()}, std::cout),
                  InvalidInput);
}

TEST_CASE("cli subprocess: exit codes and validate-tariff") {
  const char* exe = std::getenv("BILLOPT_CLI_BIN");
  REQUIRE_MESSAGE(exe != nullptr, "BILLOPT_CLI_BIN not set (ctest sets it)");
  std::string quiet = " > /dev/null 2>&1";

  int rc = std::system((std::string(exe) + " validate-tariff " +
                        data_file("tariffs/e19tou.json") + quiet)
                           .c_str());
  CHECK(WEXITSTATUS(rc) == 0);

  rc = std::system((std::string(exe) + " bill --config /nonexistent.json" + quiet).c_str());
  CHECK(WEXITSTATUS(rc) == 2);  // config error

  rc = std::system((std::string(exe) + " nonsense" + quiet).c_str());
  CHECK(WEXITSTATUS(rc) != 0);
}
