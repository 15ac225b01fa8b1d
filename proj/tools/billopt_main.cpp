#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "billopt/commands.hpp"

// billopt: time-of-use tariff bill optimization for consumers with PV and
// battery storage. Subcommands: bill, sweep, bva, validate-tariff.

namespace {

struct GlobalArgs {
  std::string config_path;
  std::string out_dir = "out";
  int resolution = 0;           // 0 = take from config
  std::string solver_backend;   // empty = take from config
  std::string baseline;         // empty = take from config
};

billopt::RunConfig load_with_overrides(const GlobalArgs& args) {
  billopt::RunConfig cfg = billopt::load_run_config(args.config_path);
  if (args.resolution > 0) cfg.resolution_minutes = args.resolution;
  if (!args.solver_backend.empty()) cfg.solver.backend = args.solver_backend;
  if (!args.baseline.empty()) cfg.baseline_tariff = args.baseline;
  cfg.validate();
  return cfg;
}

void add_common(CLI::App* cmd, GlobalArgs& args) {
  cmd->add_option("--config", args.config_path, "run configuration file")->required();
  cmd->add_option("--out", args.out_dir, "output directory (default: out)");
  cmd->add_option("--resolution", args.resolution, "override resolution in minutes (15/30/60)");
  cmd->add_option("--solver", args.solver_backend, "override solver backend (bundled/external)");
  cmd->add_option("--baseline", args.baseline, "override baseline tariff name");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"time-of-use tariff bill optimization for PV + storage consumers"};
  app.require_subcommand(1);

  GlobalArgs args;
  std::vector<std::string> tariff_files;

  CLI::App* bill = app.add_subcommand("bill", "solve one month and write bill + dispatch CSVs");
  add_common(bill, args);
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run the configured asset-size sweep");
  add_common(sweep_cmd, args);
  CLI::App* bva = app.add_subcommand("bva", "battery value added per sweep point");
  add_common(bva, args);
  CLI::App* validate = app.add_subcommand("validate-tariff", "parse and coverage-check tariffs");
  validate->add_option("files", tariff_files, "tariff files")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (bill->parsed()) billopt::cmd_bill(load_with_overrides(args), args.out_dir, std::cout);
    else if (sweep_cmd->parsed())
      billopt::cmd_sweep(load_with_overrides(args), args.out_dir, std::cout);
    else if (bva->parsed()) billopt::cmd_bva(load_with_overrides(args), args.out_dir, std::cout);
    else if (validate->parsed()) billopt::cmd_validate_tariff(tariff_files, std::cout);
  } catch (const billopt::ConfigError& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return 2;
  } catch (const billopt::ParseError& e) {
    std::cerr << "error: parse: " << e.what() << "\n";
    return 3;
  } catch (const billopt::InvalidInput& e) {
    std::cerr << "error: input: " << e.what() << "\n";
    return 4;
  } catch (const billopt::SolveError& e) {
    std::cerr << "error: solve: " << e.what() << "\n";
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
