#include <unistd.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>

#include "billopt/solver.hpp"

namespace billopt {

namespace {

std::string unique_stem() {
  static std::atomic<unsigned> counter{0};
  unsigned id = counter.fetch_add(1);
  return "billopt-lp-" + std::to_string(static_cast<unsigned long>(::getpid())) + "-" +
         std::to_string(id);
}

}  // namespace

RawSolution solve_external(const LpProblem& problem, const SolverConfig& config) {
  std::string command = config.external_command;
  if (command.empty()) {
    const char* env = std::getenv("BILLOPT_EXTERNAL_SOLVER");
    if (env) command = env;
  }
  if (command.empty())
    throw ConfigError(
        "external backend selected but no command configured "
        "(set solver.external_command or BILLOPT_EXTERNAL_SOLVER)");

  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path();
  std::string stem = unique_stem();
  fs::path mps_path = dir / (stem + ".mps");
  fs::path result_path = dir / (stem + ".result");

  write_mps_file(problem, mps_path.string());
  std::string cmdline = command + " " + mps_path.string() + " " + result_path.string();
  int rc = std::system(cmdline.c_str());

  RawSolution out;
  if (rc != 0) {
    out.status = SolveStatus::numerical_failure;
    out.message = "external solver exited with code " + std::to_string(rc);
  } else {
    out = read_result_file(result_path.string(), problem);
  }
  std::error_code ec;
  fs::remove(mps_path, ec);
  fs::remove(result_path, ec);
  return out;
}

RawSolution solve(const LpProblem& problem, const SolverConfig& config) {
  config.validate();
  problem.validate();
  if (config.backend == "external") return solve_external(problem, config);
  return solve_bundled(problem, config);
}

}  // namespace billopt
