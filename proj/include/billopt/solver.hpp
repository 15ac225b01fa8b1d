#ifndef BILLOPT_SOLVER_HPP
#define BILLOPT_SOLVER_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "billopt/lp_problem.hpp"

namespace billopt {

enum class SolveStatus { optimal, infeasible, unbounded, numerical_failure };

const char* to_string(SolveStatus status);

struct RawSolution {
  SolveStatus status = SolveStatus::numerical_failure;
  double objective = 0.0;
  std::vector<double> variable_values;  // per LpProblem variable
  std::vector<double> row_duals;        // y, per row: reduced cost of x_j is c_j - y.a_j
  std::vector<double> reduced_costs;
  long iterations = 0;
  std::string message;
};

struct SolverConfig {
  std::string backend = "bundled";  // "bundled" or "external"
  double feasibility_tolerance = 1e-7;
  double optimality_tolerance = 1e-7;
  long max_iterations = 0;          // 0 = scale with problem size
  double time_limit_seconds = 0.0;  // 0 = no limit
  // Command used by the external backend; falls back to the
  // BILLOPT_EXTERNAL_SOLVER environment variable when empty. Invoked as:
  //   <command> <problem.mps> <result file>
  std::string external_command;

  void validate() const;
};

// Solves through the configured backend. Deterministic for the bundled
// backend: identical inputs produce bit-identical results.
RawSolution solve(const LpProblem& problem, const SolverConfig& config = {});

// Bundled sparse primal simplex (bounded variables, two phases).
RawSolution solve_bundled(const LpProblem& problem, const SolverConfig& config);

// External backend: writes the problem in MPS form, runs the subprocess,
// parses the result file (see README for the contract).
RawSolution solve_external(const LpProblem& problem, const SolverConfig& config);

// LP interchange (free-form MPS). Variable and row names are preserved.
void write_mps(const LpProblem& problem, std::ostream& out);
void write_mps_file(const LpProblem& problem, const std::string& path);
LpProblem read_mps_file(const std::string& path);

// Result-file schema used by the external-backend contract:
//   status <optimal|infeasible|unbounded|numerical-failure>
//   objective <value>
//   var <name> <value>     (one line per variable; order free)
void write_result_file(const RawSolution& solution, const LpProblem& problem,
                       const std::string& path);
RawSolution read_result_file(const std::string& path, const LpProblem& problem);

}  // namespace billopt

#endif
