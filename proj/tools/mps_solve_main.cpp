#include <iostream>

#include "billopt/solver.hpp"

// Reference implementation of the external-solver subprocess contract:
//   billopt-mps-solve <problem.mps> <result file>
// Reads the MPS problem, solves it with the bundled simplex, and writes the
// result file (status / objective / var lines). Useful both for wiring tests
// and as a template for adapters around real external solvers.

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: billopt-mps-solve <problem.mps> <result file>\n";
    return 64;
  }
  try {
    billopt::LpProblem problem = billopt::read_mps_file(argv[1]);
    billopt::RawSolution solution = billopt::solve_bundled(problem, billopt::SolverConfig{});
    billopt::write_result_file(solution, problem, argv[2]);
  } catch (const std::exception& e) {
    std::cerr << "billopt-mps-solve: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
