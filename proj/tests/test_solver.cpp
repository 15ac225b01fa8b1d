#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "billopt/solver.hpp"
#include "support/lp_check.hpp"

using namespace billopt;

TEST_CASE("one-variable floor: min x s.t. x >= 3") {
  LpProblem lp;
  int x = lp.add_variable("x", -kInf, kInf, 1.0);
  lp.add_row("floor", {{x, 1.0}}, RowSense::ge, 3.0);
  RawSolution sol = solve_bundled(lp, {});
  REQUIRE(sol.status == SolveStatus::optimal);
  CHECK(sol.objective == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(sol.variable_values[x] == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("upper bound binds: min -x s.t. x <= 5, x >= 0") {
  LpProblem lp;
  int x = lp.add_variable("x", 0.0, 5.0, -1.0);
  RawSolution sol = solve_bundled(lp, {});
  REQUIRE(sol.status == SolveStatus::optimal);
  CHECK(sol.objective == doctest::Approx(-5.0));
  CHECK(sol.variable_values[x] == doctest::Approx(5.0));
}

TEST_CASE("two-variable classic") {
  // max 3a + 5b s.t. a <= 4, 2b <= 12, 3a + 2b <= 18  ->  a=2, b=6, obj 36.
  LpProblem lp;
  int a = lp.add_variable("a", 0.0, kInf, -3.0);
  int b = lp.add_variable("b", 0.0, kInf, -5.0);
  lp.add_row("r1", {{a, 1.0}}, RowSense::le, 4.0);
  lp.add_row("r2", {{b, 2.0}}, RowSense::le, 12.0);
  lp.add_row("r3", {{a, 3.0}, {b, 2.0}}, RowSense::le, 18.0);
  RawSolution sol = solve_bundled(lp, {});
  REQUIRE(sol.status == SolveStatus::optimal);
  CHECK(sol.objective == doctest::Approx(-36.0));
  CHECK(sol.variable_values[a] == doctest::Approx(2.0));
  CHECK(sol.variable_values[b] == doctest::Approx(6.0));
  auto cert = lp_check::certify_optimal(lp, sol);
  CHECK_MESSAGE(cert.ok, cert.detail);
}

TEST_CASE("equality rows with free variables") {
  LpProblem lp;
  int x = lp.add_variable("x", -kInf, kInf, 2.0);
  int y = lp.add_variable("y", -kInf, kInf, 3.0);
  lp.add_row("sum", {{x, 1.0}, {y, 1.0}}, RowSense::eq, 10.0);
  lp.add_row("gap", {{x, 1.0}, {y, -1.0}}, RowSense::le, 4.0);
  // min 2x + 3y with x + y = 10: push x up to its limit x - y <= 4 -> x=7, y=3.
  RawSolution sol = solve_bundled(lp, {});
  REQUIRE(sol.status == SolveStatus::optimal);
  CHECK(sol.objective == doctest::Approx(23.0));
  auto cert = lp_check::certify_optimal(lp, sol);
  CHECK_MESSAGE(cert.ok, cert.detail);
}

TEST_CASE("infeasible and unbounded are reported") {
  LpProblem lp;
  int x = lp.add_variable("x", 0.0, 1.0, 1.0);
  lp.add_row("impossible", {{x, 1.0}}, RowSense::ge, 2.0);
  CHECK(solve_bundled(lp, {}).status == SolveStatus::infeasible);

  LpProblem lp2;
  lp2.add_variable("x", -kInf, kInf, 1.0);
  CHECK(solve_bundled(lp2, {}).status == SolveStatus::unbounded);
}

namespace {

// Random bounded-feasible LPs: x0 feasible by construction, so the instance
// is never infeasible and bounded variables keep it from being unbounded.
LpProblem random_lp(std::mt19937& rng, int nvars, int nrows) {
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  std::uniform_real_distribution<double> spread(0.5, 4.0);
  std::uniform_int_distribution<int> pick(0, nvars - 1);
  std::uniform_int_distribution<int> sense_pick(0, 2);

  std::vector<double> x0(nvars);
  for (double& v : x0) v = coef(rng);

  LpProblem lp;
  for (int j = 0; j < nvars; ++j) {
    double lo = x0[j] - spread(rng);
    double hi = x0[j] + spread(rng);
    lp.add_variable("x" + std::to_string(j), lo, hi, coef(rng));
  }
  for (int i = 0; i < nrows; ++i) {
    int nnz = 1 + pick(rng) % 4;
    std::vector<std::pair<int, double>> terms;
    double activity = 0.0;
    for (int k = 0; k < nnz; ++k) {
      int j = pick(rng);
      double a = coef(rng);
      if (a == 0.0) a = 1.0;
      terms.emplace_back(j, a);
      activity += a * x0[j];
    }
    int s = sense_pick(rng);
    if (s == 0) lp.add_row("r" + std::to_string(i), terms, RowSense::le, activity + spread(rng));
    else if (s == 1)
      lp.add_row("r" + std::to_string(i), terms, RowSense::ge, activity - spread(rng));
    else lp.add_row("r" + std::to_string(i), terms, RowSense::eq, activity);
  }
  return lp;
}

}  // namespace

TEST_CASE("random LPs pass the optimality certificate") {
  std::mt19937 rng(20240811);
  for (int trial = 0; trial < 60; ++trial) {
    int nvars = 2 + trial % 17;
    int nrows = 1 + (trial * 7) % 23;
    LpProblem lp = random_lp(rng, nvars, nrows);
    RawSolution sol = solve_bundled(lp, {});
    REQUIRE_MESSAGE(sol.status == SolveStatus::optimal,
                    "trial " << trial << ": " << sol.message);
    auto cert = lp_check::certify_optimal(lp, sol);
    CHECK_MESSAGE(cert.ok, "trial " << trial << ": " << cert.detail);
  }
}

TEST_CASE("bundled solver is deterministic") {
  std::mt19937 rng(7);
  LpProblem lp = random_lp(rng, 12, 15);
  RawSolution a = solve_bundled(lp, {});
  RawSolution b = solve_bundled(lp, {});
  REQUIRE(a.status == SolveStatus::optimal);
  CHECK(a.objective == b.objective);  // bit-identical
  CHECK(a.variable_values == b.variable_values);
}

TEST_CASE("mps round-trip preserves the optimum") {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    LpProblem lp = random_lp(rng, 8, 9);
    RawSolution direct = solve_bundled(lp, {});
    REQUIRE(direct.status == SolveStatus::optimal);

    auto path = std::filesystem::temp_directory_path() /
                ("billopt-test-" + std::to_string(trial) + ".mps");
    write_mps_file(lp, path.string());
    LpProblem back = read_mps_file(path.string());
    std::filesystem::remove(path);

    REQUIRE(back.vars.size() == lp.vars.size());
    REQUIRE(back.rows.size() == lp.rows.size());
    RawSolution relayed = solve_bundled(back, {});
    REQUIRE(relayed.status == SolveStatus::optimal);
    CHECK(relayed.objective ==
          doctest::Approx(direct.objective).epsilon(1e-9));
  }
}

TEST_CASE("external backend contract via the reference subprocess") {
  const char* exe = std::getenv("BILLOPT_MPS_SOLVE_BIN");
  REQUIRE_MESSAGE(exe != nullptr, "BILLOPT_MPS_SOLVE_BIN not set (ctest sets it)");

  std::mt19937 rng(1234);
  LpProblem lp = random_lp(rng, 10, 12);
  RawSolution direct = solve_bundled(lp, {});
  REQUIRE(direct.status == SolveStatus::optimal);

  SolverConfig cfg;
  cfg.backend = "external";
  cfg.external_command = exe;
  RawSolution relayed = solve(lp, cfg);
  REQUIRE(relayed.status == SolveStatus::optimal);
  CHECK(relayed.objective == doctest::Approx(direct.objective).epsilon(1e-6));
  for (size_t j = 0; j < lp.vars.size(); ++j)
    CHECK(relayed.variable_values[j] ==
          doctest::Approx(direct.variable_values[j]).epsilon(1e-6));
}

TEST_CASE("result file round-trip") {
  LpProblem lp;
  lp.add_variable("alpha", 0.0, 2.0, 1.0);
  lp.add_variable("beta", -1.0, 1.0, -1.0);
  RawSolution sol = solve_bundled(lp, {});
  REQUIRE(sol.status == SolveStatus::optimal);

  auto path = std::filesystem::temp_directory_path() / "billopt-test-result.txt";
  write_result_file(sol, lp, path.string());
  RawSolution back = read_result_file(path.string(), lp);
  std::filesystem::remove(path);
  CHECK(back.status == SolveStatus::optimal);
  CHECK(back.objective == sol.objective);
  CHECK(back.variable_values == sol.variable_values);
}
