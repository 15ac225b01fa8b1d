#ifndef BILLOPT_TESTS_LP_CHECK_HPP
#define BILLOPT_TESTS_LP_CHECK_HPP

#include <cmath>
#include <string>
#include <vector>

#include "billopt/solver.hpp"

// Independent optimality certificate for a claimed LP solution: primal
// feasibility, dual sign conditions, and complementary slackness together
// certify optimality without trusting the solver's internals. Reduced costs
// are recomputed here from the returned row duals.
namespace lp_check {

struct Report {
  bool ok = true;
  std::string detail;

  void fail(const std::string& what) {
    if (ok) detail = what;
    ok = false;
  }
};

inline Report certify_optimal(const billopt::LpProblem& lp, const billopt::RawSolution& sol,
                              double tol = 1e-6) {
  using billopt::RowSense;
  Report report;
  if (sol.status != billopt::SolveStatus::optimal) {
    report.fail("status is not optimal: " + std::string(billopt::to_string(sol.status)));
    return report;
  }
  const auto& x = sol.variable_values;
  const auto& y = sol.row_duals;
  if (x.size() != lp.vars.size() || y.size() != lp.rows.size()) {
    report.fail("solution size mismatch");
    return report;
  }

  // Primal feasibility: bounds and rows.
  for (size_t j = 0; j < lp.vars.size(); ++j) {
    if (x[j] < lp.vars[j].lower - tol || x[j] > lp.vars[j].upper + tol)
      report.fail("bound violated for " + lp.vars[j].name);
  }
  std::vector<double> activity(lp.rows.size(), 0.0);
  for (size_t i = 0; i < lp.rows.size(); ++i) {
    for (auto [j, a] : lp.rows[i].coeffs) activity[i] += a * x[j];
    double resid = activity[i] - lp.rows[i].rhs;
    bool bad = (lp.rows[i].sense == RowSense::le && resid > tol) ||
               (lp.rows[i].sense == RowSense::ge && resid < -tol) ||
               (lp.rows[i].sense == RowSense::eq && std::fabs(resid) > tol);
    if (bad) report.fail("row violated: " + lp.rows[i].name);
  }

  // Dual sign conditions. Minimization with rows a.x <= b wants y <= 0,
  // a.x >= b wants y >= 0, equalities are free.
  for (size_t i = 0; i < lp.rows.size(); ++i) {
    if (lp.rows[i].sense == RowSense::le && y[i] > tol)
      report.fail("dual sign broken on <= row " + lp.rows[i].name);
    if (lp.rows[i].sense == RowSense::ge && y[i] < -tol)
      report.fail("dual sign broken on >= row " + lp.rows[i].name);
    // Complementary slackness on rows.
    double resid = activity[i] - lp.rows[i].rhs;
    if (lp.rows[i].sense != RowSense::eq && std::fabs(y[i]) > tol &&
        std::fabs(resid) > tol * (1.0 + std::fabs(lp.rows[i].rhs)))
      report.fail("row complementarity broken: " + lp.rows[i].name);
  }

  // Reduced costs from the duals; sign conditions at bounds.
  std::vector<double> d(lp.vars.size());
  for (size_t j = 0; j < lp.vars.size(); ++j) d[j] = lp.vars[j].objective;
  for (size_t i = 0; i < lp.rows.size(); ++i)
    for (auto [j, a] : lp.rows[i].coeffs) d[j] -= y[i] * a;
  for (size_t j = 0; j < lp.vars.size(); ++j) {
    const auto& v = lp.vars[j];
    double scale = 1.0 + std::fabs(v.objective);
    bool at_lower = x[j] <= v.lower + tol;
    bool at_upper = x[j] >= v.upper - tol;
    if (at_lower && at_upper) continue;  // fixed or degenerate interval
    if (at_lower) {
      if (d[j] < -tol * scale) report.fail("reduced cost negative at lower bound: " + v.name);
    } else if (at_upper) {
      if (d[j] > tol * scale) report.fail("reduced cost positive at upper bound: " + v.name);
    } else {
      if (std::fabs(d[j]) > tol * scale) report.fail("interior reduced cost nonzero: " + v.name);
    }
  }

  // Strong duality: c.x == y.b + bound terms, equivalently c.x - y.b equals
  // the reduced-cost value at the active bounds.
  double primal = 0.0;
  for (size_t j = 0; j < lp.vars.size(); ++j) primal += lp.vars[j].objective * x[j];
  double dual = 0.0;
  for (size_t i = 0; i < lp.rows.size(); ++i) dual += y[i] * lp.rows[i].rhs;
  for (size_t j = 0; j < lp.vars.size(); ++j) dual += d[j] * x[j];
  if (std::fabs(primal - dual) > 1e-6 * (1.0 + std::fabs(primal)))
    report.fail("strong duality identity off by " + std::to_string(primal - dual));
  if (std::fabs(primal - sol.objective) > 1e-6 * (1.0 + std::fabs(primal)))
    report.fail("reported objective disagrees with c.x");
  return report;
}

}  // namespace lp_check

#endif
