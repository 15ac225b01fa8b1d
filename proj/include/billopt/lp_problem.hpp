#ifndef BILLOPT_LP_PROBLEM_HPP
#define BILLOPT_LP_PROBLEM_HPP

#include <string>
#include <utility>
#include <vector>

#include "billopt/common.hpp"

namespace billopt {

enum class RowSense { le, ge, eq };

struct LpVariable {
  std::string name;
  double lower = 0.0;
  double upper = kInf;
  double objective = 0.0;
};

struct LpRow {
  std::string name;
  std::vector<std::pair<int, double>> coeffs;  // (variable index, coefficient)
  RowSense sense = RowSense::le;
  double rhs = 0.0;
};

// Sparse minimization LP. Plain data; immutable once handed to a solver.
struct LpProblem {
  std::vector<LpVariable> vars;
  std::vector<LpRow> rows;

  int add_variable(std::string name, double lower, double upper, double objective);
  void add_row(std::string name, std::vector<std::pair<int, double>> coeffs, RowSense sense,
               double rhs);

  // Every coefficient references a declared variable and no value is NaN.
  void validate() const;
};

}  // namespace billopt

#endif
