#include "billopt/lp_problem.hpp"

#include <cmath>

namespace billopt {

int LpProblem::add_variable(std::string name, double lower, double upper, double objective) {
  vars.push_back({std::move(name), lower, upper, objective});
  return static_cast<int>(vars.size()) - 1;
}

void LpProblem::add_row(std::string name, std::vector<std::pair<int, double>> coeffs,
                        RowSense sense, double rhs) {
  rows.push_back({std::move(name), std::move(coeffs), sense, rhs});
}

void LpProblem::validate() const {
  for (const auto& v : vars) {
    if (std::isnan(v.lower) || std::isnan(v.upper) || std::isnan(v.objective))
      throw InvalidInput("variable '" + v.name + "' has a NaN bound or objective");
    if (v.lower > v.upper)
      throw InvalidInput("variable '" + v.name + "' has lower > upper");
  }
  for (const auto& r : rows) {
    if (std::isnan(r.rhs)) throw InvalidInput("row '" + r.name + "' has NaN rhs");
    for (auto [j, a] : r.coeffs) {
      if (j < 0 || j >= static_cast<int>(vars.size()))
        throw InvalidInput("row '" + r.name + "' references undeclared variable index " +
                           std::to_string(j));
      if (!std::isfinite(a))
        throw InvalidInput("row '" + r.name + "' has a non-finite coefficient");
    }
  }
}

}  // namespace billopt
