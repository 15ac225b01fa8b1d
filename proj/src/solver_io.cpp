#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "billopt/solver.hpp"

namespace billopt {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

double parse_num(const std::string& tok, const std::string& where) {
  try {
    size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(where + ": bad number '" + tok + "'");
  }
}

}  // namespace

void write_mps(const LpProblem& problem, std::ostream& out) {
  problem.validate();
  out << "NAME billopt\n";
  out << "ROWS\n";
  out << " N COST\n";
  for (const auto& row : problem.rows) {
    char s = row.sense == RowSense::le ? 'L' : row.sense == RowSense::ge ? 'G' : 'E';
    out << ' ' << s << ' ' << row.name << '\n';
  }

  // Column-major traversal.
  std::vector<std::vector<std::pair<std::string, double>>> col_entries(problem.vars.size());
  for (const auto& row : problem.rows)
    for (auto [j, a] : row.coeffs)
      if (a != 0.0) col_entries[j].emplace_back(row.name, a);

  out << "COLUMNS\n";
  for (size_t j = 0; j < problem.vars.size(); ++j) {
    const auto& v = problem.vars[j];
    if (v.objective != 0.0) out << "    " << v.name << " COST " << num(v.objective) << '\n';
    for (const auto& [rname, a] : col_entries[j])
      out << "    " << v.name << ' ' << rname << ' ' << num(a) << '\n';
    if (v.objective == 0.0 && col_entries[j].empty())
      out << "    " << v.name << " COST 0\n";  // keep empty columns declared
  }

  out << "RHS\n";
  for (const auto& row : problem.rows)
    if (row.rhs != 0.0) out << "    RHS " << row.name << ' ' << num(row.rhs) << '\n';

  out << "BOUNDS\n";
  for (const auto& v : problem.vars) {
    bool lo_default = v.lower == 0.0;
    bool up_default = v.upper == kInf;
    if (v.lower == v.upper) {
      out << " FX BND " << v.name << ' ' << num(v.lower) << '\n';
      continue;
    }
    if (v.lower == -kInf && up_default) {
      out << " FR BND " << v.name << '\n';
      continue;
    }
    if (!lo_default) {
      if (v.lower == -kInf) out << " MI BND " << v.name << '\n';
      else out << " LO BND " << v.name << ' ' << num(v.lower) << '\n';
    }
    if (!up_default) out << " UP BND " << v.name << ' ' << num(v.upper) << '\n';
  }
  out << "ENDATA\n";
}

void write_mps_file(const LpProblem& problem, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write LP file: " + path);
  write_mps(problem, out);
  if (!out) throw ConfigError("write failed: " + path);
}

LpProblem read_mps_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open LP file: " + path);

  LpProblem problem;
  std::map<std::string, int> row_index;  // name -> row id, objective = -1
  std::map<std::string, int> var_index;
  std::string objective_name;

  enum Section { none, rows, columns, rhs, ranges, bounds } section = none;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string where = path + ":" + std::to_string(lineno);
    if (!line.empty() && line[0] == '*') continue;  // comment
    auto tok = tokenize(line);
    if (tok.empty()) continue;
    // Section headers start in column one; data lines are indented.
    bool header = !std::isspace(static_cast<unsigned char>(line[0]));
    if (header) {
      if (tok[0] == "NAME") continue;
      if (tok[0] == "ENDATA") break;
      if (tok[0] == "ROWS") { section = rows; continue; }
      if (tok[0] == "COLUMNS") { section = columns; continue; }
      if (tok[0] == "RHS") { section = rhs; continue; }
      if (tok[0] == "RANGES") { section = ranges; continue; }
      if (tok[0] == "BOUNDS") { section = bounds; continue; }
      throw ParseError(where + ": unknown section '" + tok[0] + "'");
    }

    switch (section) {
      case rows: {
        if (tok.size() != 2) throw ParseError(where + ": want '<sense> <name>'");
        if (tok[0] == "N") {
          if (objective_name.empty()) objective_name = tok[1];
          row_index[tok[1]] = -1;
        } else {
          RowSense sense;
          if (tok[0] == "L") sense = RowSense::le;
          else if (tok[0] == "G") sense = RowSense::ge;
          else if (tok[0] == "E") sense = RowSense::eq;
          else throw ParseError(where + ": unknown row sense '" + tok[0] + "'");
          row_index[tok[1]] = static_cast<int>(problem.rows.size());
          problem.add_row(tok[1], {}, sense, 0.0);
        }
        break;
      }
      case columns: {
        if (tok.size() != 3 && tok.size() != 5)
          throw ParseError(where + ": want '<col> <row> <val> [<row> <val>]'");
        auto it = var_index.find(tok[0]);
        int j;
        if (it == var_index.end()) {
          j = problem.add_variable(tok[0], 0.0, kInf, 0.0);
          var_index[tok[0]] = j;
        } else {
          j = it->second;
        }
        for (size_t k = 1; k + 1 < tok.size(); k += 2) {
          auto rit = row_index.find(tok[k]);
          if (rit == row_index.end()) throw ParseError(where + ": unknown row '" + tok[k] + "'");
          double a = parse_num(tok[k + 1], where);
          if (rit->second < 0) problem.vars[j].objective += a;
          else problem.rows[rit->second].coeffs.emplace_back(j, a);
        }
        break;
      }
      case rhs: {
        if (tok.size() != 3 && tok.size() != 5)
          throw ParseError(where + ": want '<set> <row> <val> [<row> <val>]'");
        for (size_t k = 1; k + 1 < tok.size(); k += 2) {
          auto rit = row_index.find(tok[k]);
          if (rit == row_index.end()) throw ParseError(where + ": unknown row '" + tok[k] + "'");
          if (rit->second >= 0) problem.rows[rit->second].rhs = parse_num(tok[k + 1], where);
        }
        break;
      }
      case ranges:
        throw ParseError(where + ": RANGES section is not supported");
      case bounds: {
        if (tok.size() < 3) throw ParseError(where + ": want '<type> <set> <col> [<val>]'");
        auto vit = var_index.find(tok[2]);
        if (vit == var_index.end()) throw ParseError(where + ": unknown column '" + tok[2] + "'");
        LpVariable& v = problem.vars[vit->second];
        const std::string& type = tok[0];
        if (type == "FR") { v.lower = -kInf; v.upper = kInf; }
        else if (type == "MI") v.lower = -kInf;
        else if (type == "PL") v.upper = kInf;
        else if (type == "LO" || type == "UP" || type == "FX") {
          if (tok.size() != 4) throw ParseError(where + ": bound type needs a value");
          double val = parse_num(tok[3], where);
          if (type == "LO") v.lower = val;
          else if (type == "UP") v.upper = val;
          else { v.lower = val; v.upper = val; }
        } else {
          throw ParseError(where + ": unsupported bound type '" + type + "'");
        }
        break;
      }
      case none:
        throw ParseError(where + ": data before any section header");
    }
  }
  problem.validate();
  return problem;
}

void write_result_file(const RawSolution& solution, const LpProblem& problem,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write result file: " + path);
  out << "status " << to_string(solution.status) << '\n';
  out << "objective " << num(solution.objective) << '\n';
  if (solution.status == SolveStatus::optimal) {
    for (size_t j = 0; j < problem.vars.size(); ++j)
      out << "var " << problem.vars[j].name << ' ' << num(solution.variable_values[j]) << '\n';
  }
  if (!out) throw ConfigError("write failed: " + path);
}

RawSolution read_result_file(const std::string& path, const LpProblem& problem) {
  std::ifstream in(path);
  if (!in) throw SolveError("external solver produced no result file at " + path);

  std::map<std::string, int> var_index;
  for (size_t j = 0; j < problem.vars.size(); ++j)
    var_index[problem.vars[j].name] = static_cast<int>(j);

  RawSolution out;
  out.variable_values.assign(problem.vars.size(), 0.0);
  bool have_status = false, have_objective = false;
  std::string line;
  int lineno = 0;
  size_t assigned = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string where = path + ":" + std::to_string(lineno);
    auto tok = tokenize(line);
    if (tok.empty()) continue;
    if (tok[0] == "status") {
      if (tok.size() != 2) throw ParseError(where + ": want 'status <value>'");
      if (tok[1] == "optimal") out.status = SolveStatus::optimal;
      else if (tok[1] == "infeasible") out.status = SolveStatus::infeasible;
      else if (tok[1] == "unbounded") out.status = SolveStatus::unbounded;
      else out.status = SolveStatus::numerical_failure;
      have_status = true;
    } else if (tok[0] == "objective") {
      if (tok.size() != 2) throw ParseError(where + ": want 'objective <value>'");
      out.objective = parse_num(tok[1], where);
      have_objective = true;
    } else if (tok[0] == "var") {
      if (tok.size() != 3) throw ParseError(where + ": want 'var <name> <value>'");
      auto it = var_index.find(tok[1]);
      if (it == var_index.end()) throw ParseError(where + ": unknown variable '" + tok[1] + "'");
      out.variable_values[it->second] = parse_num(tok[2], where);
      ++assigned;
    } else {
      throw ParseError(where + ": unknown directive '" + tok[0] + "'");
    }
  }
  if (!have_status) throw ParseError(path + ": missing status line");
  if (out.status == SolveStatus::optimal) {
    if (!have_objective) throw ParseError(path + ": missing objective line");
    if (assigned < problem.vars.size())
      out.message = "external result omitted " + std::to_string(problem.vars.size() - assigned) +
                    " variable value(s), defaulted to 0";
  }
  return out;
}

}  // namespace billopt
