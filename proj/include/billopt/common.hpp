#ifndef BILLOPT_COMMON_HPP
#define BILLOPT_COMMON_HPP

#include <limits>
#include <stdexcept>
#include <string>

namespace billopt {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Malformed input data (CSV rows, tariff files, configs). Message names the
// file and the first offending row where applicable.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Structurally valid input that violates a model precondition (coverage gap,
// negative capacity, series length mismatch, ...).
class InvalidInput : public std::runtime_error {
 public:
  explicit InvalidInput(const std::string& msg) : std::runtime_error(msg) {}
};

// Run configuration problems: missing files, unknown tariff names, bad flags.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A solve that terminated without a usable optimum.
class SolveError : public std::runtime_error {
 public:
  explicit SolveError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace billopt

#endif
