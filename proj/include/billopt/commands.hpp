#ifndef BILLOPT_COMMANDS_HPP
#define BILLOPT_COMMANDS_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "billopt/run_config.hpp"

namespace billopt {

// CLI command bodies. All throw the module exception types on failure; the
// CLI front end maps those to exit codes. Output files land in `out_dir`
// (created if missing); progress goes to `out`.

// Solves one month and writes the bill breakdown and dispatch CSVs.
void cmd_bill(const RunConfig& config, const std::string& out_dir, std::ostream& out);

// Runs the configured sweep scenario and writes one monthly-detail CSV per
// scenario plus one summary CSV per (scenario, tariff).
void cmd_sweep(const RunConfig& config, const std::string& out_dir, std::ostream& out);

// Battery value added per sweep point, one CSV per tariff.
void cmd_bva(const RunConfig& config, const std::string& out_dir, std::ostream& out);

// Parses and coverage-checks tariff files; verifies the serialization
// round-trip. Throws on the first bad file.
void cmd_validate_tariff(const std::vector<std::string>& paths, std::ostream& out);

}  // namespace billopt

#endif
