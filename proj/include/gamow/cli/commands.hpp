#pragma once

#include <exception>
#include <iosfwd>
#include <string>
#include <vector>

#include "gamow/cli/run_config.hpp"

namespace gamow::cli {

struct CommandResult {
  std::vector<std::string> files; ///< written outputs, in order
  std::string summary;            ///< short text for the terminal
};

/// Pole table: n, Re k a, Im k a, Re E, Gamma, tau, residual, seed deviation,
/// warning. Default k_max is 16 / a.
CommandResult cmd_poles(const RunConfig &config);

/// psi on [0, a] at every requested time; policy both adds the sup-norm
/// discrepancy between the two representations.
CommandResult cmd_evolve(const RunConfig &config);

/// Nonescape curve (t, P, method) plus the regime report as JSON.
CommandResult cmd_survival(const RunConfig &config);

/// Poles, regimes and crossover in one human-readable summary.
CommandResult cmd_report(const RunConfig &config);

/// 0 ok, 1 usage, 2 pole audit failure, 3 quadrature failure.
int exit_code(const std::exception &e);

/// Writes through a temporary file in the same directory and renames it.
void write_atomic(const std::string &path, const std::string &content);

/// 17 significant digits, '.' decimal point.
std::string format_number(double v);

} // namespace gamow::cli
