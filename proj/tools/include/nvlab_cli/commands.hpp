#pragma once

#include <ostream>

#include "nvlab_cli/config.hpp"

namespace nvlab::cli {

// Each command validates its inputs (UsageError), refuses conflicting output
// directories (IoError), runs the study and writes its tables. A short
// human-readable summary goes to `log`.
void cmd_problems(const RunConfig& config, std::ostream& log);
void cmd_flow_check(const RunConfig& config, std::ostream& log);
void cmd_convergence(const RunConfig& config, std::ostream& log);
void cmd_limit_law(const RunConfig& config, std::ostream& log);
void cmd_source_term(const RunConfig& config, std::ostream& log);
void cmd_mlmc(const RunConfig& config, std::ostream& log);

/// Dispatches on config.command.
void run_command(const RunConfig& config, std::ostream& log);

/// Parses argv (config file first, then flags), runs the command and maps
/// failures to exit codes: 0 ok, 1 usage, 2 numerical failure, 3 I/O.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nvlab::cli
