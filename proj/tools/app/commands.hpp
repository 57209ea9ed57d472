#pragma once

#include <iosfwd>

#include "config.hpp"

namespace pslab::app {

enum ExitCode : int { kExitOk = 0, kExitCriterion = 1, kExitUsage = 2, kExitResource = 3 };

int cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_massfn(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_singular(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_constants(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_fk(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& err);

// Dispatches on config.command and maps library errors to exit codes.
int run_command(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace pslab::app
