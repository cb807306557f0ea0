#ifndef SYMCOMP_CLI_CLI_HPP
#define SYMCOMP_CLI_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace symcomp {

enum ExitCode : int {
  exit_ok = 0,
  exit_usage = 1,
  exit_schema = 2,
  exit_infeasible = 3,
  exit_verification = 4,
};

/*
 * Entry point behind the symcomp binary. args excludes the program name.
 * Subcommands: synth, monolithic, bench, simulate, sweep-gamma, verify.
 * Artifacts go to --out (created if missing).
 */
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace symcomp

#endif
