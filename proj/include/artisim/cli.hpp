#ifndef ARTISIM_CLI_HPP
#define ARTISIM_CLI_HPP

#include <iosfwd>

namespace artisim {

/// Exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,     // bad arguments or unreadable input
  kExitRefused = 2,   // reverse run with a non-stabilizing gain
  kExitAborted = 3,   // jackknife guard stopped a simulation
};

/// Entry point shared by the executable and the tests.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace artisim

#endif  // ARTISIM_CLI_HPP
