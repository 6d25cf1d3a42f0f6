#ifndef RELYROUTE_TOOLS_COMMANDS_HPP
#define RELYROUTE_TOOLS_COMMANDS_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace relyroute::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_usage = 1,
  exit_input = 2,
  exit_budget = 3,
};

/// Runs one `relyroute` invocation; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace relyroute::cli

#endif // RELYROUTE_TOOLS_COMMANDS_HPP
