#ifndef DEEPLCP_CLI_HPP
#define DEEPLCP_CLI_HPP

#include <iosfwd>

namespace deeplcp::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// Results go to `out` as key=value lines; progress and diagnostics to `err`.
// Option values resolve as: command line, then DEEPLCP_<OPTION> environment
// variables, then the --run-config file.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace deeplcp::cli

#endif  // DEEPLCP_CLI_HPP
