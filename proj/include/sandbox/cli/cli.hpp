#pragma once

#include "sandbox/common/error.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace sandbox::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;       // bad flags or unusable input
inline constexpr int kExitValidation = 2;  // persona rejected, scenario expectation missed
inline constexpr int kExitRuntime = 3;     // agent unreachable, aborted session, I/O

int exit_code_for(Errc code);

// args excludes the program name. Long-running subcommands (agent run, serve)
// return when SIGINT or SIGTERM arrives.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace sandbox::cli
