#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace socialsim {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,    // diagnostics found / replay diverged
    kExitUsage = 2,      // bad arguments, unreadable or malformed input
    kExitScriptEnd = 3,  // player script exhausted while a prompt was pending
};

/// Runs the `socialsim` command line. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::istream& in);

}  // namespace socialsim
