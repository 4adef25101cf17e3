#pragma once

namespace edgeimp::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

/// Parses arguments, runs one subcommand and maps exceptions to exit codes.
/// Diagnostics go to stderr; summaries to stdout.
int run(int argc, const char* const* argv);

}  // namespace edgeimp::cli
