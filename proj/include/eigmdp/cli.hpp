#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace eigmdp {

/// Exit statuses of the command-line harness.
enum ExitCode : int {
  kExitOk = 0,
  kExitParse = 2,        ///< unknown subcommand or flag, malformed value
  kExitInvalid = 3,      ///< well-formed but invalid parameter combination
  kExitIo = 4,           ///< output directory or file could not be written
  kExitNumerical = 5,    ///< numerical failure inside a computation
};

/// Default output directory, overridden by the EIGMDP_OUTPUT_DIR
/// environment variable and then by --output-dir.
inline constexpr const char* kDefaultOutputDir = "eigmdp-results";
inline constexpr const char* kOutputDirEnv = "EIGMDP_OUTPUT_DIR";

/// Runs one subcommand. `args` excludes the program name. Writes a JSON
/// record (and CSV curves where applicable) into the output directory and
/// a summary table to `out`; diagnostics go to `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace eigmdp
