#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nspcert::cli {

/// Exit codes of `run`.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitDomain = 3;

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "NSPCERT_OUT_DIR";

/// Parses `args` (without the program name), runs one subcommand, writes its
/// CSV or JSON result and prints a one-line summary to `out`. Diagnostics and
/// usage text go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nspcert::cli
