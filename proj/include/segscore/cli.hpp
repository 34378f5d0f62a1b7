#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace segscore::cli {

/// Master seed used when --seed is not given.
inline constexpr std::uint64_t kDefaultSeed = 42;

enum ExitCode : int {
  kOk = 0,
  kTestFailed = 1,
  kUsageError = 2,
  kRuntimeError = 3,
};

/// Runs one command. `args` excludes the program name. Reports go to `out`,
/// diagnostics and usage text to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace segscore::cli
