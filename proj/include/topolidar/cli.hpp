#ifndef TOPOLIDAR_CLI_HPP
#define TOPOLIDAR_CLI_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace topolidar::cli {

enum ExitCode : int { kOk = 0, kUsageError = 1, kDataError = 2 };

struct RunConfig {
  std::string subcommand;
  std::uint64_t seed = 0;
  std::filesystem::path output;
};

/// Parses argv (argv[0] is the program name), runs one subcommand and returns
/// the process exit code. Results go to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Same, with the arguments after the program name.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace topolidar::cli

#endif  // TOPOLIDAR_CLI_HPP
