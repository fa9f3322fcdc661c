#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace sublin {

namespace exit_code {
constexpr int kOk = 0;
constexpr int kValidation = 1;   // bad config, infeasible λ, unwritable output
constexpr int kCheckFailed = 2;  // a mathematical check failed; failure.json names it
}  // namespace exit_code

struct CliCommand {
  std::string command;  // constants | verify-lemmas | solve | reference | pipeline | sweep
  std::filesystem::path config;
  std::optional<std::filesystem::path> output;
  std::optional<std::uint64_t> seed;
  int verbosity = 0;
};

/// Runs one command; artifacts go to `cmd.output` with a manifest. Never throws.
int run_command(const CliCommand& cmd, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to run_command.
int run_cli(int argc, char** argv);

}  // namespace sublin
