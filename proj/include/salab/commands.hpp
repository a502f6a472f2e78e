#ifndef SALAB_COMMANDS_HPP
#define SALAB_COMMANDS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "salab/config.hpp"

namespace salab {

inline constexpr const char* kVersion = "salab 1.0.0";
inline constexpr const char* kOutputDirEnv = "SALAB_OUT";

/// Process exit codes of the command-line tool.
enum class ExitCode : int {
  ok = 0,
  config_error = 2,
  divergence = 3,
  verdict_failure = 4,
  io_error = 5,
  usage = 64,
};

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

const std::vector<std::string>& command_names();

struct RunManifest {
  std::string command;
  std::string config_hash;
  std::string version = kVersion;
  std::string output_dir;
  std::vector<std::string> files;
  double wall_seconds = 0.0;
  std::string seed_rule;
  ExitCode status = ExitCode::ok;
};

/// 64-bit FNV-1a of `text`, as 16 lowercase hex digits.
std::string config_hash(const std::string& text);

/// Overrides applied on top of the config file, as given on the command line.
struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
  std::optional<int> jobs;
};

/// Applies overrides and resolves the output directory (flag, config, $SALAB_OUT, "out").
ExperimentConfig apply_overrides(ExperimentConfig config, const RunOverrides& overrides);

/// Runs one command, writing <out>/<command>.csv, <out>/report.txt, <out>/config.json and
/// <out>/manifest.txt. The returned status is ok or verdict_failure; configuration problems,
/// divergence and I/O failures surface as exceptions (see exit_code_for).
RunManifest run_command(const std::string& command, const ExperimentConfig& config);

/// Maps an exception escaping run_command to its exit code.
ExitCode exit_code_for(const std::exception& e);

}  // namespace salab

#endif  // SALAB_COMMANDS_HPP
