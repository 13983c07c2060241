#pragma once

// Experiment orchestration behind the command line tool. Every command
// computes first and then writes its files once, in a fixed order, followed by
// manifest.json.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "gnefair/config.hpp"

namespace gnefair::experiment {

enum class Command { vgne, fgne, sweep, audit, reproduce_fig3, reproduce_fig4 };

/// "vgne", "fgne", "sweep", "audit", "reproduce-fig3", "reproduce-fig4".
std::string to_string(Command c);
/// Throws InvalidArgument.
Command command_from_string(const std::string& name);
/// Whether the command reads the configured game (the reproduce commands do not).
bool needs_game(Command c);

enum ExitCode : int {
  kSuccess = 0,
  kFailure = 1,
  kNoConvergence = 2,
  kInvalidConfig = 3,
  kMetricDomain = 4,
};

struct RunResult {
  int exit_code = kSuccess;
  std::vector<std::filesystem::path> files;
};

/// Runs one command. Diagnostics go to `err`; data goes only to files.
RunResult run(Command command, const config::ExperimentConfig& cfg, std::ostream& err);

/// Configuration used by the reproduce commands when no document is given.
config::ExperimentConfig default_config();

}  // namespace gnefair::experiment
