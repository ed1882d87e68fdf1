#pragma once

#include <filesystem>
#include <string>

#include "ggl/config.hpp"

namespace ggl {

inline constexpr int kExitPass = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitStatFail = 2;
/// Stopped early on purpose (stop_after); resumable.
inline constexpr int kExitInterrupted = 3;

struct RunOutcome {
  int exit_code = kExitPass;
  std::filesystem::path dir;
  std::string status;  // complete | interrupted
  std::string message;
};

/// Writes manifest.json first, then results.csv and report.json, then
/// finalizes the manifest. Module errors propagate after the manifest is
/// marked failed.
RunOutcome run_experiment(const ExperimentConfig& config, const std::filesystem::path& dir);

/// Continues an interrupted run from its checkpoint; a completed run is a no-op.
RunOutcome resume_experiment(const std::filesystem::path& dir);

/// Default artifact directory: runs/<name or kind>-<hash prefix>.
std::filesystem::path default_output_dir(const ExperimentConfig& config);

/// %.17g; parses back to the same double.
std::string format_double(double v);

}  // namespace ggl
