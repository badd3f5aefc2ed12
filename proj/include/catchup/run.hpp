#pragma once

#include <optional>
#include <string>
#include <vector>

#include "catchup/config.hpp"
#include "catchup/lyapunov.hpp"
#include "catchup/solver.hpp"

namespace catchup {

// Process exit codes shared by the library runner and the CLI front-end.
inline constexpr int kExitOk = 0;         // run completed, criteria satisfied
inline constexpr int kExitInput = 1;      // bad config, bad step, inadmissible x0
inline constexpr int kExitCriterion = 2;  // decay or refinement criterion failed
inline constexpr int kExitSolver = 3;     // resolvent failure mid-run (truncation)

struct RunOutcome {
  int exit_code = kExitOk;
  std::string message;  // one-line status, also the last line of the report
  std::string scenario;
  double h = 0;
  std::vector<std::string> files;  // paths written, in order
  std::optional<DecayReport> decay;
  std::optional<ConvergenceReport> convergence;
  std::optional<Trajectory> trajectory;
  std::string report_text;
  double wall_seconds = 0;
};

// CSV contract: header "t, x_1, ..., x_n, speed" plus ", V, W, lyap_composite"
// when a pair is supplied; shortest round-trip decimal for every number; after
// the trajectory leaves dom V the three pair columns hold nan.
void emit_trajectory(const Trajectory& traj, const LyapunovPair* pair,
                     const std::string& path);

RunOutcome run_bundle(const ScenarioBundle& bundle, const RunSettings& run,
                      const LyapunovSettings& lyap, const std::string& notes = "");
RunOutcome run_config(const ScenarioConfig& cfg);

}  // namespace catchup
