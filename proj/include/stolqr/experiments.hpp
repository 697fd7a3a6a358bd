#pragma once

// Subcommand bodies. Each returns a JSON report for stdout plus the files it
// wants written under the output directory; nothing here touches the disk,
// which keeps the commands easy to test and byte-for-byte reproducible.

#include <string>
#include <utility>
#include <vector>

#include "stolqr/config.hpp"

namespace stolqr {

struct CommandOutput {
  std::string report;                                       // JSON, newline terminated
  std::vector<std::pair<std::string, std::string>> files;   // relative path, contents
};

CommandOutput cmd_riccati(const RunConfig& cfg);
CommandOutput cmd_model_based(const RunConfig& cfg);
CommandOutput cmd_model_free(const RunConfig& cfg);

/// residuals.csv: `N,rep,residual,err_L,admissible`, one row per run (failed
/// runs carry nan), then one `N,mean,...` row per N with the means over the
/// solved runs; admissible becomes the fraction of all reps with a certified
/// gain (failed runs count as not admissible).
CommandOutput cmd_experiment_residuals(const RunConfig& cfg);

/// trajectories.csv: `k,x1_mean,…,xn_mean,phase`. The N collection rollouts
/// are averaged over k = 0…K−1 (phase collect); each rollout then continues
/// individually under the estimated gain for closed_loop_steps steps and the
/// states k = K…K+steps are averaged (phase closed_loop).
CommandOutput cmd_experiment_trajectories(const RunConfig& cfg);

/// scaling.csv over experiment.grid (default: every N_values entry with
/// K = data.K) and the fitted log-log slope of the median ‖L̂ − L*‖_F.
CommandOutput cmd_experiment_scaling(const RunConfig& cfg);

}  // namespace stolqr
