#pragma once

// Empirical checks on the data-driven estimate: admissibility of L̂, the
// margin σ_min(I − αC_L), and how ‖L̂ − L*‖ scales with the sample count NK.

#include <filesystem>
#include <utility>
#include <vector>

#include "stolqr/datagen.hpp"
#include "stolqr/riccati.hpp"
#include "stolqr/sdp.hpp"

namespace stolqr {

/// σ_min(I − αC_L).
double stability_margin(const StochasticSystem& sys, const Gain& gain);

bool certify_admissible(const StochasticSystem& sys, const Gain& gain);

/// Outcome of one data-driven estimate against the Riccati oracle.
struct ScalingRecord {
  int N = 0, K = 0, rep = 0;
  bool solved = false;  // false: the run failed and the fields below are unset
  double err_L = 0.0;
  double err_P = 0.0;
  double err_F = 0.0;
  double residual = 0.0;  // ‖e(P̂)‖_F
  double margin = 0.0;
  bool admissible = false;
  double gamma = 0.0;  // min_i σ_min(Z⁽ⁱ⁾)
  Gain L;
};

/// Collects N rollouts of length K, solves the data-driven SDP and compares
/// the estimate with `oracle`. Never throws for per-run numerical failures;
/// those come back with solved == false.
ScalingRecord model_free_run(const StochasticSystem& sys, const RiccatiResult& oracle, int N, int K,
                             const ExplorationConfig& cfg, const SdpOptions& sdp = {});

struct ScalingResult {
  std::vector<ScalingRecord> records;
  /// Least-squares slope of log(median err_L) against log(NK).
  double slope = 0.0;
};

/// Stream seed of repetition `rep` at grid point `g`.
std::uint64_t run_seed(std::uint64_t master, int grid_index, int rep);

/// Runs every (N, K) grid point `reps` times. Throws ExperimentFailed when
/// more than half the runs of a grid point fail.
ScalingResult scaling_experiment(const StochasticSystem& sys, const std::vector<std::pair<int, int>>& grid,
                                 int reps, std::uint64_t seed, const ExplorationConfig& base_cfg,
                                 const SdpOptions& sdp = {});

double median(std::vector<double> v);

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Writes `N,K,rep,err_L,err_P,residual,margin,admissible`; failed runs are skipped.
std::string scaling_csv(const std::vector<ScalingRecord>& records);

}  // namespace stolqr
