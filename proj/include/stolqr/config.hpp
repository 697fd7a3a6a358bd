#pragma once

// Run configuration: one JSON file drives every subcommand. Matrices are
// row-major nested arrays; unknown keys are rejected.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stolqr/datagen.hpp"
#include "stolqr/sdp.hpp"
#include "stolqr/sysmodel.hpp"

namespace stolqr {

struct DataConfig {
  int N = 80;
  int K = 9;
  Matrix Sigma_d;  // defaults to I_m
  std::uint64_t seed = 1;
  ExcitationKind exploration = ExcitationKind::Gaussian;
  std::vector<double> frequencies;
  NoiseKind noise = NoiseKind::Gaussian;
};

struct ExperimentConfig {
  std::vector<int> N_values{10, 20, 30, 40, 80};
  std::vector<std::pair<int, int>> grid;  // (N, K) for the scaling sweep
  int reps = 10;
  std::string output_dir = "out";
  int closed_loop_steps = 40;
  /// Test hook: replaces the estimated gain in exp-trajectories.
  std::optional<Matrix> force_gain;
};

struct RunConfig {
  StochasticSystem system;
  DataConfig data;
  SdpOptions solver;
  ExperimentConfig experiment;

  ExplorationConfig exploration() const;
};

/// Parses and validates a configuration. `origin` prefixes diagnostics.
/// Throws InvalidConfig with the offending line/column or field path.
RunConfig parse_config(const std::string& text, const std::string& origin = "config");

RunConfig load_config(const std::filesystem::path& path);

}  // namespace stolqr
