#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "stolqr/sysmodel.hpp"

namespace stolqr {

/// Independent random stream. Stream `id` of master seed `seed` is seeded
/// with splitmix64(seed ⊕ splitmix64(id + 1)), so rollout i always sees the
/// same draws no matter which thread or in which order it runs.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t id);
  double normal();
  double uniform(double lo, double hi);
  /// Zero-mean Gaussian vector with covariance LLᵀ for a given factor L.
  Vector gaussian(const Matrix& factor);

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x);

/// Distribution of x₀, v and w during simulation. `None` fixes x₀ = μ₀ and
/// switches both noises off (the deterministic limit).
enum class NoiseKind { Gaussian, Uniform, None };
enum class ExcitationKind { Gaussian, Sinusoid };

using Policy = std::function<Vector(int k, const Vector& x)>;

struct Trajectory {
  std::vector<Vector> states;  // x₀ … x_K
  std::vector<Vector> inputs;  // u₀ … u_{K−1}
};

/// Simulates K steps of x_{k+1} = Ax + Bu + Σ_l(A_l x + B_l u)v^l + w with
/// u_k = policy(k, x_k). Throws NumericalError if a state becomes non-finite.
Trajectory simulate_rollout(const StochasticSystem& sys, const Policy& policy, int K, RngStream& rng,
                            NoiseKind noise = NoiseKind::Gaussian);

/// Same dynamics from a given initial state.
Trajectory simulate_from(const StochasticSystem& sys, const Vector& x0, const Policy& policy, int K,
                         RngStream& rng, NoiseKind noise = NoiseKind::Gaussian);

struct ExplorationConfig {
  Matrix Sigma_d;          // m×m, positive definite
  Policy base_input;       // empty means u_k^(i) = 0
  ExcitationKind kind = ExcitationKind::Gaussian;
  std::vector<double> frequencies;  // rad/step, used by Sinusoid
  NoiseKind noise = NoiseKind::Gaussian;
  std::uint64_t seed = 0;
};

struct Sample {
  Matrix Z;  // (n+m)×K, columns z_k = (x_k, u_k)
  Matrix Y;  // n×K, columns x_{k+1}
};

struct DatasetMeta {
  int n = 0, m = 0, K = 0, N = 0;
  Matrix Sigma_d;
};

struct Dataset {
  std::vector<Sample> samples;
  std::uint64_t seed = 0;
  DatasetMeta meta;
};

struct RankCheck {
  bool ok = false;
  double sigma_min = 0.0;
};

inline constexpr double kRankRelTol = 1e-8;
inline constexpr int kRankRetries = 10;

/// ok ⇔ σ_min(Z) > rel_tol·σ_max(Z); σ_min is returned as the excitation level γ.
RankCheck check_rank(const Matrix& z, double rel_tol = kRankRelTol);

/// N rollouts of length K under u_k = base(k, x_k) + d_k. A rollout whose Z
/// fails the rank check is redrawn from the same stream up to 10 times.
/// Throws InvalidConfig for K < n+m, RankDeficientData after the retries.
Dataset collect_dataset(const StochasticSystem& sys, int N, int K, const ExplorationConfig& cfg);

/// Exploration-noise sequence d_k for rollout stream `rng`.
Policy exploration_policy(const ExplorationConfig& cfg, int m, RngStream& rng);

/// CSV bundle: z_{i}.csv, y_{i}.csv (i = 0…N−1) and meta.json.
std::vector<std::pair<std::string, std::string>> dataset_files(const Dataset& ds);
void write_dataset(const std::filesystem::path& dir, const Dataset& ds);
Dataset read_dataset(const std::filesystem::path& dir);

}  // namespace stolqr
