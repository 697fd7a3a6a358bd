#include "stolqr/datagen.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "stolqr/csv.hpp"
#include "stolqr/errors.hpp"
#include "stolqr/parallel.hpp"

namespace stolqr {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t id)
    : engine_(splitmix64(seed ^ splitmix64(id + 1))) {}

double RngStream::normal() { return normal_(engine_); }

double RngStream::uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

Vector RngStream::gaussian(const Matrix& factor) {
  Vector z(factor.cols());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal();
  return factor * z;
}

namespace {

Matrix chol_factor(const Matrix& cov, const char* name) {
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success) throw InvalidConfig(std::string(name) + " is not positive definite");
  return llt.matrixL();
}

// Zero-mean draw with covariance LLᵀ.
Vector draw(RngStream& rng, const Matrix& factor, NoiseKind kind) {
  if (kind == NoiseKind::None) return Vector::Zero(factor.rows());
  if (kind == NoiseKind::Gaussian) return rng.gaussian(factor);
  const double h = std::sqrt(3.0);
  Vector z(factor.cols());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.uniform(-h, h);
  return factor * z;
}

double draw_scalar(RngStream& rng, double variance, NoiseKind kind) {
  if (kind == NoiseKind::None) return 0.0;
  if (kind == NoiseKind::Gaussian) return std::sqrt(variance) * rng.normal();
  const double h = std::sqrt(3.0 * variance);
  return rng.uniform(-h, h);
}

}  // namespace

Trajectory simulate_from(const StochasticSystem& sys, const Vector& x0, const Policy& policy, int K,
                         RngStream& rng, NoiseKind noise) {
  const Matrix sigma_factor = noise == NoiseKind::None ? Matrix() : chol_factor(sys.Sigma, "Sigma");
  Trajectory tr;
  tr.states.reserve(K + 1);
  tr.inputs.reserve(K);
  tr.states.push_back(x0);
  for (int k = 0; k < K; ++k) {
    const Vector& x = tr.states.back();
    Vector u = policy ? policy(k, x) : Vector::Zero(sys.m());
    if (u.size() != sys.m()) throw DimensionMismatch("policy returned an input of the wrong size");
    Vector next = sys.A * x + sys.B * u;
    for (const auto& ch : sys.channels) {
      const double v = draw_scalar(rng, sys.sigma, noise);
      next += (ch.A * x + ch.B * u) * v;
    }
    if (noise != NoiseKind::None) next += draw(rng, sigma_factor, noise);
    if (!next.allFinite()) throw NumericalError("simulate_rollout: state became non-finite at step " + std::to_string(k + 1));
    tr.inputs.push_back(std::move(u));
    tr.states.push_back(std::move(next));
  }
  return tr;
}

Trajectory simulate_rollout(const StochasticSystem& sys, const Policy& policy, int K, RngStream& rng,
                            NoiseKind noise) {
  Vector x0 = sys.x0_mean;
  if (noise != NoiseKind::None) x0 += draw(rng, chol_factor(sys.x0_cov, "x0_cov"), noise);
  return simulate_from(sys, x0, policy, K, rng, noise);
}

Policy exploration_policy(const ExplorationConfig& cfg, int m, RngStream& rng) {
  if (cfg.Sigma_d.rows() != m || cfg.Sigma_d.cols() != m) throw DimensionMismatch("Sigma_d must be m x m");
  Policy base = cfg.base_input;
  if (cfg.kind == ExcitationKind::Gaussian) {
    const Matrix factor = chol_factor(cfg.Sigma_d, "Sigma_d");
    return [base, factor, &rng](int k, const Vector& x) -> Vector {
      Vector d = rng.gaussian(factor);
      return base ? Vector(base(k, x) + d) : d;
    };
  }
  std::vector<double> freqs = cfg.frequencies;
  if (freqs.empty()) freqs = {0.5, 1.3, 2.1, 2.9};
  // Each component is a sum of sinusoids with random phases and total power Σ_d(c,c).
  Matrix phases(m, freqs.size());
  for (int c = 0; c < m; ++c) {
    for (std::size_t f = 0; f < freqs.size(); ++f) phases(c, f) = rng.uniform(0.0, 2.0 * std::numbers::pi);
  }
  Vector amp(m);
  for (int c = 0; c < m; ++c) amp(c) = std::sqrt(2.0 * cfg.Sigma_d(c, c) / freqs.size());
  return [base, freqs, phases, amp, m](int k, const Vector& x) -> Vector {
    Vector d = Vector::Zero(m);
    for (int c = 0; c < m; ++c) {
      for (std::size_t f = 0; f < freqs.size(); ++f) d(c) += amp(c) * std::sin(freqs[f] * k + phases(c, f));
    }
    return base ? Vector(base(k, x) + d) : d;
  };
}

RankCheck check_rank(const Matrix& z, double rel_tol) {
  RankCheck rc;
  if (z.rows() == 0 || z.cols() < z.rows()) return rc;
  Eigen::JacobiSVD<Matrix> svd(z);
  const auto& sv = svd.singularValues();
  rc.sigma_min = sv(z.rows() - 1);
  rc.ok = rc.sigma_min > rel_tol * sv(0);
  return rc;
}

Dataset collect_dataset(const StochasticSystem& sys, int N, int K, const ExplorationConfig& cfg) {
  sys.validate();
  const int n = sys.n(), m = sys.m();
  if (N < 1) throw InvalidConfig("N must be at least 1");
  if (K < n + m) {
    throw InvalidConfig("K = " + std::to_string(K) + " is below n+m = " + std::to_string(n + m));
  }
  if (cfg.Sigma_d.rows() != m || cfg.Sigma_d.cols() != m) throw DimensionMismatch("Sigma_d must be m x m");
  if (min_eig(SymMatrix(cfg.Sigma_d)) <= 0.0) throw InvalidConfig("Sigma_d must be positive definite");

  Dataset ds;
  ds.seed = cfg.seed;
  ds.meta = {n, m, K, N, cfg.Sigma_d};
  ds.samples.resize(N);
  parallel_for(N, [&](int i) {
    RngStream rng(cfg.seed, static_cast<std::uint64_t>(i));
    for (int attempt = 0; attempt <= kRankRetries; ++attempt) {
      const Policy explore = exploration_policy(cfg, m, rng);
      const Trajectory tr = simulate_rollout(sys, explore, K, rng, cfg.noise);
      Sample s{Matrix(n + m, K), Matrix(n, K)};
      for (int k = 0; k < K; ++k) {
        s.Z.col(k) << tr.states[k], tr.inputs[k];
        s.Y.col(k) = tr.states[k + 1];
      }
      if (check_rank(s.Z).ok) {
        ds.samples[i] = std::move(s);
        return;
      }
    }
    throw RankDeficientData("rollout " + std::to_string(i) + " failed the rank check after " +
                            std::to_string(kRankRetries) + " retries");
  });
  return ds;
}

std::vector<std::pair<std::string, std::string>> dataset_files(const Dataset& ds) {
  std::vector<std::pair<std::string, std::string>> files;
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    files.emplace_back("z_" + std::to_string(i) + ".csv", matrix_csv(ds.samples[i].Z));
    files.emplace_back("y_" + std::to_string(i) + ".csv", matrix_csv(ds.samples[i].Y));
  }
  nlohmann::ordered_json meta;
  meta["n"] = ds.meta.n;
  meta["m"] = ds.meta.m;
  meta["K"] = ds.meta.K;
  meta["N"] = ds.meta.N;
  meta["seed"] = ds.seed;
  nlohmann::ordered_json sd = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < ds.meta.Sigma_d.rows(); ++r) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (Eigen::Index c = 0; c < ds.meta.Sigma_d.cols(); ++c) row.push_back(ds.meta.Sigma_d(r, c));
    sd.push_back(row);
  }
  meta["Sigma_d"] = sd;
  files.emplace_back("meta.json", meta.dump(2) + "\n");
  return files;
}

void write_dataset(const std::filesystem::path& dir, const Dataset& ds) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, text] : dataset_files(ds)) write_text_file(dir / name, text);
}

Dataset read_dataset(const std::filesystem::path& dir) {
  std::ifstream is(dir / "meta.json");
  if (!is) throw InvalidConfig("missing " + (dir / "meta.json").string());
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig("meta.json: " + std::string(e.what()));
  }
  Dataset ds;
  try {
    ds.meta.n = meta.at("n").get<int>();
    ds.meta.m = meta.at("m").get<int>();
    ds.meta.K = meta.at("K").get<int>();
    ds.meta.N = meta.at("N").get<int>();
    ds.seed = meta.at("seed").get<std::uint64_t>();
    const auto& sd = meta.at("Sigma_d");
    ds.meta.Sigma_d.resize(sd.size(), sd.empty() ? 0 : sd[0].size());
    for (std::size_t r = 0; r < sd.size(); ++r) {
      for (std::size_t c = 0; c < sd[r].size(); ++c) ds.meta.Sigma_d(r, c) = sd[r][c].get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig("meta.json: " + std::string(e.what()));
  }
  const int n = ds.meta.n, m = ds.meta.m, K = ds.meta.K;
  for (int i = 0; i < ds.meta.N; ++i) {
    Sample s{read_matrix_csv(dir / ("z_" + std::to_string(i) + ".csv")),
             read_matrix_csv(dir / ("y_" + std::to_string(i) + ".csv"))};
    if (s.Z.rows() != n + m || s.Z.cols() != K || s.Y.rows() != n || s.Y.cols() != K) {
      throw DimensionMismatch("dataset sample " + std::to_string(i) + " has the wrong shape");
    }
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

}  // namespace stolqr
