#include "stolqr/robustness.hpp"

#include <algorithm>
#include <cmath>

#include "stolqr/csv.hpp"
#include "stolqr/errors.hpp"
#include "stolqr/lqrsdp.hpp"
#include "stolqr/parallel.hpp"

namespace stolqr {

double stability_margin(const StochasticSystem& sys, const Gain& gain) {
  const Matrix c = closed_loop_generator(sys, gain);
  return min_singular_value(Matrix::Identity(c.rows(), c.cols()) - sys.alpha * c);
}

bool certify_admissible(const StochasticSystem& sys, const Gain& gain) { return is_admissible(sys, gain); }

ScalingRecord model_free_run(const StochasticSystem& sys, const RiccatiResult& oracle, int N, int K,
                             const ExplorationConfig& cfg, const SdpOptions& sdp) {
  ScalingRecord rec;
  rec.N = N;
  rec.K = K;
  try {
    const Dataset ds = collect_dataset(sys, N, K, cfg);
    rec.gamma = INFINITY;
    for (const auto& s : ds.samples) rec.gamma = std::min(rec.gamma, check_rank(s.Z).sigma_min);
    const SdpProblem prob = build_model_free({&ds, sys.W(), sys.alpha, false});
    const SdpSolution sol = solve_sdp(prob, sdp);
    const PolicyEstimate est = extract_policy(sol, prob.layout, sys.n(), sys.m());
    rec.L = est.L;
    rec.err_L = (est.L.matrix() - oracle.L.matrix()).norm();
    rec.err_P = (est.P.mat() - oracle.P.mat()).norm();
    rec.err_F = (est.F.mat() - oracle.H.mat()).norm();
    rec.residual = riccati_residual(sys, est.P);
    rec.margin = stability_margin(sys, est.L);
    rec.admissible = certify_admissible(sys, est.L);
    rec.solved = std::isfinite(rec.err_L) && std::isfinite(rec.residual);
  } catch (const NumericalError&) {
    rec.solved = false;
  }
  return rec;
}

std::uint64_t run_seed(std::uint64_t master, int grid_index, int rep) {
  return splitmix64(master ^ splitmix64((static_cast<std::uint64_t>(grid_index) << 32) |
                                        static_cast<std::uint32_t>(rep)));
}

double median(std::vector<double> v) {
  if (v.empty()) return NAN;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  if (x.size() != y.size() || x.size() < 2) return NAN;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

ScalingResult scaling_experiment(const StochasticSystem& sys, const std::vector<std::pair<int, int>>& grid,
                                 int reps, std::uint64_t seed, const ExplorationConfig& base_cfg,
                                 const SdpOptions& sdp) {
  const RiccatiResult oracle = solve_dgare(sys);
  const int total = static_cast<int>(grid.size()) * reps;
  ScalingResult out;
  out.records.resize(total);
  parallel_for(total, [&](int idx) {
    const int g = idx / reps, r = idx % reps;
    ExplorationConfig cfg = base_cfg;
    cfg.seed = run_seed(seed, g, r);
    ScalingRecord rec = model_free_run(sys, oracle, grid[g].first, grid[g].second, cfg, sdp);
    rec.rep = r;
    out.records[idx] = std::move(rec);
  });

  std::vector<double> lx, ly;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    std::vector<double> errs;
    for (int r = 0; r < reps; ++r) {
      const auto& rec = out.records[g * reps + r];
      if (rec.solved) errs.push_back(rec.err_L);
    }
    if (reps > 0 && 2 * static_cast<int>(errs.size()) < reps) {
      throw ExperimentFailed("scaling_experiment: more than half the runs failed at N=" +
                             std::to_string(grid[g].first) + ", K=" + std::to_string(grid[g].second));
    }
    if (errs.empty()) continue;
    lx.push_back(std::log(static_cast<double>(grid[g].first) * grid[g].second));
    ly.push_back(std::log(median(errs)));
  }
  out.slope = fit_slope(lx, ly);
  return out;
}

std::string scaling_csv(const std::vector<ScalingRecord>& records) {
  CsvWriter w({"N", "K", "rep", "err_L", "err_P", "residual", "margin", "admissible"});
  for (const auto& r : records) {
    if (!r.solved) continue;
    w.row({std::to_string(r.N), std::to_string(r.K), std::to_string(r.rep), format_double(r.err_L),
           format_double(r.err_P), format_double(r.residual), format_double(r.margin),
           r.admissible ? "1" : "0"});
  }
  return w.str();
}

}  // namespace stolqr
