#include "stolqr/experiments.hpp"

#include <cmath>
#include <map>

#include <json.hpp>

#include "stolqr/csv.hpp"
#include "stolqr/errors.hpp"
#include "stolqr/lqrsdp.hpp"
#include "stolqr/parallel.hpp"
#include "stolqr/riccati.hpp"
#include "stolqr/robustness.hpp"

namespace stolqr {

namespace {

using ojson = nlohmann::ordered_json;

ojson to_json(const Matrix& m) {
  ojson rows = ojson::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    ojson row = ojson::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

// nlohmann refuses to serialize non-finite doubles as numbers.
ojson num(double v) { return std::isfinite(v) ? ojson(v) : ojson(format_double(v)); }

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

std::string fmt_or_nan(bool ok, double v) { return ok ? format_double(v) : "nan"; }

}  // namespace

CommandOutput cmd_riccati(const RunConfig& cfg) {
  const StochasticSystem& sys = cfg.system;
  const RiccatiResult r = solve_dgare(sys);
  ojson j;
  j["command"] = "riccati";
  j["P"] = to_json(r.P.mat());
  j["H"] = to_json(r.H.mat());
  j["L"] = to_json(r.L.matrix());
  j["iterations"] = r.iterations;
  j["residual"] = num(r.residual);
  j["J_star"] = num(optimal_cost(sys, r.P));
  j["admissible"] = is_admissible(sys, r.L);
  return {dump(j), {{"riccati.json", dump(j)}}};
}

CommandOutput cmd_model_based(const RunConfig& cfg) {
  const StochasticSystem& sys = cfg.system;
  const int n = sys.n(), m = sys.m();
  const SdpProblem prob = build_model_based(sys);
  const SdpSolution sol = solve_sdp(prob, cfg.solver);
  const PolicyEstimate est = extract_policy(sol, prob.layout, n, m);
  const RiccatiResult oracle = solve_dgare(sys);

  ojson j;
  j["command"] = "model-based";
  j["status"] = to_string(sol.status);
  j["iterations"] = sol.iterations;
  j["objective"] = num(sol.objective);
  j["gap"] = num(sol.gap);
  j["F"] = to_json(est.F.mat());
  j["M"] = to_json(est.P.mat());
  j["L"] = to_json(est.L.matrix());
  j["residual"] = num(riccati_residual(sys, est.P));
  j["lmi_min_eig"] = num(min_eig(evaluate_lmi(prob.lmis.back(), sol.x)));
  j["schur_gap"] = num((est.P.mat() - schur_p(est.F, n, m).mat()).norm());
  ojson x;
  x["M_minus_P"] = num((est.P.mat() - oracle.P.mat()).norm());
  x["L_minus_L"] = num((est.L.matrix() - oracle.L.matrix()).norm());
  j["oracle"] = x;
  return {dump(j), {{"model_based.json", dump(j)}}};
}

CommandOutput cmd_model_free(const RunConfig& cfg) {
  const StochasticSystem& sys = cfg.system;
  const int n = sys.n(), m = sys.m();
  const Dataset ds = collect_dataset(sys, cfg.data.N, cfg.data.K, cfg.exploration());
  const SdpProblem prob = build_model_free({&ds, sys.W(), sys.alpha, false});
  const SdpSolution sol = solve_sdp(prob, cfg.solver);
  const PolicyEstimate est = extract_policy(sol, prob.layout, n, m);
  const RiccatiResult oracle = solve_dgare(sys);

  double gamma = INFINITY;
  for (const auto& s : ds.samples) gamma = std::min(gamma, check_rank(s.Z).sigma_min);
  ojson j;
  j["command"] = "model-free";
  j["N"] = cfg.data.N;
  j["K"] = cfg.data.K;
  j["seed"] = cfg.data.seed;
  j["status"] = to_string(sol.status);
  j["iterations"] = sol.iterations;
  j["gap"] = num(sol.gap);
  j["L"] = to_json(est.L.matrix());
  j["P"] = to_json(est.P.mat());
  j["residual"] = num(riccati_residual(sys, est.P));
  j["admissible"] = certify_admissible(sys, est.L);
  j["margin"] = num(stability_margin(sys, est.L));
  j["gamma"] = num(gamma);
  ojson x;
  x["err_L"] = num((est.L.matrix() - oracle.L.matrix()).norm());
  x["err_P"] = num((est.P.mat() - oracle.P.mat()).norm());
  j["oracle"] = x;
  CommandOutput out{dump(j), {{"model_free.json", dump(j)}}};
  for (auto& [name, text] : dataset_files(ds)) out.files.emplace_back("dataset/" + name, std::move(text));
  return out;
}

CommandOutput cmd_experiment_residuals(const RunConfig& cfg) {
  const StochasticSystem& sys = cfg.system;
  const RiccatiResult oracle = solve_dgare(sys);
  const auto& Ns = cfg.experiment.N_values;
  const int reps = cfg.experiment.reps;
  const int total = static_cast<int>(Ns.size()) * reps;
  const ExplorationConfig base = cfg.exploration();
  std::vector<ScalingRecord> recs(total);
  parallel_for(total, [&](int idx) {
    const int g = idx / reps, r = idx % reps;
    ExplorationConfig c = base;
    c.seed = run_seed(cfg.data.seed, g, r);
    recs[idx] = model_free_run(sys, oracle, Ns[g], cfg.data.K, c, cfg.solver);
    recs[idx].rep = r;
  });

  CsvWriter w({"N", "rep", "residual", "err_L", "admissible"});
  for (const auto& r : recs) {
    w.row({std::to_string(r.N), std::to_string(r.rep), fmt_or_nan(r.solved, r.residual),
           fmt_or_nan(r.solved, r.err_L), r.solved && r.admissible ? "1" : "0"});
  }
  ojson summary = ojson::array();
  for (std::size_t g = 0; g < Ns.size() && reps > 0; ++g) {
    double res = 0.0, err = 0.0, adm = 0.0;
    int solved = 0;
    for (int r = 0; r < reps; ++r) {
      const auto& rec = recs[g * reps + r];
      if (!rec.solved) continue;
      ++solved;
      res += rec.residual;
      err += rec.err_L;
      adm += rec.admissible ? 1.0 : 0.0;
    }
    const double k = solved > 0 ? solved : NAN;
    // Failed runs produced no gain, so they count as not admissible.
    w.row({std::to_string(Ns[g]), "mean", format_double(res / k), format_double(err / k), format_double(adm / reps)});
    ojson s;
    s["N"] = Ns[g];
    s["solved"] = solved;
    s["mean_residual"] = num(res / k);
    s["mean_err_L"] = num(err / k);
    s["admissible_fraction"] = num(adm / reps);
    summary.push_back(std::move(s));
  }
  ojson j;
  j["command"] = "exp-residuals";
  j["K"] = cfg.data.K;
  j["reps"] = reps;
  j["summary"] = summary;
  return {dump(j), {{"residuals.csv", w.str()}}};
}

CommandOutput cmd_experiment_trajectories(const RunConfig& cfg) {
  const StochasticSystem& sys = cfg.system;
  const int n = sys.n(), m = sys.m(), N = cfg.data.N, K = cfg.data.K;
  const int steps = cfg.experiment.closed_loop_steps;
  const Dataset ds = collect_dataset(sys, N, K, cfg.exploration());

  Gain gain;
  std::string source;
  if (cfg.experiment.force_gain) {
    gain = Gain(*cfg.experiment.force_gain);
    source = "forced";
  } else {
    const SdpProblem prob = build_model_free({&ds, sys.W(), sys.alpha, false});
    gain = extract_policy(solve_sdp(prob, cfg.solver), prob.layout, n, m).L;
    source = "estimated";
  }

  // Row k of the table: collection states x_0 … x_{K−1}, then x_K … x_{K+steps}.
  const int rows = K + steps + 1;
  std::vector<Matrix> states(N, Matrix::Constant(n, rows, NAN));
  const Matrix lg = gain.matrix();
  const Policy feedback = [lg](int, const Vector& x) -> Vector { return lg * x; };
  parallel_for(N, [&](int i) {
    const Sample& s = ds.samples[i];
    states[i].leftCols(K) = s.Z.topRows(n);
    // Stream ids 0…N−1 belong to the collection phase.
    RngStream rng(cfg.data.seed, static_cast<std::uint64_t>(N + i));
    Vector x = s.Y.col(K - 1);
    states[i].col(K) = x;
    for (int k = 1; k <= steps; ++k) {
      try {
        x = simulate_from(sys, x, feedback, 1, rng, cfg.data.noise).states.back();
      } catch (const NumericalError&) {
        break;  // remaining entries stay nan
      }
      states[i].col(K + k) = x;
    }
  });

  Matrix mean = Matrix::Zero(n, rows);
  for (const auto& s : states) mean += s;
  mean /= static_cast<double>(N);

  std::vector<std::string> header{"k"};
  for (int c = 0; c < n; ++c) header.push_back("x" + std::to_string(c + 1) + "_mean");
  header.push_back("phase");
  CsvWriter w(header);
  for (int k = 0; k < rows; ++k) {
    std::vector<std::string> cells{std::to_string(k)};
    for (int c = 0; c < n; ++c) cells.push_back(format_double(mean(c, k)));
    cells.push_back(k < K ? "collect" : "closed_loop");
    w.row(cells);
  }

  double collect_peak = 1.0;
  for (int k = 0; k < K; ++k) collect_peak = std::max(collect_peak, mean.col(k).norm());
  const double final_norm = mean.col(rows - 1).norm();
  const bool diverged = !std::isfinite(final_norm) || final_norm > 10.0 * collect_peak;

  ojson j;
  j["command"] = "exp-trajectories";
  j["N"] = N;
  j["K"] = K;
  j["closed_loop_steps"] = steps;
  j["gain_source"] = source;
  j["L"] = to_json(gain.matrix());
  j["admissible"] = is_admissible(sys, gain);
  j["final_mean_norm"] = num(final_norm);
  j["diverged"] = diverged;
  j["averaging"] = "raw states, componentwise; each rollout continues individually after step K";
  return {dump(j), {{"trajectories.csv", w.str()}}};
}

CommandOutput cmd_experiment_scaling(const RunConfig& cfg) {
  std::vector<std::pair<int, int>> grid = cfg.experiment.grid;
  if (grid.empty()) {
    for (int N : cfg.experiment.N_values) grid.emplace_back(N, cfg.data.K);
  }
  const ScalingResult res = scaling_experiment(cfg.system, grid, cfg.experiment.reps, cfg.data.seed,
                                               cfg.exploration(), cfg.solver);
  ojson j;
  j["command"] = "exp-scaling";
  j["reps"] = cfg.experiment.reps;
  j["slope"] = num(res.slope);
  ojson pts = ojson::array();
  for (std::size_t g = 0; g < grid.size(); ++g) {
    std::vector<double> errs;
    for (const auto& r : res.records) {
      if (r.solved && r.N == grid[g].first && r.K == grid[g].second) errs.push_back(r.err_L);
    }
    ojson p;
    p["N"] = grid[g].first;
    p["K"] = grid[g].second;
    p["solved"] = errs.size();
    p["median_err_L"] = num(median(errs));
    pts.push_back(std::move(p));
  }
  j["grid"] = pts;
  return {dump(j), {{"scaling.csv", scaling_csv(res.records)}}};
}

}  // namespace stolqr
