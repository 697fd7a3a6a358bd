// Acceptance checks for the stochastic LQR toolkit. One PASS/FAIL line per
// criterion; the exit status is nonzero if any selected criterion fails.
//
//   acceptance [--criterion 1..5]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "common.hpp"
#include "stolqr/config.hpp"
#include "stolqr/errors.hpp"
#include "stolqr/experiments.hpp"
#include "stolqr/lqrsdp.hpp"
#include "stolqr/riccati.hpp"
#include "stolqr/robustness.hpp"

using namespace stolqr;
using testing::from_rows;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Collects sub-checks of one criterion and renders the verdict line.
struct Verdict {
  bool ok = true;
  std::ostringstream detail;

  void check(bool cond, const std::string& what) {
    if (!detail.str().empty()) detail << "; ";
    detail << what << (cond ? "" : " [FAILED]");
    ok = ok && cond;
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

RunConfig inverter_config() { return load_config(std::string(STOLQR_CONFIG_DIR) + "/pwm_inverter.json"); }

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

const Matrix kRefL = from_rows({{-4.8599, -64.0491}});
const Matrix kRefP = from_rows({{1.0215, 0.1206}, {0.1206, 1.6917}});

void criterion1(Verdict& v) {
  const StochasticSystem sys = inverter_config().system;
  const auto t0 = Clock::now();
  const RiccatiResult r = solve_dgare(sys);
  const double t = seconds_since(t0);
  const double dl = max_abs(r.L.matrix() - kRefL), dp = max_abs(r.P.mat() - kRefP);
  v.check(dl <= 1e-3, "max|L-L_ref| = " + fmt(dl) + " (L = [" + fmt(r.L.matrix()(0, 0)) + ", " +
                          fmt(r.L.matrix()(0, 1)) + "])");
  v.check(dp <= 1e-3, "max|P-P_ref| = " + fmt(dp));
  v.check(r.residual <= 1e-8, "residual " + fmt(r.residual));
  v.check(t < 1.0, "runtime " + fmt(t) + " s");
}

void criterion2(Verdict& v) {
  const StochasticSystem sys = inverter_config().system;
  const auto t0 = Clock::now();
  const SdpProblem p = build_model_based(sys);
  const SdpSolution sol = solve_sdp(p);
  const PolicyEstimate e = extract_policy(sol, p.layout, sys.n(), sys.m());
  const double t = seconds_since(t0);
  const RiccatiResult r = solve_dgare(sys);
  const double dm = (e.P.mat() - r.P.mat()).norm();
  const double dl = max_abs(e.L.matrix() - r.L.matrix());
  const double res = riccati_residual(sys, e.P);
  const double lmi = min_eig(evaluate_lmi(p.lmis.back(), sol.x));
  const double schur = (e.P.mat() - schur_p(e.F, sys.n(), sys.m()).mat()).norm();
  v.check(dm <= 1e-3, "|M-P*|_F = " + fmt(dm) + " (status " + std::string(to_string(sol.status)) + ")");
  v.check(dl <= 1e-3, "max|L-L*| = " + fmt(dl));
  v.check(res <= 1e-3, "residual " + fmt(res));
  v.check(lmi <= 1e-6, "LMI min_eig " + fmt(lmi));
  v.check(schur <= 1e-6, "|M-Schur(F)|_F = " + fmt(schur));
  v.check(t < 10.0, "runtime " + fmt(t) + " s");
}

void criterion3(Verdict& v) {
  RunConfig cfg = inverter_config();
  cfg.data.K = 9;
  cfg.experiment.N_values = {10, 20, 30, 40, 80};
  cfg.experiment.reps = 10;
  const auto t0 = Clock::now();
  const CommandOutput out = cmd_experiment_residuals(cfg);
  const double t = seconds_since(t0);
  const auto rep = nlohmann::json::parse(out.report);
  auto at = [&](int N) {
    for (const auto& s : rep["summary"]) {
      if (s["N"] == N) return s;
    }
    throw std::runtime_error("no summary for N=" + std::to_string(N));
  };
  auto number = [](const nlohmann::json& x) { return x.is_number() ? x.get<double>() : NAN; };
  const double r10 = number(at(10)["mean_residual"]), r20 = number(at(20)["mean_residual"]);
  const double r80 = number(at(80)["mean_residual"]);
  const double adm = number(at(80)["admissible_fraction"]);
  std::string solved;
  for (const auto& s : rep["summary"]) solved += (solved.empty() ? "" : "/") + s["solved"].dump();
  v.check(r80 < r10, "(a) mean residual N=80 " + fmt(r80) + " vs N=10 " + fmt(r10));
  v.check(adm >= 0.9, "(b) admissible at N=80: " + fmt(adm * 10) + "/10");
  v.check(r20 <= 1e-2, "(c) mean residual N=20 " + fmt(r20));
  v.check(t < 300.0, "runtime " + fmt(t) + " s (solved per N " + solved + ")");
}

void criterion4(Verdict& v) {
  const RunConfig cfg = inverter_config();
  // NK from 90 to 1440.
  const std::vector<std::pair<int, int>> grid{{10, 9}, {20, 9}, {40, 9}, {80, 9}, {160, 9}};
  const auto t0 = Clock::now();
  ScalingResult res;
  try {
    res = scaling_experiment(cfg.system, grid, 10, cfg.data.seed, cfg.exploration(), cfg.solver);
  } catch (const ExperimentFailed& e) {
    v.check(false, std::string("scaling experiment failed: ") + e.what());
    return;
  }
  const double t = seconds_since(t0);
  v.check(res.slope >= -0.8 && res.slope <= -0.2, "slope " + fmt(res.slope));
  v.check(t < 600.0, "runtime " + fmt(t) + " s");
}

bool lyapunov_solvable(const StochasticSystem& s, const Gain& l) {
  try {
    const SymMatrix g = detail::lyapunov_solve_unchecked(s, l, SymMatrix::identity(s.n()), false);
    return g.mat().allFinite() && min_eig(g) > 0.0;
  } catch (const NumericalError&) {
    return false;
  }
}

void criterion5(Verdict& v) {
  // (a) mean-square stability iff the Lyapunov equation has a positive definite solution.
  {
    std::mt19937_64 rng(2718);
    std::uniform_real_distribution<double> radius(0.3, 1.4);
    int agree = 0, stable = 0;
    for (int t = 0; t < 200; ++t) {
      const int n = 2 + t % 3, m = 1 + t % 2;
      const StochasticSystem s = testing::random_system(rng, n, m, 1 + t % 2, radius(rng), 0.3);
      const Gain l(testing::random_matrix(rng, m, n, 0.3));
      const bool mss = spectral_radius(closed_loop_generator(s, l)) < 1.0;
      stable += mss;
      agree += mss == lyapunov_solvable(s, l);
    }
    v.check(agree == 200 && stable > 0 && stable < 200,
            "(a) " + std::to_string(agree) + "/200 agree (" + std::to_string(stable) + " stable)");
  }
  // (b) primal cost of L* equals the dual value.
  const StochasticSystem sys = inverter_config().system;
  {
    const RiccatiResult r = solve_dgare(sys);
    const double jp = cost_of_gain(sys, r.L), jd = optimal_cost(sys, r.P);
    v.check(std::abs(jp - jd) <= 1e-6 * (1.0 + jd), "(b) |J(L*)-J*| = " + fmt(std::abs(jp - jd)));
  }
  // (c) noise-free data recovers the model-based gain (single rollout, no channel).
  {
    StochasticSystem s = sys;
    s.channels.clear();
    const SdpProblem mb = build_model_based(s);
    const Gain want = extract_policy(solve_sdp(mb), mb.layout, s.n(), s.m()).L;
    ExplorationConfig cfg;
    cfg.Sigma_d = Matrix::Identity(1, 1);
    cfg.noise = NoiseKind::None;
    cfg.seed = 3;
    const Dataset ds = collect_dataset(s, 1, 9, cfg);
    const SdpProblem p = build_model_free({&ds, s.W(), s.alpha, false});
    SdpOptions tight;
    tight.tol_feas = tight.tol_gap = 1e-10;
    const Gain got = extract_policy(solve_sdp(p, tight), p.layout, s.n(), s.m()).L;
    const double d = max_abs(got.matrix() - want.matrix());
    v.check(d <= 1e-4, "(c) max|L_data-L_model| = " + fmt(d));
  }
  // (d) structural identities.
  {
    std::mt19937_64 rng(99);
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
      const int n = 1 + t % 5;
      const SymMatrix a(testing::random_matrix(rng, n, n)), b(testing::random_matrix(rng, n, n));
      worst = std::max(worst, std::abs(svec(a).dot(svec(b)) - (a.mat() * b.mat()).trace()));
      worst = std::max(worst, max_abs(smat(svec(a)).mat() - a.mat()));
      const Matrix x = testing::random_matrix(rng, n, n + 1), l = testing::random_matrix(rng, n + 2, n);
      const Matrix r = testing::random_matrix(rng, n + 1, 2);
      worst = std::max(worst, max_abs(kron(r.transpose(), l) * vec(x) - vec(l * x * r)));
      const Matrix blocks[] = {a.mat(), b.mat()};
      const Matrix ds = direct_sum(blocks);
      worst = std::max(worst, std::abs(min_eig(SymMatrix(ds)) - std::min(min_eig(a), min_eig(b))));
      worst = std::max(worst, std::abs(ds.trace() - a.mat().trace() - b.mat().trace()));
      worst = std::max(worst, max_abs(ds.topRightCorner(n, n)));
    }
    v.check(worst <= 1e-12, "(d) worst identity error " + fmt(worst));
  }
  // (e) reruns under a fixed seed are byte-identical, whatever the thread count.
  {
    RunConfig cfg = inverter_config();
    cfg.data.N = 20;
    cfg.experiment.N_values = {10, 20};
    cfg.experiment.reps = 3;
    auto both = [&] {
      std::string files;
      for (const auto& [name, text] : dataset_files(collect_dataset(cfg.system, 20, 9, cfg.exploration()))) {
        files += name + text;
      }
      const CommandOutput a = cmd_model_based(cfg), b = cmd_experiment_residuals(cfg);
      return std::make_pair(a.report + b.report, files + b.files.front().second);
    };
    setenv("STOLQR_THREADS", "1", 1);
    const auto first = both();
    setenv("STOLQR_THREADS", "4", 1);
    const auto second = both();
    unsetenv("STOLQR_THREADS");
    v.check(first == second, "(e) reruns byte-identical");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::vector<int> selected;
  app.add_option("--criterion", selected, "criterion number(s), default all")->check(CLI::Range(1, 5));
  CLI11_PARSE(app, argc, argv);
  if (selected.empty()) selected = {1, 2, 3, 4, 5};

  const std::function<void(Verdict&)> table[] = {criterion1, criterion2, criterion3, criterion4, criterion5};
  bool all = true;
  for (int c : selected) {
    Verdict v;
    try {
      table[c - 1](v);
    } catch (const std::exception& e) {
      v.check(false, std::string("exception: ") + e.what());
    }
    std::printf("criterion %d: %s  %s\n", c, v.ok ? "PASS" : "FAIL", v.detail.str().c_str());
    std::fflush(stdout);
    all = all && v.ok;
  }
  return all ? 0 : 1;
}
