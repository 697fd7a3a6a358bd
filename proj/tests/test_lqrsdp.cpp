#include <doctest.h>

#include <cmath>

#include "common.hpp"
#include "oracle_values.hpp"
#include "stolqr/datagen.hpp"
#include "stolqr/errors.hpp"
#include "stolqr/lqrsdp.hpp"
#include "stolqr/riccati.hpp"

using namespace stolqr;
using testing::from_rows;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

bool usable(const SdpSolution& s) { return s.status == SdpStatus::Optimal || s.status == SdpStatus::Inaccurate; }

// x = (svec F, svec M) in the builders' layout.
Vector pack(const SymMatrix& f, const SymMatrix& m) {
  Vector x(svec_dim(f.dim()) + svec_dim(m.dim()));
  x << svec(f), svec(m);
  return x;
}

Dataset noise_free(const StochasticSystem& sys, int N, int K, std::uint64_t seed) {
  ExplorationConfig cfg;
  cfg.Sigma_d = Matrix::Identity(sys.m(), sys.m());
  cfg.noise = NoiseKind::None;
  cfg.seed = seed;
  return collect_dataset(sys, N, K, cfg);
}

}  // namespace

TEST_CASE("model-based SDP on the inverter recovers the Riccati solution") {
  const StochasticSystem s = testing::pwm_inverter();
  const SdpProblem p = build_model_based(s);
  const SdpSolution sol = solve_sdp(p);
  REQUIRE(usable(sol));
  CHECK(sol.objective == doctest::Approx(oracle::kPwmSdpObjective).epsilon(1e-7));
  const PolicyEstimate e = extract_policy(sol, p.layout, 2, 1);
  CHECK((e.P.mat() - from_rows(oracle::kPwmP)).norm() < 1e-6);
  CHECK(max_abs(e.L.matrix() - from_rows(oracle::kPwmL)) < 1e-4);
  CHECK(riccati_residual(s, e.P) < 1e-6);
  // The data LMI is active and M is the Schur complement of F.
  CHECK(min_eig(evaluate_lmi(p.lmis[1], sol.x)) <= 1e-6);
  CHECK((schur_p(e.F, 2, 1).mat() - e.P.mat()).norm() < 1e-6);
}

TEST_CASE("H* is feasible and every optimal F lies on the face H* - c ww^T") {
  const StochasticSystem s = testing::pwm_inverter();
  const RiccatiResult r = solve_dgare(s);
  const SdpProblem p = build_model_based(s);
  const Vector star = pack(r.H, r.P);
  for (const auto& c : p.lmis) CHECK(min_eig(evaluate_lmi(c, star)) > -1e-8);
  CHECK(p.objective.dot(star) == doctest::Approx(r.P.mat().trace()).epsilon(1e-12));

  const SdpSolution sol = solve_sdp(p);
  const PolicyEstimate e = extract_policy(sol, p.layout, 2, 1);
  const Matrix diff = r.H.mat() - e.F.mat();
  CHECK(min_eig(SymMatrix(diff)) > -1e-7);
  Matrix il(3, 2);
  il << Matrix::Identity(2, 2), r.L.matrix();
  CHECK(max_abs(diff * il) < 1e-5);
}

TEST_CASE("dropping the channel gives the deterministic gain") {
  StochasticSystem s = testing::pwm_inverter();
  s.channels.clear();
  const SdpProblem p = build_model_based(s);
  const SdpSolution sol = solve_sdp(p);
  REQUIRE(usable(sol));
  const PolicyEstimate e = extract_policy(sol, p.layout, 2, 1);
  CHECK(max_abs(e.L.matrix() - from_rows(oracle::kPwmDetL)) < 1e-4);
  CHECK(max_abs(e.P.mat() - from_rows(oracle::kPwmDetP)) < 1e-6);
}

TEST_CASE("model-based SDP matches the Riccati fixed point for several noise levels") {
  std::mt19937_64 rng(31);
  int unbounded = 0;
  for (double sigma : {0.3, 1.0, 2.0}) {
    for (int t = 0; t < 4; ++t) {
      StochasticSystem s = testing::random_system(rng, 2 + t % 2, 1 + t % 2, 1 + t % 2, 0.9, 0.3);
      s.sigma = sigma;
      const SdpProblem p = build_model_based(s);
      const SdpSolution sol = solve_sdp(p);
      INFO("sigma ", sigma, " t ", t, " status ", std::string(to_string(sol.status)));
      RiccatiResult r;
      try {
        r = solve_dgare(s);
      } catch (const NoConvergence&) {
        // No stabilizing gain: the value can be made arbitrarily large.
        CHECK(sol.status == SdpStatus::Unbounded);
        ++unbounded;
        continue;
      }
      REQUIRE(usable(sol));
      const PolicyEstimate e = extract_policy(sol, p.layout, s.n(), s.m());
      const double scale = 1.0 + r.P.mat().norm();
      CHECK((e.P.mat() - r.P.mat()).norm() < 1e-5 * scale);
      CHECK(max_abs(e.L.matrix() - r.L.matrix()) < 1e-3 * (1.0 + r.L.matrix().norm()));
    }
  }
  CHECK(unbounded >= 1);
}

TEST_CASE("data-driven objective on a frozen dataset matches the reference conic solver") {
  const Dataset ds = read_dataset(std::string(STOLQR_TEST_DATA) + "/pwm_small");
  const StochasticSystem s = testing::pwm_inverter();
  const SdpProblem p = build_model_free({&ds, s.W(), s.alpha, false});
  const SdpSolution sol = solve_sdp(p);
  REQUIRE(usable(sol));
  CHECK(sol.objective == doctest::Approx(oracle::kPwmSmallDataObjective).epsilon(1e-6));

  // Averaging rescales the data LMI only, so the optimum is unchanged.
  const SdpSolution avg = solve_sdp(build_model_free({&ds, s.W(), s.alpha, true}));
  CHECK(avg.objective == doctest::Approx(sol.objective).epsilon(1e-6));
}

TEST_CASE("noise-free single-rollout data recovers the deterministic gain") {
  StochasticSystem s = testing::pwm_inverter();
  const Dataset ds = noise_free(s, 1, 9, 3);
  const SdpProblem p = build_model_free({&ds, s.W(), s.alpha, false});
  // Y lies in the row space of Z, so the data block is compressed to n+m rows.
  CHECK(p.lmis[1].dim == 3 + 1);
  SdpOptions tight;
  tight.tol_feas = tight.tol_gap = 1e-10;
  const SdpSolution sol = solve_sdp(p, tight);
  REQUIRE(usable(sol));
  const PolicyEstimate e = extract_policy(sol, p.layout, 2, 1);
  CHECK(max_abs(e.L.matrix() - from_rows(oracle::kPwmDetL)) < 1e-4);
  CHECK(max_abs(e.P.mat() - from_rows(oracle::kPwmDetP)) < 1e-6);
}

TEST_CASE("the model-based optimizer is feasible for noise-free data constraints") {
  StochasticSystem s = testing::pwm_inverter();
  s.channels.clear();
  const RiccatiResult r = solve_dgare(s);
  for (int N : {1, 3, 8}) {
    const Dataset ds = noise_free(s, N, 9, 40 + N);
    const SdpProblem p = build_model_free({&ds, s.W(), s.alpha, true});
    const Vector star = pack(r.H, r.P);
    for (const auto& c : p.lmis) {
      const SymMatrix v = evaluate_lmi(c, star);
      CHECK(min_eig(v) > -1e-8 * (1.0 + v.mat().norm()));
    }
  }
}

TEST_CASE("facial reduction is skipped when the data spans every column") {
  const Dataset ds = read_dataset(std::string(STOLQR_TEST_DATA) + "/pwm_small");
  const StochasticSystem s = testing::pwm_inverter();
  const SdpProblem p = build_model_free({&ds, s.W(), s.alpha, false});
  CHECK(p.lmis[1].dim == ds.meta.K + ds.meta.N * ds.meta.m);
}

TEST_CASE("extraction errors") {
  SdpProblem p;
  p.layout = {{kBlockF, 0, 3}, {kBlockM, 6, 2}};
  SdpSolution sol;
  sol.x = pack(SymMatrix(from_rows({{2, 0, 1}, {0, 2, 0}, {1, 0, 0}})), SymMatrix::identity(2));
  sol.status = SdpStatus::Optimal;
  CHECK_THROWS_AS(extract_policy(sol, p.layout, 2, 1), SingularBlock);
  sol.status = SdpStatus::Infeasible;
  CHECK_THROWS_AS(extract_policy(sol, p.layout, 2, 1), NumericalError);
  sol.status = SdpStatus::Inaccurate;
  sol.x = pack(SymMatrix(from_rows({{2, 0, 1}, {0, 2, 0}, {1, 0, 4}})), SymMatrix::identity(2));
  const PolicyEstimate e = extract_policy(sol, p.layout, 2, 1);
  CHECK(e.L.matrix()(0, 0) == doctest::Approx(-0.25));
  CHECK(e.L.matrix()(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("data-driven builder validates its inputs") {
  const StochasticSystem s = testing::pwm_inverter();
  CHECK_THROWS_AS(build_model_free({nullptr, s.W(), 0.5, false}), InvalidConfig);
  Dataset empty;
  CHECK_THROWS_AS(build_model_free({&empty, s.W(), 0.5, false}), InvalidConfig);

  Dataset ds = noise_free(s, 2, 6, 1);
  CHECK_THROWS_AS(build_model_free({&ds, s.W(), 1.0, false}), InvalidConfig);
  CHECK_THROWS_AS(build_model_free({&ds, SymMatrix::identity(2), 0.5, false}), DimensionMismatch);

  Dataset shape = ds;
  shape.samples[1].Y = Matrix::Zero(2, 5);
  CHECK_THROWS_AS(build_model_free({&shape, s.W(), 0.5, false}), DimensionMismatch);

  Dataset rank = ds;
  rank.samples[0].Z.row(2) = rank.samples[0].Z.row(0);
  CHECK_THROWS_AS(build_model_free({&rank, s.W(), 0.5, false}), RankDeficientData);

  Dataset short_k = ds;
  for (auto& smp : short_k.samples) {
    smp.Z = smp.Z.leftCols(2).eval();
    smp.Y = smp.Y.leftCols(2).eval();
  }
  CHECK_THROWS_AS(build_model_free({&short_k, s.W(), 0.5, false}), InvalidConfig);
}
