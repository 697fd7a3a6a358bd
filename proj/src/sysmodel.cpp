#include "stolqr/sysmodel.hpp"

#include <cmath>
#include <string>

#include "stolqr/errors.hpp"

namespace stolqr {

namespace {

void require_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, const std::string& name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw DimensionMismatch(name + ": expected " + std::to_string(rows) + "x" +
                            std::to_string(cols) + ", got " + std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()));
  }
}

void require_symmetric(const Matrix& m, const std::string& name) {
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + m.cwiseAbs().maxCoeff())) {
    throw InvalidConfig(name + " must be symmetric");
  }
}

void require_finite(const Matrix& m, const std::string& name) {
  if (!m.allFinite()) throw InvalidConfig(name + " has non-finite entries");
}

void check_gain(const StochasticSystem& sys, const Gain& gain) {
  require_shape(gain.matrix(), sys.m(), sys.n(), "gain L");
}

// Closed-loop state matrices: weights[0] = 1 for A+BL, sigma for each channel.
struct ClosedLoop {
  std::vector<Matrix> mats;
  std::vector<double> weights;
};

ClosedLoop closed_loop(const StochasticSystem& sys, const Gain& gain) {
  check_gain(sys, gain);
  ClosedLoop cl;
  cl.mats.push_back(sys.A + sys.B * gain.matrix());
  cl.weights.push_back(1.0);
  for (const auto& ch : sys.channels) {
    cl.mats.push_back(ch.A + ch.B * gain.matrix());
    cl.weights.push_back(sys.sigma);
  }
  return cl;
}

}  // namespace

void StochasticSystem::validate() const {
  const Eigen::Index n = A.rows();
  if (n < 1) throw DimensionMismatch("A must be nonempty");
  require_shape(A, n, n, "A");
  if (B.rows() != n || B.cols() < 1) throw DimensionMismatch("B must be n x m with m >= 1");
  const Eigen::Index m = B.cols();
  for (std::size_t l = 0; l < channels.size(); ++l) {
    require_shape(channels[l].A, n, n, "channels[" + std::to_string(l) + "].A");
    require_shape(channels[l].B, n, m, "channels[" + std::to_string(l) + "].B");
    require_finite(channels[l].A, "channels.A");
    require_finite(channels[l].B, "channels.B");
  }
  require_shape(Sigma, n, n, "Sigma");
  require_shape(Q, n, n, "Q");
  require_shape(R, m, m, "R");
  require_shape(x0_cov, n, n, "x0_cov");
  if (x0_mean.size() != n) throw DimensionMismatch("x0_mean must have length n");
  for (const auto* mm : {&A, &B, &Sigma, &Q, &R, &x0_cov}) require_finite(*mm, "system matrix");
  require_symmetric(Sigma, "Sigma");
  require_symmetric(Q, "Q");
  require_symmetric(R, "R");
  require_symmetric(x0_cov, "x0_cov");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidConfig("sigma must be > 0");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidConfig("alpha must lie in (0, 1)");
  if (min_eig(SymMatrix(Sigma)) <= 0.0) throw InvalidConfig("Sigma must be positive definite");
  if (min_eig(SymMatrix(x0_cov)) <= 0.0) throw InvalidConfig("x0_cov must be positive definite");
  if (min_eig(SymMatrix(Q)) < -1e-12) throw InvalidConfig("Q must be positive semidefinite");
  if (min_eig(SymMatrix(R)) <= 0.0) throw InvalidConfig("R must be positive definite");
}

SymMatrix StochasticSystem::X0() const {
  return SymMatrix(x0_cov + x0_mean * x0_mean.transpose());
}

SymMatrix StochasticSystem::W() const {
  const Matrix blocks[] = {Q, R};
  return SymMatrix(direct_sum(blocks));
}

Gain::Gain(Matrix l) : l_(std::move(l)) {
  if (!l_.allFinite()) throw InvalidConfig("gain has non-finite entries");
}

Matrix Gain::lifted() const {
  const Eigen::Index n = l_.cols(), m = l_.rows();
  Matrix out(n + m, n);
  out.topRows(n).setIdentity();
  out.bottomRows(m) = l_;
  return out;
}

AugmentedOps augmented_ops(const StochasticSystem& sys, const Gain& gain) {
  check_gain(sys, gain);
  const Matrix& l = gain.matrix();
  auto lift = [&](const Matrix& a, const Matrix& b) {
    Matrix out(sys.n() + sys.m(), sys.n() + sys.m());
    out << a, b, l * a, l * b;
    return out;
  };
  AugmentedOps ops;
  ops.base = lift(sys.A, sys.B);
  for (const auto& ch : sys.channels) ops.channels.push_back(lift(ch.A, ch.B));
  return ops;
}

Matrix closed_loop_generator(const StochasticSystem& sys, const Gain& gain) {
  const ClosedLoop cl = closed_loop(sys, gain);
  Matrix c = Matrix::Zero(sys.n() * sys.n(), sys.n() * sys.n());
  for (std::size_t j = 0; j < cl.mats.size(); ++j) c += cl.weights[j] * kron(cl.mats[j], cl.mats[j]);
  return c;
}

Matrix augmented_generator(const StochasticSystem& sys, const Gain& gain) {
  const AugmentedOps ops = augmented_ops(sys, gain);
  Matrix c = kron(ops.base, ops.base);
  for (const auto& a : ops.channels) c += sys.sigma * kron(a, a);
  return c;
}

bool is_admissible(const StochasticSystem& sys, const Gain& gain, double tol_stab) {
  return spectral_radius(closed_loop_generator(sys, gain)) < 1.0 - tol_stab;
}

namespace detail {

SymMatrix lyapunov_solve_unchecked(const StochasticSystem& sys, const Gain& gain,
                                   const SymMatrix& y, bool discounted) {
  const int n = sys.n();
  if (y.dim() != n) throw DimensionMismatch("lyapunov_solve: Y must be n x n");
  const double scale = discounted ? sys.alpha : 1.0;
  // vec(MᵀGM) = (Mᵀ ⊗ Mᵀ) vec(G), so the system matrix is I − scale·C_Lᵀ.
  const Matrix lhs = Matrix::Identity(n * n, n * n) - scale * closed_loop_generator(sys, gain).transpose();
  Eigen::FullPivLU<Matrix> lu(lhs);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-12)) {
    throw NumericalError("lyapunov_solve: vectorized system is ill-conditioned (rcond " +
                         std::to_string(rcond) + ")");
  }
  return SymMatrix(unvec(lu.solve(vec(y.mat())), n, n));
}

}  // namespace detail

SymMatrix lyapunov_solve(const StochasticSystem& sys, const Gain& gain, const SymMatrix& y,
                         bool discounted) {
  const double scale = discounted ? sys.alpha : 1.0;
  const double rho = scale * spectral_radius(closed_loop_generator(sys, gain));
  if (!(rho < 1.0)) throw NotStable("lyapunov_solve: closed loop is not mean-square stable", rho);
  SymMatrix g = detail::lyapunov_solve_unchecked(sys, gain, y, discounted);
  const double lam = min_eig(g);
  if (!(lam > 0.0)) throw NumericalError("lyapunov_solve: solution is not positive definite");
  return g;
}

SymMatrix primal_S(const StochasticSystem& sys, const Gain& gain) {
  const int d = sys.n() + sys.m();
  const Matrix cbar = augmented_generator(sys, gain);
  const double rho = sys.alpha * spectral_radius(cbar);
  if (!(rho < 1.0)) throw NotStable("primal_S: discounted augmented loop is not stable", rho);

  const Matrix lbar = gain.lifted();
  const double w = sys.alpha / (1.0 - sys.alpha);
  const Matrix rhs = lbar * (sys.X0().mat() + w * sys.Sigma) * lbar.transpose();

  const Matrix lhs = Matrix::Identity(d * d, d * d) - sys.alpha * cbar;
  Eigen::FullPivLU<Matrix> lu(lhs);
  if (!(lu.rcond() > 1e-12)) {
    throw NotStable("primal_S: I - alpha*C_bar is numerically singular", rho);
  }
  SymMatrix s(unvec(lu.solve(vec(rhs)), d, d));
  const double lam = min_eig(s);
  if (lam <= -1e-9 * (1.0 + s.mat().norm())) {
    throw Infeasible("primal_S: computed S is not positive semidefinite");
  }
  return s;
}

double cost_of_gain(const StochasticSystem& sys, const Gain& gain) {
  return (sys.W().mat() * primal_S(sys, gain).mat()).trace();
}

double optimal_cost(const StochasticSystem& sys, const SymMatrix& p) {
  return (p.mat() * sys.X0().mat()).trace() +
         sys.alpha / (1.0 - sys.alpha) * (p.mat() * sys.Sigma).trace();
}

}  // namespace stolqr
