#include "stolqr/riccati.hpp"

#include <cmath>

#include "stolqr/errors.hpp"

namespace stolqr {

SymMatrix h_from_p(const StochasticSystem& sys, const SymMatrix& p) {
  const int n = sys.n(), m = sys.m();
  if (p.dim() != n) throw DimensionMismatch("h_from_p: P must be n x n");
  const Matrix& pm = p.mat();
  const double a = sys.alpha;
  Matrix h11 = sys.Q + a * sys.A.transpose() * pm * sys.A;
  Matrix h12 = a * sys.A.transpose() * pm * sys.B;
  Matrix h22 = sys.R + a * sys.B.transpose() * pm * sys.B;
  for (const auto& ch : sys.channels) {
    h11 += a * sys.sigma * ch.A.transpose() * pm * ch.A;
    h12 += a * sys.sigma * ch.A.transpose() * pm * ch.B;
    h22 += a * sys.sigma * ch.B.transpose() * pm * ch.B;
  }
  Matrix h(n + m, n + m);
  h << h11, h12, h12.transpose(), h22;
  return SymMatrix(h);
}

Gain gain_from_h(const SymMatrix& h, int n, int m, std::optional<double> tol_pd) {
  if (h.dim() != n + m) throw DimensionMismatch("gain_from_h: H must be (n+m) x (n+m)");
  const Matrix h22 = h.mat().bottomRightCorner(m, m);
  const double lam = min_eig(SymMatrix(h22));
  if (lam <= tol_pd.value_or(default_tol_pd(h22))) {
    throw SingularBlock("gain_from_h: H22 is not positive definite", lam);
  }
  Eigen::LLT<Matrix> llt(h22);
  return Gain(-llt.solve(h.mat().topRightCorner(n, m).transpose()));
}

SymMatrix riccati_operator(const StochasticSystem& sys, const SymMatrix& p) {
  const int n = sys.n(), m = sys.m();
  const SymMatrix h = h_from_p(sys, p);
  // 𝓡(P) is the Schur complement of H; α² in the cross term is absorbed by
  // the α factor carried in H₁₂.
  try {
    return schur_p(h, n, m);
  } catch (const SingularBlock& e) {
    throw SingularBlock("riccati_operator: R + aB'PB + ... is not positive definite",
                        e.eigenvalue());
  }
}

double riccati_residual(const StochasticSystem& sys, const SymMatrix& p) {
  return (p.mat() - riccati_operator(sys, p).mat()).norm();
}

RiccatiResult solve_dgare(const StochasticSystem& sys, const RiccatiOptions& opts) {
  SymMatrix p(sys.Q);
  double step = INFINITY;
  for (int it = 1; it <= opts.max_iter; ++it) {
    SymMatrix next = riccati_operator(sys, p);
    step = (next.mat() - p.mat()).norm();
    const double scale = 1.0 + p.mat().norm();
    p = std::move(next);
    if (!std::isfinite(step)) break;
    // Without a mean-square stabilizing gain the iterates grow without bound;
    // far enough out they lose every digit and can look stationary.
    if (p.mat().norm() > 1e15 * (1.0 + sys.Q.norm())) {
      throw NoConvergence("solve_dgare: iterates diverge (no stabilizing gain for the discounted problem)", step);
    }
    if (step <= opts.tol * scale) {
      RiccatiResult out;
      out.residual = riccati_residual(sys, p);
      if (out.residual > 1e3 * opts.tol * (1.0 + p.mat().norm())) {
        throw NoConvergence("solve_dgare: iteration stalled away from a fixed point", out.residual);
      }
      out.H = h_from_p(sys, p);
      out.L = gain_from_h(out.H, sys.n(), sys.m());
      out.P = p;
      out.iterations = it;
      return out;
    }
  }
  throw NoConvergence("solve_dgare: fixed-point iteration did not converge", step);
}

}  // namespace stolqr
