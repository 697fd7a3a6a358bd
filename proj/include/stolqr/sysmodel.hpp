#pragma once

#include <vector>

#include "stolqr/matcore.hpp"

namespace stolqr {

/// One multiplicative-noise channel (A_l x + B_l u) v^l.
struct NoiseChannel {
  Matrix A;
  Matrix B;
};

/// x_{k+1} = A x + B u + Σ_l (A_l x + B_l u) v^l_k + w_k with
/// E[v^l v^l] = sigma, Cov(w) = Sigma, discounted quadratic cost with
/// weights Q ⊕ R and discount alpha. x0 ~ (x0_mean, x0_cov).
struct StochasticSystem {
  Matrix A;
  Matrix B;
  std::vector<NoiseChannel> channels;
  double sigma = 1.0;
  Matrix Sigma;
  Matrix Q;
  Matrix R;
  double alpha = 0.5;
  Vector x0_mean;
  Matrix x0_cov;

  int n() const { return static_cast<int>(A.rows()); }
  int m() const { return static_cast<int>(B.cols()); }

  /// Throws DimensionMismatch / InvalidConfig when an invariant fails:
  /// Σ ≻ 0, Σ₀ ≻ 0, Q ⪰ 0, R ≻ 0, 0 < α < 1, σ > 0.
  void validate() const;

  /// X₀ = Σ₀ + μ₀μ₀ᵀ.
  SymMatrix X0() const;
  /// W = Q ⊕ R.
  SymMatrix W() const;
};

/// State-feedback gain u = L x, L is m×n.
class Gain {
 public:
  Gain() = default;
  explicit Gain(Matrix l);
  const Matrix& matrix() const { return l_; }
  int rows() const { return static_cast<int>(l_.rows()); }
  int cols() const { return static_cast<int>(l_.cols()); }
  /// L̄ = [I; L].
  Matrix lifted() const;

 private:
  Matrix l_;
};

struct AugmentedOps {
  Matrix base;                   // [[A, B], [LA, LB]]
  std::vector<Matrix> channels;  // [[A_l, B_l], [LA_l, LB_l]]
};

AugmentedOps augmented_ops(const StochasticSystem& sys, const Gain& gain);

/// C_L = (A+BL)⊗(A+BL) + σ Σ_l (A_l+B_lL)⊗(A_l+B_lL), n²×n².
Matrix closed_loop_generator(const StochasticSystem& sys, const Gain& gain);
/// C̄_L built from the augmented operators, (n+m)²×(n+m)².
Matrix augmented_generator(const StochasticSystem& sys, const Gain& gain);

inline constexpr double kTolStab = 1e-9;

/// ρ(C_L) < 1 − tol_stab (mean-square stability of the closed loop).
bool is_admissible(const StochasticSystem& sys, const Gain& gain, double tol_stab = kTolStab);

/// Solves (A+BL)ᵀG(A+BL) + σΣ_l(A_l+B_lL)ᵀG(A_l+B_lL) + Y = G, with α
/// multiplying the quadratic terms when `discounted`. Throws NotStable when
/// ρ(C_L) (or ρ(αC_L)) is not < 1, NumericalError on an ill-conditioned
/// solve or a solution that is not positive definite.
SymMatrix lyapunov_solve(const StochasticSystem& sys, const Gain& gain, const SymMatrix& y,
                         bool discounted);

namespace detail {
/// The vectorized solve behind lyapunov_solve without the stability
/// precondition or the definiteness check.
SymMatrix lyapunov_solve_unchecked(const StochasticSystem& sys, const Gain& gain,
                                   const SymMatrix& y, bool discounted);
}  // namespace detail

/// Unique S with α(Ā S Āᵀ + σΣ_l Ā_l S Ā_lᵀ) + L̄X₀L̄ᵀ + α/(1−α) L̄ΣL̄ᵀ = S.
/// S is the discounted second moment of z_k = (x_k, L x_k).
SymMatrix primal_S(const StochasticSystem& sys, const Gain& gain);

/// J(L) = Tr(W S).
double cost_of_gain(const StochasticSystem& sys, const Gain& gain);

/// J* = Tr(P X₀) + α/(1−α) Tr(P Σ).
double optimal_cost(const StochasticSystem& sys, const SymMatrix& p);

}  // namespace stolqr
