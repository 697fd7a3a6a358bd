#pragma once

#include "stolqr/sysmodel.hpp"

namespace stolqr {

struct RiccatiResult {
  SymMatrix P;
  SymMatrix H;
  Gain L;
  int iterations = 0;
  double residual = 0.0;  // ‖P − 𝓡(P)‖_F
};

/// Generalized discounted Riccati map
///   𝓡(P) = Q + αAᵀPA + ασΣAₗᵀPAₗ
///          − α²(AᵀPB + σΣAₗᵀPBₗ)(R + αBᵀPB + ασΣBₗᵀPBₗ)⁻¹(BᵀPA + σΣBₗᵀPAₗ).
/// Throws SingularBlock when the inner matrix is not positive definite.
SymMatrix riccati_operator(const StochasticSystem& sys, const SymMatrix& p);

/// ‖P − 𝓡(P)‖_F.
double riccati_residual(const StochasticSystem& sys, const SymMatrix& p);

/// Q-function parameter
///   H₁₁ = Q + αAᵀPA + ασΣAₗᵀPAₗ, H₁₂ = αAᵀPB + ασΣAₗᵀPBₗ,
///   H₂₂ = R + αBᵀPB + ασΣBₗᵀPBₗ.
SymMatrix h_from_p(const StochasticSystem& sys, const SymMatrix& p);

/// L = −H₂₂⁻¹H₁₂ᵀ via a Cholesky solve. Throws SingularBlock if H₂₂ is not
/// positive definite (tolerance `tol_pd`, default 1e-10·(1+‖H₂₂‖₂)).
Gain gain_from_h(const SymMatrix& h, int n, int m, std::optional<double> tol_pd = {});

struct RiccatiOptions {
  double tol = 1e-10;  // relative step tolerance
  int max_iter = 100000;
};

/// Fixed-point iteration P₀ = Q, P_{k+1} = 𝓡(P_k) until
/// ‖P_{k+1} − P_k‖_F ≤ tol·(1 + ‖P_k‖_F). Throws NoConvergence.
RiccatiResult solve_dgare(const StochasticSystem& sys, const RiccatiOptions& opts = {});

}  // namespace stolqr
