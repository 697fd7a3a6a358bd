#pragma once

// Model-based and data-driven SDP formulations of the discounted stochastic
// LQR problem. Both maximize Tr(M) over symmetric F (dimension n+m) and M
// (dimension n); at the optimum F recovers the Q-function parameter and M the
// Riccati solution, and the gain is −F₂₂⁻¹F₁₂ᵀ.

#include "stolqr/datagen.hpp"
#include "stolqr/sdp.hpp"
#include "stolqr/sysmodel.hpp"

namespace stolqr {

inline constexpr const char* kBlockF = "F";
inline constexpr const char* kBlockM = "M";

SdpProblem build_model_based(const StochasticSystem& sys);

struct ModelFreeInputs {
  const Dataset* dataset = nullptr;
  SymMatrix W;
  double alpha = 0.5;
  /// Multiply the data LMI by 1/N (sample average). Feasibility is unchanged.
  bool average = false;
};

/// Data-driven problem built only from (Z⁽ⁱ⁾, Y⁽ⁱ⁾), W and α. Throws
/// RankDeficientData if a Z⁽ⁱ⁾ is not full row rank.
SdpProblem build_model_free(const ModelFreeInputs& in);

struct PolicyEstimate {
  Gain L;
  SymMatrix P;
  SymMatrix F;
};

/// L̂ = −F̂₂₂⁻¹F̂₁₂ᵀ, P̂ = M̂. Throws SingularBlock when
/// λ_min(F̂₂₂) ≤ 1e-8·(1 + ‖F̂₂₂‖₂), NumericalError if the solve was not
/// Optimal or Inaccurate.
PolicyEstimate extract_policy(const SdpSolution& sol, const std::vector<VarBlock>& layout, int n,
                              int m);

}  // namespace stolqr
