#pragma once

// Dense semidefinite programs in inequality form:
//
//   maximize cᵀx  subject to  G₀ᵢ + Σⱼ xⱼ Gⱼᵢ ⪰ 0  for every LMI i.
//
// Decision variables are svec'd symmetric blocks laid out contiguously; the
// layout is carried with the problem so solutions can be read back by name.

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "stolqr/matcore.hpp"

namespace stolqr {

struct LmiConstraint {
  int dim = 0;
  Matrix const_block;            // G₀
  std::map<int, Matrix> coeffs;  // variable index → Gⱼ (absent means zero)
};

/// Named span of the decision vector holding svec of a `dim`×`dim` block.
struct VarBlock {
  std::string name;
  int offset = 0;
  int dim = 0;
  int size() const { return svec_dim(dim); }
};

struct SdpProblem {
  int num_vars = 0;
  Vector objective;
  std::vector<LmiConstraint> lmis;
  std::vector<VarBlock> layout;

  /// Throws DimensionMismatch / InvalidConfig on a malformed problem.
  void validate() const;
  const VarBlock& block(const std::string& name) const;
};

enum class SdpStatus { Optimal, Inaccurate, Infeasible, Unbounded };

const char* to_string(SdpStatus s);

struct SdpSolution {
  Vector x;
  double objective = 0.0;
  double feas_residual = 0.0;  // max over LMIs of max(0, −λ_min)
  double gap = 0.0;            // relative primal-dual objective gap
  SdpStatus status = SdpStatus::Inaccurate;
  int iterations = 0;
};

struct SdpOptions {
  double tol_feas = 1e-8;
  double tol_gap = 1e-8;
  int max_iter = 100;
};

/// G₀ + Σ xⱼGⱼ. Throws DimensionMismatch if a coefficient index is out of range.
SymMatrix evaluate_lmi(const LmiConstraint& c, const Vector& x);

/// Primal-dual interior-point solve (HKM direction, Mehrotra
/// predictor-corrector, infeasible start). Throws NoProgress when the step
/// length collapses far from a solution.
SdpSolution solve_sdp(const SdpProblem& p, const SdpOptions& opts = {});

/// smat of the named block. Throws InvalidConfig for an unknown name.
SymMatrix extract_block(const SdpSolution& sol, const std::vector<VarBlock>& layout,
                        const std::string& name);

/// Sparse SDPA text dump (1-based indices) of the problem for debugging.
void write_sdpa(std::ostream& os, const SdpProblem& p);

}  // namespace stolqr
