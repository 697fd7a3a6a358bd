#include "stolqr/lqrsdp.hpp"

#include <cmath>
#include <Eigen/SVD>
#include <functional>

#include "stolqr/errors.hpp"

namespace stolqr {

namespace {

// Variables: svec(F) at [0, svec(n+m)), svec(M) right after.
std::vector<VarBlock> policy_layout(int n, int m) {
  return {{kBlockF, 0, n + m}, {kBlockM, svec_dim(n + m), n}};
}

// Coefficient matrices of an LMI whose linear part depends on F only, by
// pushing each unit basis matrix of 𝕊ⁿ⁺ᵐ through `linear`.
void add_f_coefficients(LmiConstraint& c, int d, const std::function<Matrix(const Matrix&)>& linear) {
  for (int j = 0; j < svec_dim(d); ++j) {
    Vector e = Vector::Zero(svec_dim(d));
    e(j) = 1.0;
    Matrix g = linear(smat(e).mat());
    if (g.cwiseAbs().maxCoeff() != 0.0) c.coeffs.emplace(j, 0.5 * (g + g.transpose()));
  }
}

// [[F₁₁ − M, F₁₂], [F₁₂ᵀ, F₂₂]] ⪰ 0.
LmiConstraint schur_lmi(int n, int m) {
  const int d = n + m;
  LmiConstraint c;
  c.dim = d;
  c.const_block = Matrix::Zero(d, d);
  add_f_coefficients(c, d, [](const Matrix& f) { return f; });
  const int off = svec_dim(d);
  for (int j = 0; j < svec_dim(n); ++j) {
    Vector e = Vector::Zero(svec_dim(n));
    e(j) = 1.0;
    Matrix g = Matrix::Zero(d, d);
    g.topLeftCorner(n, n) = -smat(e).mat();
    c.coeffs.emplace(off + j, g);
  }
  return c;
}

SdpProblem skeleton(int n, int m) {
  SdpProblem p;
  p.layout = policy_layout(n, m);
  p.num_vars = svec_dim(n + m) + svec_dim(n);
  p.objective = Vector::Zero(p.num_vars);
  p.objective.tail(svec_dim(n)) = svec(SymMatrix::identity(n));
  p.lmis.push_back(schur_lmi(n, m));
  return p;
}

}  // namespace

SdpProblem build_model_based(const StochasticSystem& sys) {
  sys.validate();
  const int n = sys.n(), m = sys.m(), d = n + m;
  const int copies = 1 + static_cast<int>(sys.channels.size());
  SdpProblem p = skeleton(n, m);

  // Ī = [I … I], D̄ = [A B] ⊕ [A₁ B₁] ⊕ … ⊕ [A_M B_M].
  Matrix ibar(d, copies * d);
  for (int l = 0; l < copies; ++l) ibar.middleCols(l * d, d).setIdentity();
  std::vector<Matrix> rows;
  Matrix ab(n, d);
  ab << sys.A, sys.B;
  rows.push_back(ab);
  for (const auto& ch : sys.channels) {
    Matrix abl(n, d);
    abl << ch.A, ch.B;
    rows.push_back(abl);
  }
  const Matrix dbar = direct_sum(rows);
  const Matrix id_t = ibar * dbar.transpose();  // ĪD̄ᵀ, d × copies·n

  const double alpha = sys.alpha;
  const double sig = sys.sigma;
  const int size = d + copies * m;
  auto linear = [&](const Matrix& f) {
    const Matrix f11 = f.topLeftCorner(n, n), f12 = f.topRightCorner(n, m), f22 = f.bottomRightCorner(m, m);
    std::vector<Matrix> b11, b12, b22;
    for (int l = 0; l < copies; ++l) {
      // Channel blocks carry σ in the quadratic term and √σ on the coupling so
      // the Schur complement reproduces ασ[A_l B_l]ᵀ𝒫(F)[A_l B_l].
      b11.push_back(l == 0 ? f11 : Matrix(sig * f11));
      b12.push_back(l == 0 ? f12 : Matrix(std::sqrt(sig) * f12));
      b22.push_back(f22);
    }
    Matrix out(size, size);
    out.topLeftCorner(d, d) = alpha * id_t * direct_sum(b11) * id_t.transpose() - f;
    out.topRightCorner(d, copies * m) = std::sqrt(alpha) * id_t * direct_sum(b12);
    out.bottomLeftCorner(copies * m, d) = out.topRightCorner(d, copies * m).transpose();
    out.bottomRightCorner(copies * m, copies * m) = direct_sum(b22);
    return out;
  };
  LmiConstraint c;
  c.dim = size;
  c.const_block = Matrix::Zero(size, size);
  c.const_block.topLeftCorner(d, d) = sys.W().mat();
  add_f_coefficients(c, d, linear);
  p.lmis.push_back(std::move(c));
  return p;
}

SdpProblem build_model_free(const ModelFreeInputs& in) {
  if (in.dataset == nullptr) throw InvalidConfig("build_model_free: no dataset");
  const Dataset& ds = *in.dataset;
  if (ds.samples.empty()) throw InvalidConfig("build_model_free: empty dataset");
  const int N = static_cast<int>(ds.samples.size());
  const int n = static_cast<int>(ds.samples.front().Y.rows());
  const int d = in.W.dim();
  const int m = d - n;
  const int K = static_cast<int>(ds.samples.front().Z.cols());
  if (m < 1) throw DimensionMismatch("build_model_free: W must be (n+m) x (n+m)");
  if (K < d) throw InvalidConfig("build_model_free: K must be at least n+m");
  if (!(in.alpha > 0.0 && in.alpha < 1.0)) throw InvalidConfig("build_model_free: alpha must lie in (0, 1)");
  for (int i = 0; i < N; ++i) {
    const Sample& s = ds.samples[i];
    if (s.Z.rows() != d || s.Z.cols() != K || s.Y.rows() != n || s.Y.cols() != K) {
      throw DimensionMismatch("build_model_free: sample " + std::to_string(i) + " has the wrong shape");
    }
    if (!check_rank(s.Z).ok) {
      throw RankDeficientData("build_model_free: Z of sample " + std::to_string(i) + " is not full row rank");
    }
  }

  SdpProblem p = skeleton(n, m);
  const double scale = in.average ? 1.0 / N : 1.0;
  const double alpha = in.alpha;
  const double ra = std::sqrt(alpha);
  const int size = K + N * m;

  // Σᵢ[αYᵢᵀF₁₁Yᵢ − Zᵢᵀ F Zᵢ] | √α[Y₁ᵀF₁₂ … Y_NᵀF₁₂] | ⊕ᵢF₂₂, summed in sample order.
  auto linear = [&](const Matrix& f) {
    const Matrix f11 = f.topLeftCorner(n, n), f12 = f.topRightCorner(n, m), f22 = f.bottomRightCorner(m, m);
    Matrix out = Matrix::Zero(size, size);
    for (int i = 0; i < N; ++i) {
      const Sample& s = ds.samples[i];
      out.topLeftCorner(K, K) += alpha * s.Y.transpose() * f11 * s.Y - s.Z.transpose() * f * s.Z;
      out.block(0, K + i * m, K, m) = ra * s.Y.transpose() * f12;
      out.block(K + i * m, K + i * m, m, m) = f22;
    }
    out.bottomLeftCorner(N * m, K) = out.topRightCorner(K, N * m).transpose();
    return Matrix(scale * out);
  };
  LmiConstraint c;
  c.dim = size;
  c.const_block = Matrix::Zero(size, size);
  for (const Sample& s : ds.samples) c.const_block.topLeftCorner(K, K) += s.Z.transpose() * in.W.mat() * s.Z;
  c.const_block *= scale;
  c.const_block = 0.5 * (c.const_block + c.const_block.transpose());
  add_f_coefficients(c, d, linear);

  // Every term of the first K rows lies in span{rows of Zᵢ, Yᵢ}; when that
  // span is smaller than K the slack has a structural null space and no
  // interior. Compressing onto an orthonormal basis of the span is exact.
  Matrix span(K, N * (d + n));
  for (int i = 0; i < N; ++i) {
    span.middleCols(i * (d + n), d) = ds.samples[i].Z.transpose();
    span.middleCols(i * (d + n) + d, n) = ds.samples[i].Y.transpose();
  }
  Eigen::JacobiSVD<Matrix> svd(span, Eigen::ComputeThinU);
  const Vector sv = svd.singularValues();
  int r = 0;
  while (r < sv.size() && sv(r) > 1e-12 * K * sv(0)) ++r;
  if (r < K) {
    Matrix t = Matrix::Zero(r + N * m, size);
    t.topLeftCorner(r, K) = svd.matrixU().leftCols(r).transpose();
    t.bottomRightCorner(N * m, N * m).setIdentity();
    auto reduce = [&t](const Matrix& g) {
      const Matrix h = t * g * t.transpose();
      return Matrix(0.5 * (h + h.transpose()));
    };
    c.dim = r + N * m;
    c.const_block = reduce(c.const_block);
    for (auto& [j, g] : c.coeffs) g = reduce(g);
  }
  p.lmis.push_back(std::move(c));
  return p;
}

PolicyEstimate extract_policy(const SdpSolution& sol, const std::vector<VarBlock>& layout, int n, int m) {
  if (sol.status != SdpStatus::Optimal && sol.status != SdpStatus::Inaccurate) {
    throw NumericalError(std::string("extract_policy: solver status is ") + to_string(sol.status));
  }
  SymMatrix f = extract_block(sol, layout, kBlockF);
  if (f.dim() != n + m) throw DimensionMismatch("extract_policy: F block has the wrong size");
  const Matrix f22 = f.mat().bottomRightCorner(m, m);
  const double lam = min_eig(SymMatrix(f22));
  const double norm2 = f22.jacobiSvd().singularValues()(0);
  if (lam <= 1e-8 * (1.0 + norm2)) throw SingularBlock("extract_policy: F22 is numerically singular", lam);
  Eigen::LLT<Matrix> llt(f22);
  Gain l(-llt.solve(f.mat().topRightCorner(n, m).transpose()));
  return {std::move(l), extract_block(sol, layout, kBlockM), std::move(f)};
}

}  // namespace stolqr
