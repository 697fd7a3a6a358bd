#include "stolqr/sdp.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cmath>
#include <limits>
#include <ostream>

#include "stolqr/errors.hpp"

namespace stolqr {

const char* to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal: return "Optimal";
    case SdpStatus::Inaccurate: return "Inaccurate";
    case SdpStatus::Infeasible: return "Infeasible";
    case SdpStatus::Unbounded: return "Unbounded";
  }
  return "?";
}

void SdpProblem::validate() const {
  if (num_vars < 1) throw InvalidConfig("SdpProblem: num_vars must be positive");
  if (objective.size() != num_vars) throw DimensionMismatch("SdpProblem: objective length != num_vars");
  for (const auto& c : lmis) {
    if (c.dim < 1 || c.const_block.rows() != c.dim || c.const_block.cols() != c.dim) {
      throw DimensionMismatch("SdpProblem: LMI constant block has the wrong size");
    }
    for (const auto& [j, g] : c.coeffs) {
      if (j < 0 || j >= num_vars) throw DimensionMismatch("SdpProblem: coefficient index out of range");
      if (g.rows() != c.dim || g.cols() != c.dim) {
        throw DimensionMismatch("SdpProblem: coefficient block has the wrong size");
      }
      if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + g.cwiseAbs().maxCoeff())) {
        throw InvalidConfig("SdpProblem: coefficient block is not symmetric");
      }
    }
  }
  std::vector<int> owner(num_vars, -1);
  for (std::size_t b = 0; b < layout.size(); ++b) {
    const auto& vb = layout[b];
    if (vb.offset < 0 || vb.offset + vb.size() > num_vars) {
      throw DimensionMismatch("SdpProblem: layout span '" + vb.name + "' out of range");
    }
    for (int k = vb.offset; k < vb.offset + vb.size(); ++k) {
      if (owner[k] != -1) throw InvalidConfig("SdpProblem: layout spans overlap");
      owner[k] = static_cast<int>(b);
    }
  }
  if (!layout.empty() && std::find(owner.begin(), owner.end(), -1) != owner.end()) {
    throw InvalidConfig("SdpProblem: layout does not cover every variable");
  }
}

const VarBlock& SdpProblem::block(const std::string& name) const {
  for (const auto& vb : layout) {
    if (vb.name == name) return vb;
  }
  throw InvalidConfig("unknown variable block '" + name + "'");
}

SymMatrix evaluate_lmi(const LmiConstraint& c, const Vector& x) {
  Matrix out = c.const_block;
  for (const auto& [j, g] : c.coeffs) {
    if (j < 0 || j >= x.size()) throw DimensionMismatch("evaluate_lmi: variable index out of range");
    out += x(j) * g;
  }
  return SymMatrix(out);
}

SymMatrix extract_block(const SdpSolution& sol, const std::vector<VarBlock>& layout,
                        const std::string& name) {
  for (const auto& vb : layout) {
    if (vb.name != name) continue;
    if (vb.offset + vb.size() > sol.x.size()) {
      throw DimensionMismatch("extract_block: solution vector too short");
    }
    return smat(sol.x.segment(vb.offset, vb.size()));
  }
  throw InvalidConfig("extract_block: unknown block '" + name + "'");
}

namespace {

using Blocks = std::vector<Matrix>;

double inner(const Blocks& a, const Blocks& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k].cwiseProduct(b[k]).sum();
  return s;
}

double frob(const Blocks& a) { return std::sqrt(inner(a, a)); }

Matrix sym(const Matrix& m) { return 0.5 * (m + m.transpose()); }

// Largest t with X + t·dX ⪰ 0 (infinity if dX keeps X in the cone).
double max_step(const Matrix& x, const Matrix& dx) {
  Eigen::LLT<Matrix> llt(x);
  if (llt.info() != Eigen::Success) return 0.0;
  const auto& l = llt.matrixL();
  Matrix w = l.solve(dx);
  w = l.solve(w.transpose()).transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym(w), Eigen::EigenvaluesOnly);
  const double lam = es.eigenvalues()(0);
  return lam >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / lam;
}

// Problem data arranged for the standard-form primal-dual pair
//   (P) min ⟨C, X⟩  s.t. ⟨Aᵢ, X⟩ = bᵢ, X ⪰ 0
//   (D) max bᵀy     s.t. Σ yᵢAᵢ + Z = C, Z ⪰ 0
// with C = G₀, Aᵢ = −Gᵢ, b = c, so that Z is the LMI slack at x = y.
class IpmSolver {
 public:
  IpmSolver(const SdpProblem& p, const SdpOptions& opts) : p_(p), opts_(opts) {
    nb_ = p.lmis.size();
    coeffs_.resize(nb_);
    for (std::size_t b = 0; b < nb_; ++b) {
      for (const auto& [j, g] : p.lmis[b].coeffs) coeffs_[b].push_back({j, &g});
      total_dim_ += p.lmis[b].dim;
    }
    norm_c_ = p.objective.norm();
    double g0 = 0.0;
    for (const auto& c : p.lmis) g0 += c.const_block.squaredNorm();
    norm_g0_ = std::sqrt(g0);
  }

  SdpSolution run();

 private:
  Blocks lmi_at(const Vector& y) const {
    Blocks out(nb_);
    for (std::size_t b = 0; b < nb_; ++b) {
      out[b] = p_.lmis[b].const_block;
      for (const auto& [j, g] : coeffs_[b]) out[b] += y(j) * (*g);
    }
    return out;
  }

  // Σ yⱼGⱼ without the constant.
  Blocks linear_at(const Vector& y) const {
    Blocks out(nb_);
    for (std::size_t b = 0; b < nb_; ++b) {
      out[b] = Matrix::Zero(p_.lmis[b].dim, p_.lmis[b].dim);
      for (const auto& [j, g] : coeffs_[b]) out[b] += y(j) * (*g);
    }
    return out;
  }

  // tᵢ = Σ_b Tr(Gᵢ V_b) for possibly nonsymmetric V.
  Vector trace_against(const Blocks& v) const {
    Vector t = Vector::Zero(p_.num_vars);
    for (std::size_t b = 0; b < nb_; ++b) {
      for (const auto& [j, g] : coeffs_[b]) t(j) += g->cwiseProduct(v[b].transpose()).sum();
    }
    return t;
  }

  struct Direction {
    Blocks dx, dz;
    Vector dy;
  };

  Direction direction(const Blocks& rd, const Vector& rp, double target_mu, const Blocks* corr) const;
  double step_primal(const Blocks& dx) const;
  double step_dual(const Blocks& dz) const;
  bool infeasible_certificate() const;
  bool unbounded_certificate() const;

  const SdpProblem& p_;
  SdpOptions opts_;
  std::size_t nb_ = 0;
  int total_dim_ = 0;
  std::vector<std::vector<std::pair<int, const Matrix*>>> coeffs_;
  double norm_c_ = 0.0, norm_g0_ = 0.0;

  // M = BᵀB = V S² Vᵀ from a QR of B and the SVD of its R factor, which
  // avoids squaring cond(B). Numerically null directions are dropped: on a
  // non-unique optimal face they only let rounding error push y along it.
  Vector schur_solve(const Vector& rhs) const {
    const Vector sv = schur_svd_.singularValues();
    Vector w = schur_svd_.matrixV().transpose() * rhs;
    for (int k = 0; k < w.size(); ++k) w(k) = sv(k) > 1e-12 * sv(0) ? w(k) / (sv(k) * sv(k)) : 0.0;
    return schur_svd_.matrixV() * w;
  }
  Eigen::JacobiSVD<Matrix> schur_svd_;
  bool factor_schur();

  // V Z⁻¹ through the Cholesky factor of Z.
  Matrix right_zinv(std::size_t b, const Matrix& v) const { return zllt_[b].solve(v.transpose()).transpose(); }

  Blocks x_, z_, zinv_;
  std::vector<Eigen::LLT<Matrix>> zllt_;
  Vector y_;
};

// Column j of B stacks vec(Lz⁻¹ Gⱼ Lx) over the blocks, where X = LxLxᵀ and
// Z = LzLzᵀ, so that (BᵀB)ᵢⱼ = Σ_b Tr(Gᵢ X Gⱼ Z⁻¹).
bool IpmSolver::factor_schur() {
  const int nv = p_.num_vars;
  int rows = 0;
  for (std::size_t b = 0; b < nb_; ++b) rows += p_.lmis[b].dim * p_.lmis[b].dim;
  Matrix bm = Matrix::Zero(rows, nv);
  int off = 0;
  for (std::size_t b = 0; b < nb_; ++b) {
    const int d = p_.lmis[b].dim;
    Eigen::LLT<Matrix> lx(x_[b]), lz(z_[b]);
    if (lx.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
    const Matrix gx = lx.matrixL();
    for (const auto& [j, g] : coeffs_[b]) {
      const Matrix t = lz.matrixL().solve((*g) * gx);
      bm.block(off, j, d * d, 1) = Eigen::Map<const Vector>(t.data(), d * d);
    }
    off += d * d;
  }
  Eigen::HouseholderQR<Matrix> qr(bm);
  const Matrix r = qr.matrixQR().topRows(nv).triangularView<Eigen::Upper>();
  schur_svd_.compute(r, Eigen::ComputeFullV);
  return schur_svd_.singularValues()(0) > 0.0 && schur_svd_.singularValues().allFinite();
}

IpmSolver::Direction IpmSolver::direction(const Blocks& rd, const Vector& rp, double target_mu,
                                          const Blocks* corr) const {
  // HKM: dX = sym(σμZ⁻¹ − X − X dZ Z⁻¹ − E), dZ = R_d − Σ dyᵢAᵢ, ⟨Aᵢ, dX⟩ = R_pᵢ.
  Blocks base(nb_), xrdz(nb_);
  for (std::size_t b = 0; b < nb_; ++b) {
    base[b] = target_mu * zinv_[b] - x_[b];
    if (corr != nullptr) base[b] -= (*corr)[b];
    xrdz[b] = right_zinv(b, x_[b] * rd[b]);
  }
  const Vector rhs = rp + trace_against(base) - trace_against(xrdz);
  Direction d;
  d.dy = schur_solve(rhs);
  d.dz.resize(nb_);
  d.dx.resize(nb_);
  auto assemble = [&] {
    const Blocks lin = linear_at(d.dy);
    for (std::size_t b = 0; b < nb_; ++b) {
      d.dz[b] = sym(rd[b] + lin[b]);
      d.dx[b] = sym(base[b] - right_zinv(b, x_[b] * d.dz[b]));
    }
  };
  assemble();
  // Refine against the primal residual the assembled direction actually leaves.
  for (int k = 0; k < 2; ++k) {
    d.dy += schur_solve(rp + trace_against(d.dx));
    assemble();
  }
  return d;
}

double IpmSolver::step_primal(const Blocks& dx) const {
  double t = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < nb_; ++b) t = std::min(t, max_step(x_[b], dx[b]));
  return t;
}

double IpmSolver::step_dual(const Blocks& dz) const {
  double t = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < nb_; ++b) t = std::min(t, max_step(z_[b], dz[b]));
  return t;
}

// X ⪰ 0 with Tr(GᵢX) ≈ 0 and Tr(G₀X) < 0 proves the LMIs have no common solution.
bool IpmSolver::infeasible_certificate() const {
  double pobj = 0.0;
  for (std::size_t b = 0; b < nb_; ++b) pobj += p_.lmis[b].const_block.cwiseProduct(x_[b]).sum();
  if (pobj >= 0.0) return false;
  const Vector ax = trace_against(x_) / (-pobj);
  return ax.norm() <= 1e-8 * (1.0 + norm_c_) && -pobj > 1e6 * (1.0 + norm_g0_);
}

// Σ yᵢGᵢ ⪰ 0 with cᵀy > 0 is a ray along which the objective grows without bound.
bool IpmSolver::unbounded_certificate() const {
  const double dobj = p_.objective.dot(y_);
  if (dobj <= 1e6 * (1.0 + norm_g0_)) return false;
  const Blocks lin = linear_at(y_ / dobj);
  for (std::size_t b = 0; b < nb_; ++b) {
    if (min_eig(SymMatrix(lin[b])) < -1e-8) return false;
  }
  return true;
}

SdpSolution IpmSolver::run() {
  const int nv = p_.num_vars;
  x_.resize(nb_);
  z_.resize(nb_);
  zinv_.resize(nb_);
  zllt_.resize(nb_);
  y_ = Vector::Zero(nv);
  for (std::size_t b = 0; b < nb_; ++b) {
    const int d = p_.lmis[b].dim;
    double max_g = 0.0, ratio = 0.0;
    for (const auto& [j, g] : coeffs_[b]) {
      const double ng = g->norm();
      max_g = std::max(max_g, ng);
      ratio = std::max(ratio, (1.0 + std::abs(p_.objective(j))) / (1.0 + ng));
    }
    const double xi = std::max({10.0, std::sqrt(double(d)), d * ratio});
    const double eta = std::max({10.0, std::sqrt(double(d)), max_g, p_.lmis[b].const_block.norm()});
    x_[b] = xi * Matrix::Identity(d, d);
    z_[b] = eta * Matrix::Identity(d, d);
  }

  SdpSolution sol;
  double pinf = INFINITY, dinf = INFINITY, gap = INFINITY;
  bool converged = false;
  int it = 0;
  // Late iterations can lose accuracy once the Schur system is badly
  // conditioned, so the best iterate seen is what gets reported.
  struct Best {
    double merit = INFINITY, pinf = INFINITY, dinf = INFINITY, gap = INFINITY;
    Vector y;
    int it = 0;
  } best;
  int since_best = 0;
  for (; it <= opts_.max_iter; ++it) {
    const Blocks lmi = lmi_at(y_);
    Blocks rd(nb_);
    for (std::size_t b = 0; b < nb_; ++b) rd[b] = lmi[b] - z_[b];
    const Vector rp = p_.objective + trace_against(x_);
    double pobj = 0.0;
    for (std::size_t b = 0; b < nb_; ++b) pobj += p_.lmis[b].const_block.cwiseProduct(x_[b]).sum();
    const double dobj = p_.objective.dot(y_);
    const double xz = inner(x_, z_);
    pinf = rp.norm() / (1.0 + norm_c_);
    dinf = frob(rd) / (1.0 + norm_g0_);
    const double denom = 1.0 + std::abs(pobj) + std::abs(dobj);
    gap = std::max(std::abs(pobj - dobj), std::abs(xz)) / denom;
    if (std::getenv("STOLQR_SDP_TRACE")) {
      std::fprintf(stderr, "it %3d pobj %.10e dobj %.10e pinf %.2e dinf %.2e gap %.2e\n", it, pobj, dobj, pinf, dinf, gap);
    }
    if (pinf <= opts_.tol_feas && dinf <= opts_.tol_feas && gap <= opts_.tol_gap) {
      converged = true;
      break;
    }
    const double merit = std::max({pinf / opts_.tol_feas, dinf / opts_.tol_feas, gap / opts_.tol_gap});
    if (merit < 0.9 * best.merit) {
      best = {merit, pinf, dinf, gap, y_, it};
      since_best = 0;
    } else if (++since_best >= 15) {
      break;
    }
    if (infeasible_certificate()) {
      sol.status = SdpStatus::Infeasible;
      sol.x = y_;
      sol.iterations = it;
      sol.objective = p_.objective.dot(y_);
      sol.gap = gap;
      return sol;
    }
    if (unbounded_certificate()) {
      sol.status = SdpStatus::Unbounded;
      sol.x = y_;
      sol.iterations = it;
      sol.objective = p_.objective.dot(y_);
      sol.gap = gap;
      return sol;
    }
    if (it == opts_.max_iter) break;

    const double mu = xz / total_dim_;
    for (std::size_t b = 0; b < nb_; ++b) {
      zllt_[b].compute(z_[b]);
      zinv_[b] = sym(zllt_[b].solve(Matrix::Identity(z_[b].rows(), z_[b].cols())));
    }
    if (!factor_schur()) break;

    const Direction pred = direction(rd, rp, 0.0, nullptr);
    const double ap = std::min(1.0, step_primal(pred.dx));
    const double ad = std::min(1.0, step_dual(pred.dz));
    Blocks xt(nb_), zt(nb_), corr(nb_);
    for (std::size_t b = 0; b < nb_; ++b) {
      xt[b] = x_[b] + ap * pred.dx[b];
      zt[b] = z_[b] + ad * pred.dz[b];
      corr[b] = right_zinv(b, pred.dx[b] * pred.dz[b]);
    }
    const double ratio = std::clamp(inner(xt, zt) / xz, 0.0, 1.0);
    const double sigma = std::pow(ratio, 3);

    const Direction d = direction(rd, rp, sigma * mu, &corr);
    const double gamma = 0.9 + 0.09 * std::min(ap, ad);
    const double tp = std::min(1.0, gamma * step_primal(d.dx));
    const double td = std::min(1.0, gamma * step_dual(d.dz));
    if (tp < 1e-10 && td < 1e-10) break;
    for (std::size_t b = 0; b < nb_; ++b) {
      x_[b] = sym(x_[b] + tp * d.dx[b]);
      z_[b] = sym(z_[b] + td * d.dz[b]);
    }
    y_ += td * d.dy;
  }

  if (!converged && best.y.size() == nv) {
    y_ = best.y;
    pinf = best.pinf;
    dinf = best.dinf;
    gap = best.gap;
  }
  sol.x = y_;
  sol.iterations = it;
  sol.objective = p_.objective.dot(y_);
  sol.gap = gap;
  for (const auto& c : p_.lmis) {
    sol.feas_residual = std::max(sol.feas_residual, std::max(0.0, -min_eig(evaluate_lmi(c, y_))));
  }
  const bool near = pinf <= 1e-5 && dinf <= 1e-5 && gap <= 1e-5;
  if (converged && sol.feas_residual <= opts_.tol_feas) {
    sol.status = SdpStatus::Optimal;
  } else if (converged || near) {
    sol.status = SdpStatus::Inaccurate;
  } else {
    throw NoProgress("solve_sdp: interior-point iteration stalled (pinf " + std::to_string(pinf) +
                     ", dinf " + std::to_string(dinf) + ", gap " + std::to_string(gap) + ")");
  }
  return sol;
}

}  // namespace

SdpSolution solve_sdp(const SdpProblem& p, const SdpOptions& opts) {
  p.validate();
  if (p.lmis.empty()) throw InvalidConfig("solve_sdp: problem has no constraints");
  IpmSolver solver(p, opts);
  return solver.run();
}

void write_sdpa(std::ostream& os, const SdpProblem& p) {
  // SDPA primal: minimize cᵀx s.t. Σ Fᵢxᵢ − F₀ ⪰ 0, so F₀ = −G₀, Fᵢ = Gᵢ, c = −objective.
  const auto old_prec = os.precision(17);
  os << p.num_vars << "\n" << p.lmis.size() << "\n";
  for (std::size_t b = 0; b < p.lmis.size(); ++b) os << (b ? " " : "") << p.lmis[b].dim;
  os << "\n";
  for (int j = 0; j < p.num_vars; ++j) os << (j ? " " : "") << -p.objective(j);
  os << "\n";
  auto emit = [&](int mat, int blk, const Matrix& g, double sign) {
    for (int r = 0; r < g.rows(); ++r) {
      for (int c = r; c < g.cols(); ++c) {
        if (g(r, c) != 0.0) os << mat << " " << blk << " " << r + 1 << " " << c + 1 << " " << sign * g(r, c) << "\n";
      }
    }
  };
  for (std::size_t b = 0; b < p.lmis.size(); ++b) {
    emit(0, static_cast<int>(b) + 1, p.lmis[b].const_block, -1.0);
    for (const auto& [j, g] : p.lmis[b].coeffs) emit(j + 1, static_cast<int>(b) + 1, g, 1.0);
  }
  os.precision(old_prec);
}

}  // namespace stolqr
