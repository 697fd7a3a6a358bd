#pragma once

// Symmetric-matrix calculus shared by every other module: svec/smat,
// Kronecker products, direct sums, Schur complements and spectral helpers.

#include <Eigen/Dense>
#include <optional>
#include <span>

namespace stolqr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense real symmetric matrix. Construction symmetrizes its input as
/// (X + Xᵀ)/2, so stored entries satisfy S(i,k) == S(k,i) exactly.
class SymMatrix {
 public:
  /// 1×1 zero.
  SymMatrix();
  explicit SymMatrix(const Matrix& m);

  static SymMatrix identity(int n);
  static SymMatrix zero(int n);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& mat() const { return m_; }
  double operator()(int i, int k) const { return m_(i, k); }

  SymMatrix operator+(const SymMatrix& o) const;
  SymMatrix operator-(const SymMatrix& o) const;
  SymMatrix operator*(double s) const;

 private:
  Matrix m_;
};

/// Length n(n+1)/2 of svec on n×n matrices.
constexpr int svec_dim(int n) { return n * (n + 1) / 2; }

/// Upper triangle, row-major, off-diagonals scaled by √2 so that
/// svec(A)·svec(B) = Tr(AB).
Vector svec(const SymMatrix& s);
/// Inverse of svec. Throws DimensionMismatch if the length is not triangular.
SymMatrix smat(const Vector& v);
/// Position of entry (i, k) (any order) inside svec.
int svec_index(int n, int i, int k);

/// Column-stacking vectorization.
Vector vec(const Matrix& m);
Matrix unvec(const Vector& v, int rows, int cols);

Matrix kron(const Matrix& a, const Matrix& b);

/// Block-diagonal assembly in list order. Throws InvalidConfig on an empty list.
Matrix direct_sum(std::span<const Matrix> blocks);

/// Default positive-definiteness threshold for a block: 1e-10·(1 + ‖B‖₂).
double default_tol_pd(const Matrix& block);

/// F₁₁ − F₁₂ F₂₂⁻¹ F₁₂ᵀ for F of dimension n+m. Throws SingularBlock when
/// λ_min(F₂₂) ≤ tol_pd (default: default_tol_pd(F₂₂)).
SymMatrix schur_p(const SymMatrix& f, int n, int m, std::optional<double> tol_pd = {});

/// max |λ| of a square matrix. Throws NumericalError if the eigensolver fails.
double spectral_radius(const Matrix& m);

double min_eig(const SymMatrix& s);
double max_eig(const SymMatrix& s);
bool is_psd(const SymMatrix& s, double tol);

double min_singular_value(const Matrix& m);

}  // namespace stolqr
