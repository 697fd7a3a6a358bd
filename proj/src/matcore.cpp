#include "stolqr/matcore.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "stolqr/errors.hpp"

namespace stolqr {

namespace {
constexpr double kSqrt2 = 1.41421356237309504880;
}

SymMatrix::SymMatrix() : m_(Matrix::Zero(1, 1)) {}

SymMatrix::SymMatrix(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw DimensionMismatch("SymMatrix requires a nonempty square matrix");
  }
  m_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::identity(int n) { return SymMatrix(Matrix::Identity(n, n)); }
SymMatrix SymMatrix::zero(int n) { return SymMatrix(Matrix::Zero(n, n)); }

SymMatrix SymMatrix::operator+(const SymMatrix& o) const { return SymMatrix(m_ + o.m_); }
SymMatrix SymMatrix::operator-(const SymMatrix& o) const { return SymMatrix(m_ - o.m_); }
SymMatrix SymMatrix::operator*(double s) const { return SymMatrix(s * m_); }

Vector svec(const SymMatrix& s) {
  const int n = s.dim();
  Vector v(svec_dim(n));
  int idx = 0;
  for (int i = 0; i < n; ++i) {
    v(idx++) = s(i, i);
    for (int k = i + 1; k < n; ++k) v(idx++) = kSqrt2 * s(i, k);
  }
  return v;
}

SymMatrix smat(const Vector& v) {
  const double len = static_cast<double>(v.size());
  const int n = static_cast<int>(std::lround((std::sqrt(8.0 * len + 1.0) - 1.0) / 2.0));
  if (n < 1 || svec_dim(n) != v.size()) {
    throw DimensionMismatch("smat: length " + std::to_string(v.size()) + " is not n(n+1)/2");
  }
  Matrix m(n, n);
  int idx = 0;
  for (int i = 0; i < n; ++i) {
    m(i, i) = v(idx++);
    for (int k = i + 1; k < n; ++k) {
      m(i, k) = m(k, i) = v(idx++) / kSqrt2;
    }
  }
  return SymMatrix(m);
}

int svec_index(int n, int i, int k) {
  if (i > k) std::swap(i, k);
  // Rows 0..i-1 contribute n, n-1, ..., n-i+1 entries.
  return i * n - i * (i - 1) / 2 + (k - i);
}

Vector vec(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

Matrix unvec(const Vector& v, int rows, int cols) {
  if (v.size() != static_cast<Eigen::Index>(rows) * cols) {
    throw DimensionMismatch("unvec: size mismatch");
  }
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix direct_sum(std::span<const Matrix> blocks) {
  if (blocks.empty()) throw InvalidConfig("direct_sum of an empty list");
  Eigen::Index rows = 0, cols = 0;
  for (const auto& b : blocks) {
    rows += b.rows();
    cols += b.cols();
  }
  Matrix out = Matrix::Zero(rows, cols);
  Eigen::Index r = 0, c = 0;
  for (const auto& b : blocks) {
    out.block(r, c, b.rows(), b.cols()) = b;
    r += b.rows();
    c += b.cols();
  }
  return out;
}

double default_tol_pd(const Matrix& block) {
  const double norm2 = block.size() == 0 ? 0.0 : block.jacobiSvd().singularValues()(0);
  return 1e-10 * (1.0 + norm2);
}

SymMatrix schur_p(const SymMatrix& f, int n, int m, std::optional<double> tol_pd) {
  if (f.dim() != n + m || n < 1 || m < 1) {
    throw DimensionMismatch("schur_p: F must have dimension n+m");
  }
  const Matrix& fm = f.mat();
  const Matrix f22 = fm.bottomRightCorner(m, m);
  const double lam = min_eig(SymMatrix(f22));
  const double tol = tol_pd.value_or(default_tol_pd(f22));
  if (lam <= tol) throw SingularBlock("schur_p: F22 is not positive definite", lam);
  const Matrix f12 = fm.topRightCorner(n, m);
  Eigen::LLT<Matrix> llt(f22);
  return SymMatrix(fm.topLeftCorner(n, n) - f12 * llt.solve(f12.transpose()));
}

double spectral_radius(const Matrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("spectral_radius of a non-square matrix");
  if (m.size() == 0) return 0.0;
  Eigen::EigenSolver<Matrix> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw NumericalError("spectral_radius: eigensolver failed");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double min_eig(const SymMatrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(s.mat(), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double max_eig(const SymMatrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(s.mat(), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(s.dim() - 1);
}

bool is_psd(const SymMatrix& s, double tol) { return min_eig(s) >= -tol; }

double min_singular_value(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  return sv(sv.size() - 1);
}

}  // namespace stolqr
