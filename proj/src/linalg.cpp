#include "dynframe/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dynframe/error.hpp"
#include "dynframe/kernels.hpp"

namespace dynframe::linalg {

namespace {

bool is_real(const CMatrix& m) { return m.imag().cwiseAbs().maxCoeff() == 0.0; }

template <typename Svd>
void check_info(const Svd& s) {
  if (s.info() != Eigen::Success) throw NonConvergence("SVD did not converge");
}

struct FullSvd {
  RVector sigma;
  CMatrix u;
  CMatrix v;
};

// Eigen's divide-and-conquer SVD can pair singular values with the wrong
// right singular vectors when many singular values deflate to exactly zero
// (structured 0/1 matrices trigger it). Each column of V is checked against
// |M v_i| = sigma_i; on failure the one-sided Jacobi SVD is used instead.
template <typename Matrix>
bool vectors_consistent(const Matrix& m, const RVector& sigma, const Matrix& v) {
  const double s1 = sigma.size() > 0 ? sigma(0) : 0.0;
  const double slack = 1e-10 * std::max(s1, 1e-300) * std::sqrt(static_cast<double>(m.cols()));
  const RVector norms = (m * v).colwise().norm().transpose();
  for (Eigen::Index i = 0; i < norms.size(); ++i) {
    const double expected = i < sigma.size() ? sigma(i) : 0.0;
    if (std::abs(norms(i) - expected) > slack) return false;
  }
  return true;
}

template <typename Matrix>
void fill(FullSvd& out, const Matrix& m, unsigned opts, bool want_u) {
  Eigen::BDCSVD<Matrix> s(m, opts);
  check_info(s);
  if (vectors_consistent(m, s.singularValues(), Matrix(s.matrixV()))) {
    out.sigma = s.singularValues();
    if (want_u) out.u = s.matrixU().template cast<Complex>();
    out.v = s.matrixV().template cast<Complex>();
    return;
  }
  Eigen::JacobiSVD<Matrix> j(m, opts);
  check_info(j);
  out.sigma = j.singularValues();
  if (want_u) out.u = j.matrixU().template cast<Complex>();
  out.v = j.matrixV().template cast<Complex>();
}

// `full_v` requests all right singular vectors even for wide input.
FullSvd decompose(const CMatrix& m, bool want_u, bool full_v) {
  FullSvd out;
  unsigned opts = 0;
  if (want_u) opts |= Eigen::ComputeThinU;
  opts |= full_v ? Eigen::ComputeFullV : Eigen::ComputeThinV;
  if (m.size() == 0) {
    out.sigma = RVector::Zero(0);
    out.u = CMatrix::Zero(m.rows(), 0);
    out.v = full_v ? CMatrix(CMatrix::Identity(m.cols(), m.cols())) : CMatrix(CMatrix::Zero(m.cols(), 0));
    return out;
  }
  if (is_real(m)) {
    fill(out, Eigen::MatrixXd(m.real()), opts, want_u);
  } else {
    fill(out, m, opts, want_u);
  }
  if (!out.sigma.allFinite()) throw NonConvergence("SVD produced non-finite singular values");
  return out;
}

}  // namespace

int SvdResult::rank(double rel_cutoff) const {
  if (singular_values.size() == 0 || singular_values(0) == 0.0) return 0;
  const double cut = rel_cutoff * singular_values(0);
  int r = 0;
  for (Eigen::Index i = 0; i < singular_values.size(); ++i) {
    if (singular_values(i) > cut) ++r;
  }
  return r;
}

SvdResult svd(const CMatrix& m) {
  require_finite(m, "svd input");
  FullSvd f = decompose(m, true, false);
  return SvdResult{std::move(f.sigma), std::move(f.u), std::move(f.v)};
}

RVector singular_values(const CMatrix& m) {
  require_finite(m, "svd input");
  if (m.size() == 0) return RVector::Zero(0);
  if (is_real(m)) {
    Eigen::BDCSVD<Eigen::MatrixXd> s(m.real().eval(), 0);
    check_info(s);
    return s.singularValues();
  }
  Eigen::BDCSVD<CMatrix> s(m, 0);
  check_info(s);
  return s.singularValues();
}

CMatrix nullspace(const CMatrix& m, double tol) {
  if (!(tol > 0.0 && tol < 1.0)) throw InvalidArgument("nullspace tolerance must lie in (0, 1)");
  require_finite(m, "nullspace input");
  const Eigen::Index n = m.cols();
  FullSvd f = decompose(m, false, true);
  const double s1 = f.sigma.size() > 0 ? f.sigma(0) : 0.0;
  if (s1 == 0.0) return CMatrix::Identity(n, n);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < f.sigma.size(); ++i) {
    if (f.sigma(i) > tol * s1) ++rank;
  }
  return f.v.rightCols(n - rank);
}

LstsqResult lstsq(const CMatrix& m, const CMatrix& b, double cutoff) {
  if (m.rows() != b.rows()) throw DimMismatch("lstsq: row counts differ");
  require_finite(m, "lstsq matrix");
  require_finite(b, "lstsq right-hand side");
  LstsqResult out;
  FullSvd f = decompose(m, true, false);
  const double s1 = f.sigma.size() > 0 ? f.sigma(0) : 0.0;
  RVector inv = RVector::Zero(f.sigma.size());
  for (Eigen::Index i = 0; i < f.sigma.size(); ++i) {
    if (s1 > 0.0 && f.sigma(i) > cutoff * s1) {
      inv(i) = 1.0 / f.sigma(i);
      ++out.rank;
    }
  }
  out.solution = f.v * (inv.asDiagonal() * (f.u.adjoint() * b));
  out.residual_norm = (m * out.solution - b).norm();
  return out;
}

CMatrix pinv(const CMatrix& m, double cutoff) {
  require_finite(m, "pinv input");
  FullSvd f = decompose(m, true, false);
  const double s1 = f.sigma.size() > 0 ? f.sigma(0) : 0.0;
  RVector inv = RVector::Zero(f.sigma.size());
  for (Eigen::Index i = 0; i < f.sigma.size(); ++i) {
    if (s1 > 0.0 && f.sigma(i) > cutoff * s1) inv(i) = 1.0 / f.sigma(i);
  }
  return f.v * inv.asDiagonal() * f.u.adjoint();
}

HermitianEig eig_hermitian(const CMatrix& m) {
  if (m.rows() != m.cols()) throw InvalidArgument("eig_hermitian: matrix is not square");
  require_finite(m, "eig_hermitian input");
  const double scale = m.norm();
  if ((m - m.adjoint()).norm() > 1e-10 * scale) {
    throw NotHermitian("eig_hermitian: matrix deviates from its adjoint beyond 1e-10 relative");
  }
  const CMatrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(sym);
  if (es.info() != Eigen::Success) throw NonConvergence("Hermitian eigensolver did not converge");
  return HermitianEig{es.eigenvalues(), es.eigenvectors()};
}

double spectral_radius(const CMatrix& m) {
  if (m.rows() != m.cols()) throw InvalidArgument("spectral_radius: matrix is not square");
  require_finite(m, "spectral_radius input");
  if (m.size() == 0) return 0.0;
  Eigen::ComplexEigenSolver<CMatrix> es(m, false);
  if (es.info() != Eigen::Success) throw NonConvergence("eigenvalue iteration did not converge");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double spectral_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  const Eigen::Index small = std::min(m.rows(), m.cols());
  const Eigen::Index large = std::max(m.rows(), m.cols());
  // Tall-skinny shapes: the Gram matrix is tiny and its top eigenvalue carries
  // full relative precision.
  if (small <= 32 && large > 4 * small) {
    const CMatrix g = m.rows() >= m.cols() ? CMatrix(m.adjoint() * m) : CMatrix(m * m.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(g, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
  }
  return singular_values(m)(0);
}

int numerical_rank(const CMatrix& m, double tol) {
  const RVector s = singular_values(m);
  if (s.size() == 0 || s(0) == 0.0) return 0;
  return static_cast<int>((s.array() > tol * s(0)).count());
}

CMatrix orthonormal_range(const CMatrix& m, double tol) {
  SvdResult s = svd(m);
  return s.u.leftCols(s.rank(tol));
}

double max_principal_angle(const CMatrix& qa, const CMatrix& qb) {
  if (qa.cols() != qb.cols() || qa.rows() != qb.rows()) return std::numbers::pi / 2;
  if (qa.cols() == 0) return 0.0;
  const CMatrix residual = qb - qa * (qa.adjoint() * qb);
  const double s = std::min(1.0, spectral_norm(residual));
  return std::asin(s);
}

double max_principal_angle_of_spans(const CMatrix& a, const CMatrix& b, double tol) {
  return max_principal_angle(orthonormal_range(a, tol), orthonormal_range(b, tol));
}

bool all_finite(const CMatrix& m) { return m.allFinite(); }

void require_finite(const CMatrix& m, const char* what) {
  if (!m.allFinite()) throw InvalidArgument(std::string(what) + " contains NaN or infinite entries");
}

CMatrix matrix_power(const CMatrix& m, std::uint64_t n) {
  if (m.rows() != m.cols()) throw InvalidArgument("matrix_power: matrix is not square");
  CMatrix result = CMatrix::Identity(m.rows(), m.cols());
  CMatrix base = m;
  while (n > 0) {
    if (n & 1u) result = result * base;
    n >>= 1u;
    if (n > 0) base = base * base;
  }
  return result;
}

Complex inner(const CVector& f, const CVector& g) {
  if (f.size() != g.size()) throw DimMismatch("inner: vector lengths differ");
  return kernels::cdotc({f.data(), static_cast<std::size_t>(f.size())},
                        {g.data(), static_cast<std::size_t>(g.size())});
}

CVector apply(const CMatrix& a, const CVector& x) {
  if (a.cols() != x.size()) throw DimMismatch("apply: operator and vector sizes differ");
  CVector y(a.rows());
  kernels::cgemv(a.data(), static_cast<std::size_t>(a.rows()), static_cast<std::size_t>(a.cols()),
                 {x.data(), static_cast<std::size_t>(x.size())},
                 {y.data(), static_cast<std::size_t>(y.size())});
  return y;
}

CMatrix gram_of_columns(const CMatrix& vectors) {
  const Eigen::Index d = vectors.rows();
  CMatrix s = CMatrix::Zero(d, d);
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    kernels::gram_update({vectors.col(j).data(), static_cast<std::size_t>(d)}, s.data());
  }
  return s;
}

}  // namespace dynframe::linalg
