#pragma once

// Dense complex linear algebra shared by every other module.
//
// Conventions:
//  * <f, g> = sum_i f_i conj(g_i), linear in the first slot.
//  * All tolerances are relative to a norm of the input.
//  * Decompositions are backed by Eigen; the hot inner loops (matvec, Gram
//    accumulation, inner products) go through dynframe::kernels.

#include <Eigen/Dense>
#include <complex>
#include <cstdint>

namespace dynframe {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

namespace linalg {

inline constexpr double kRankCutoff = 1e-10;
inline constexpr double kLstsqCutoff = 1e-12;

struct SvdResult {
  RVector singular_values;  // descending
  CMatrix u;                // rows x p, p = min(rows, cols)
  CMatrix v;                // cols x p

  /// Count of singular values strictly above rel_cutoff * sigma_1.
  int rank(double rel_cutoff = kRankCutoff) const;
};

/// Thin SVD. Real input is routed through the real decomposition.
SvdResult svd(const CMatrix& m);

/// Singular values only, descending.
RVector singular_values(const CMatrix& m);

/// Orthonormal basis of {x : sigma-weighted |Mx| <= tol * sigma_1}, i.e. the
/// right singular vectors whose singular value is at most tol * sigma_1
/// (missing singular values of a wide matrix count as zero).
CMatrix nullspace(const CMatrix& m, double tol = kRankCutoff);

struct LstsqResult {
  CMatrix solution;
  double residual_norm = 0.0;  // Frobenius norm of M X - B
  int rank = 0;
};

/// Minimum-norm least-squares solution through the SVD pseudo-inverse.
LstsqResult lstsq(const CMatrix& m, const CMatrix& b, double cutoff = kLstsqCutoff);

CMatrix pinv(const CMatrix& m, double cutoff = kLstsqCutoff);

struct HermitianEig {
  RVector eigenvalues;  // ascending
  CMatrix eigenvectors;
};

/// Throws NotHermitian when |M - M^*|_F > 1e-10 |M|_F; otherwise decomposes
/// the symmetrized matrix.
HermitianEig eig_hermitian(const CMatrix& m);

/// max |lambda_i| from the general eigenvalue problem.
double spectral_radius(const CMatrix& m);

/// Largest singular value.
double spectral_norm(const CMatrix& m);

int numerical_rank(const CMatrix& m, double tol = kRankCutoff);

/// Orthonormal basis (left singular vectors) of range(M) at the given cutoff.
CMatrix orthonormal_range(const CMatrix& m, double tol = kRankCutoff);

/// Largest principal angle between the column spans of two matrices with
/// orthonormal columns, computed from sines (|(I - A A^*) B|) so that small
/// angles keep full relative precision. Returns pi/2 if the spans have
/// different dimensions.
double max_principal_angle(const CMatrix& qa, const CMatrix& qb);

/// Same, for arbitrary spanning sets; ranges are extracted at tol first.
double max_principal_angle_of_spans(const CMatrix& a, const CMatrix& b, double tol = kRankCutoff);

bool all_finite(const CMatrix& m);

/// Throws InvalidArgument naming `what` if any entry is NaN or infinite.
void require_finite(const CMatrix& m, const char* what);

/// M^n by repeated squaring.
CMatrix matrix_power(const CMatrix& m, std::uint64_t n);

/// <f, g>
Complex inner(const CVector& f, const CVector& g);

/// A x through the dispatched kernel.
CVector apply(const CMatrix& a, const CVector& x);

/// sum_j c_j c_j^* over the columns of `vectors`, accumulated column by column
/// with the dispatched rank-one kernel. Independent of the GEMM route V V^*.
CMatrix gram_of_columns(const CMatrix& vectors);

}  // namespace linalg
}  // namespace dynframe
