#pragma once

// The range of the analysis operator inside l^2(W), its compressions of the
// truncated left regular representation, and truncated convolution /
// multiplication operators on lower-set windows.
//
// Range projectors are never formed for the checks: everything is expressed
// through an orthonormal basis Q of range(Theta), P = Q Q^*.

#include <memory>
#include <vector>

#include "dynframe/dynamical.hpp"
#include "dynframe/frame.hpp"
#include "dynframe/semigroup.hpp"

namespace dynframe::model_space {

/// Factor c in the truncation budget c * sqrt(tau) + 1e-8.
inline constexpr double kBudgetFactor = 10.0;
inline constexpr double kBudgetFloor = 1e-8;
inline constexpr double kExactTolerance = 1e-10;

struct Check {
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct ModelSpace {
  std::shared_ptr<const semigroup::Window> window;
  frame::Frame orbit;
  dynamical::OrbitDiagnosis diagnosis;
  CMatrix theta;  // |W| x d, (Theta x)_n = <x, pi(n) xi>
  CMatrix basis;  // |W| x d orthonormal, range(Theta) = range(basis)
  double tau = 0.0;
  /// basis^* lambda(g) basis for g in semigroup::generators(descriptor), i.e.
  /// lambda_P(g) in the coordinates of `basis`.
  std::vector<CMatrix> compressions;

  std::size_t rank() const { return static_cast<std::size_t>(basis.cols()); }
  /// P = Theta S^-1 Theta^*, materialized.
  CMatrix projector() const;
  double budget() const;  // kBudgetFactor * sqrt(tau) + kBudgetFloor
};

/// Throws NotCertified unless classify_orbit returns Frame on W.
ModelSpace build_model_space(const dynamical::OperatorTuple& t, const CVector& xi,
                             std::shared_ptr<const semigroup::Window> w);

/// lambda(s) y and lambda(s)^* y on l^2(W) for the columns of y, without
/// forming the |W| x |W| matrices.
CMatrix shift(const semigroup::Window& w, const semigroup::Element& s, const CMatrix& y);
CMatrix shift_adjoint(const semigroup::Window& w, const semigroup::Element& s, const CMatrix& y);

struct IntertwiningCheck {
  /// Rows v with s v in W; the identity holds there exactly.
  Check interior;
  /// All rows. Rows with s v outside W carry at most the tail, so the
  /// tolerance is kExactTolerance + sqrt(tau).
  Check full;
};

/// |lambda(s)^* Theta - Theta pi(s)^*|_2 (the worst unit x), scaled by
/// max(1, |Theta|_2 |pi(s)|_2).
IntertwiningCheck check_intertwining(const ModelSpace& m, const dynamical::OperatorTuple& t,
                                     const semigroup::Element& s);

/// |P lambda(s) - P lambda(s) P|_2 = |(I - P) lambda(s)^* Q|_2 for an
/// orthonormal Q with P = Q Q^*.
double coinvariance_residual(const CMatrix& q, const semigroup::Window& w, const semigroup::Element& s);
Check check_coinvariance(const ModelSpace& m, const semigroup::Element& s);

/// max over m in W of coinvariance_residual(q, w, m): the truncated commutant
/// of the shifts is spanned by the convolutions lambda_W(m).
struct CohyperCheck {
  Check check;
  std::size_t worst = 0;          // window position of the worst element
  std::vector<double> residuals;  // per window element
};
CohyperCheck cohyperinvariance(const CMatrix& q, const semigroup::Window& w, double tolerance);
CohyperCheck check_cohyperinvariance(const ModelSpace& m);

/// Orthonormal basis of a uniformly random rank-r subspace of l^2(W).
CMatrix random_subspace(std::size_t size, Eigen::Index rank, std::uint64_t seed);

/// {Q^* lambda(n) Q phi}_{n in W}, phi in range coordinates.
frame::Frame compressed_orbit(const ModelSpace& m, const CVector& phi);
/// phi = Q^* delta_e, giving the model frame {lambda_P(n) P delta_e}.
frame::Frame model_frame(const ModelSpace& m);
/// frames_equivalent(orbit, model_frame).
frame::EquivalenceResult model_frame_equivalence(const ModelSpace& m);
/// A unit eigenvector of the first free compression. Its compressed orbit
/// spans a line, so it cannot generate a frame equivalent to the orbit when
/// d > 1.
CVector noncyclic_vector(const ModelSpace& m, const dynamical::OperatorTuple& t);

/// Sum_{j in W} p_j lambda_W(j): entry (n, m) = p_j when n = j m.
CMatrix truncated_convolution(const CVector& p, const semigroup::Window& w);
/// lambda_W(g) for every generator g of the window's semigroup.
std::vector<CMatrix> truncated_shifts(const semigroup::Window& w);

struct PolySymbol {
  std::shared_ptr<const semigroup::Window> window;  // lower set of Z+^k
  CVector coeffs;                                   // in window order

  std::size_t arity() const;
  int degree() const;  // largest total degree with a nonzero coefficient, -1 for 0
};

/// z_1^{e_1} ... z_k^{e_k} on a window large enough to hold it.
PolySymbol monomial(const semigroup::Element& exponent, Complex c = 1.0);

/// Compression of multiplication by phi to l^2(W) (basis z^n, n in W).
CMatrix multiplication_operator(const PolySymbol& phi, const semigroup::Window& w);

/// Degree-j homogeneous part scaled by (n + 1 - j) / (n + 1), zero for j > n.
PolySymbol fejer_average(const PolySymbol& phi, int n);

/// The same spec with every cap doubled.
semigroup::WindowSpec dilate(const semigroup::WindowSpec& spec);

}  // namespace dynframe::model_space
