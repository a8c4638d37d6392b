#pragma once

// Representations of Z+^k (optionally times a finite abelian group, or of a
// numerical semigroup) on C^d, their orbit frames, and the frame/Bessel
// classification of an orbit with a tail estimate for the truncation.

#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

#include "dynframe/frame.hpp"
#include "dynframe/linalg.hpp"
#include "dynframe/semigroup.hpp"

namespace dynframe::dynamical {

struct GroupGenerator {
  int order = 0;
  CMatrix matrix;
};

struct TupleTolerances {
  double commutation = 1e-10;  // |XY - YX|_F <= commutation * |X|_F |Y|_F
  double group_order = 1e-10;  // max |(U^N - I)_ij|
};

/// A commuting tuple (A_1..A_k) with optional finite-order unitaries
/// U_1..U_l. The represented semigroup is
///   Z+^k                      (no unitaries, no numerical generators)
///   Z_{N_1..N_l} x Z+^k       (unitaries present; group coordinates first)
///   <g_1..g_m> via n -> A^n   (numerical generators, k = 1)
class OperatorTuple {
 public:
  /// Throws CommutationViolated when the tuple does not commute, and
  /// InvalidArgument for shape errors or unitaries of the wrong order.
  explicit OperatorTuple(std::vector<CMatrix> operators, std::vector<GroupGenerator> group = {},
                         std::vector<int> numerical_generators = {}, const TupleTolerances& tol = {});

  int dim() const { return dim_; }
  const std::vector<CMatrix>& operators() const { return operators_; }
  const std::vector<GroupGenerator>& group() const { return group_; }
  const std::vector<int>& numerical_generators() const { return numerical_; }
  const semigroup::Descriptor& descriptor() const { return *descriptor_; }

  /// pi(g) for each element of semigroup::generators(descriptor()).
  const std::vector<CMatrix>& generator_matrices() const { return generator_matrices_; }

  /// Every matrix the commutant must commute with: all A_i, then all U_j.
  std::vector<CMatrix> algebra_generators() const;

  /// Indices into generator_matrices() of the free (unbounded) directions.
  const std::vector<std::size_t>& free_generators() const { return free_generators_; }

  /// The adjoint tuple (A_1^*, ..., U_1^*, ...), same semigroup.
  OperatorTuple adjoint() const;

 private:
  int dim_ = 0;
  std::vector<CMatrix> operators_;
  std::vector<GroupGenerator> group_;
  std::vector<int> numerical_;
  std::shared_ptr<const semigroup::Descriptor> descriptor_;
  std::vector<CMatrix> generator_matrices_;
  std::vector<std::size_t> free_generators_;
};

/// pi(n) x, each generator power by repeated squaring.
CVector rep_apply(const OperatorTuple& t, const semigroup::Element& n, const CVector& x);

/// {pi(n) xi}_{n in W}, built along the lower set: f_n = pi(g) f_v for the
/// decomposition n = g v of semigroup::predecessor. Throws InvalidArgument for
/// xi = 0 or a window over a different semigroup.
frame::Frame orbit_frame(const OperatorTuple& t, const CVector& xi,
                         std::shared_ptr<const semigroup::Window> w);

struct TailEstimate {
  double tau = 0.0;  // estimate of sum_{n not in W} |pi(n) xi|^2; +inf when not certified
  bool certified = false;
  /// Per free direction: the contraction factor q used for the geometric
  /// continuation, max(rho(A_i)^2, squared growth ratios over the last five
  /// window shells).
  std::vector<double> contraction;
  std::vector<double> spectral_radii;  // rho(A_i) per free direction
  /// Smallest squared shell growth ratio seen per free direction (divergence evidence).
  std::vector<double> min_shell_ratio;
  std::string note;
};

/// Tail estimate for the orbit outside W. Supports box and total-degree
/// windows over Z+^k and Z_N x Z+^k, cap windows over numerical semigroups,
/// and finite groups (tail 0). `orbit` must be orbit_frame(t, xi, w).
TailEstimate tail_mass(const OperatorTuple& t, const frame::Frame& orbit);
TailEstimate tail_mass(const OperatorTuple& t, const CVector& xi, std::shared_ptr<const semigroup::Window> w);

enum class OrbitClass { Frame, BesselNotComplete, NotBessel, Undecided };
std::string_view to_string(OrbitClass c);

struct OrbitDiagnosis {
  OrbitClass classification = OrbitClass::Undecided;
  frame::FrameReport truncated;  // bounds of the windowed family
  double lower_bound = 0.0;      // certified enclosure of the full-orbit bounds
  double upper_bound = 0.0;
  TailEstimate tail;
  int krylov_rank = 0;

  bool is_frame() const { return classification == OrbitClass::Frame; }
};

OrbitDiagnosis classify_orbit(const OperatorTuple& t, const frame::Frame& orbit);
OrbitDiagnosis classify_orbit(const OperatorTuple& t, const CVector& xi, std::shared_ptr<const semigroup::Window> w);

enum class Scheme { Poly, Triangular, Diagonal };
std::string_view to_string(Scheme s);
Scheme parse_scheme(std::string_view text);

/// Random commuting k-tuple on C^d with rho(A_i) <= rho_max, deterministic
/// per seed.
///   Poly:       A_i = p_i(B), B Gaussian, deg p_i <= d - 1
///   Triangular: A_i = Q p_i(R) Q^*, R random upper triangular, Q Haar unitary
///   Diagonal:   A_i = diag(z), z uniform in rho_max * disk
OperatorTuple random_commuting_tuple(int d, int k, double rho_max, Scheme scheme, std::uint64_t seed);

/// Hybrid tuple for Z_{orders} x Z+^m: unitaries U_j = Q diag(roots of unity) Q^*
/// and free operators that are block-diagonal on the joint eigenspaces of the
/// U_j (blocks built with the given scheme, Triangular treated as Poly).
OperatorTuple random_hybrid_tuple(int d, const std::vector<int>& orders, int m, double rho_max, Scheme scheme,
                                  std::uint64_t seed);

}  // namespace dynframe::dynamical
