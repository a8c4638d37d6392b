#pragma once

// Commutants of operator tuples and intertwiners T with T xi = eta inside
// them: the computational witness that two frame vectors generate
// equivalent dynamical frames.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dynframe/dynamical.hpp"
#include "dynframe/frame.hpp"
#include "dynframe/linalg.hpp"

namespace dynframe::commutant {

/// Frobenius-orthonormal basis of {T : T X = X T for every X in the tuple}.
struct CommutantBasis {
  int dim = 0;
  std::vector<CMatrix> basis;

  std::size_t size() const { return basis.size(); }
  /// Columns are vec(B_m) (column-major), an orthonormal d^2 x r matrix.
  CMatrix stacked() const;
  /// sum_m c_m B_m
  CMatrix combine(const CVector& coeffs) const;
  /// Frobenius coordinates <T, B_m>.
  CVector coordinates(const CMatrix& t) const;
};

/// Nullspace (cutoff `tol`, relative) of T -> (X_i T - T X_i)_i written as a
/// stacked (k d^2) x d^2 Kronecker matrix. Each block is scaled by 1/|X_i|_F.
CommutantBasis commutant_basis(const std::vector<CMatrix>& algebra, double tol = linalg::kRankCutoff);
CommutantBasis commutant_basis(const dynamical::OperatorTuple& t, double tol = linalg::kRankCutoff);

/// max_i |T X_i - X_i T|_F / (|X_i|_F |T|_F)
double commutation_residual(const CMatrix& t, const std::vector<CMatrix>& algebra);

struct IntertwinerOptions {
  double residual = 1e-8;       // |T xi - eta| <= residual * |eta|
  double invertibility = 1e-8;  // sigma_min >= invertibility * sigma_max
};

struct Intertwiner {
  bool found = false;
  CMatrix matrix;
  CVector coefficients;  // in the commutant basis
  double vector_residual = 0.0;       // |T xi - eta| / |eta|
  double commutation_residual = 0.0;  // see commutation_residual()
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  bool invertible = false;
};

/// Solves for c minimizing |(sum c_m B_m) xi - eta|. Among minimizers the one
/// closest to the coordinates of the identity is taken, so eta = xi returns
/// T = I even when the commutant is larger than the orbit of xi. `found` is
/// false (NotFound) when the residual exceeds the tolerance.
Intertwiner intertwiner(const CommutantBasis& basis, const std::vector<CMatrix>& algebra, const CVector& xi,
                        const CVector& eta, const IntertwinerOptions& opts = {});
Intertwiner intertwiner(const dynamical::OperatorTuple& t, const CVector& xi, const CVector& eta,
                        const IntertwinerOptions& opts = {});

enum class Verdict { Equivalent, IntertwinedNotEquivalent, NotEquivalent };
std::string_view to_string(Verdict v);

struct EquivalenceReport {
  Verdict verdict = Verdict::NotEquivalent;
  Intertwiner witness;
  frame::EquivalenceResult frame_check;  // range-projector cross-check
  dynamical::OrbitDiagnosis xi_diagnosis;
  dynamical::OrbitDiagnosis eta_diagnosis;
};

/// Requires both orbits certified Frame on W (PreconditionFailed otherwise).
/// The intertwiner verdict must agree with frame::frames_equivalent on the two
/// orbit frames; disagreement raises InconsistentVerdicts.
EquivalenceReport are_equivalent_frame_vectors(const dynamical::OperatorTuple& t, const CVector& xi,
                                               const CVector& eta,
                                               std::shared_ptr<const semigroup::Window> w,
                                               const IntertwinerOptions& opts = {});
/// Same, reusing a precomputed commutant basis.
EquivalenceReport are_equivalent_frame_vectors(const dynamical::OperatorTuple& t, const CommutantBasis& basis,
                                               const CVector& xi, const CVector& eta,
                                               std::shared_ptr<const semigroup::Window> w,
                                               const IntertwinerOptions& opts = {});

// ---------------------------------------------------------------------------
// Centrality experiment

struct ExperimentConfig {
  int k = 1;                      // free generators
  std::vector<int> group_orders;  // empty: plain Z+^k
  int d_min = 2;
  int d_max = 6;
  dynamical::Scheme scheme = dynamical::Scheme::Poly;
  double rho_max = 0.9;
  int trials = 100;
  std::uint64_t seed = 1;
  int max_resamples = 50;  // per trial, for uncertified frame vectors
  int threads = 1;
};

struct TrialRecord {
  int trial = 0;
  std::uint64_t seed = 0;
  int d = 0;
  std::string window;
  int commutant_dim = 0;
  int resamples = 0;
  bool certified = false;
  Verdict verdict = Verdict::NotEquivalent;
  double vector_residual = 0.0;
  double commutation_residual = 0.0;
  double sigma_ratio = 0.0;
  double projector_distance = 0.0;
  double condition_xi = 0.0;
  double condition_eta = 0.0;
  std::string error;  // set when an exception interrupted the trial
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<TrialRecord> trials;
  int certified = 0;
  int equivalent = 0;
  double max_vector_residual = 0.0;
  double max_commutation_residual = 0.0;
  double min_sigma_ratio = 1.0;
  double worst_condition = 0.0;
  /// True when every certified pair was equivalent and every trial produced
  /// a certified pair.
  bool passed = false;
};

/// Per trial: sample a tuple and two frame vectors (resampling vectors until
/// both orbits are certified on an adaptively grown box window), then run
/// are_equivalent_frame_vectors. Trials run on `threads` workers with seeds
/// derived from config.seed, so the report does not depend on the thread
/// count.
ExperimentReport centrality_experiment(const ExperimentConfig& config);

}  // namespace dynframe::commutant
