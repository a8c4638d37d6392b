#pragma once

// Finite frames: analysis/synthesis/frame operators, bounds, canonical duals,
// reconstruction, range projectors and the equivalence test.
//
// A Frame stores its vectors as the columns of a d x n matrix. When the index
// set is a semigroup window the frame keeps a handle to it so that
// equivalence checks can insist on identical indexing.

#include <memory>
#include <string_view>

#include "dynframe/linalg.hpp"
#include "dynframe/semigroup.hpp"

namespace dynframe::frame {

class Frame {
 public:
  explicit Frame(CMatrix vectors, std::shared_ptr<const semigroup::Window> window = nullptr);

  Eigen::Index dim() const { return vectors_.rows(); }
  Eigen::Index size() const { return vectors_.cols(); }
  const CMatrix& vectors() const { return vectors_; }
  auto vector(Eigen::Index i) const { return vectors_.col(i); }
  const std::shared_ptr<const semigroup::Window>& window() const { return window_; }

 private:
  CMatrix vectors_;
  std::shared_ptr<const semigroup::Window> window_;
};

enum class Classification { Frame, Parseval, BesselOnly, Incomplete };
std::string_view to_string(Classification c);

struct FrameBounds {
  double lower = 0.0;
  double upper = 0.0;
};

struct FrameReport {
  FrameBounds bounds;
  Classification classification = Classification::Incomplete;
  double condition = 0.0;  // upper / lower, +inf when lower is numerically zero
  int rank = 0;            // numerical rank of the analysis operator

  bool is_frame() const {
    return classification == Classification::Frame || classification == Classification::Parseval;
  }
};

struct Tolerances {
  double rank_cutoff = linalg::kRankCutoff;  // relative, on singular values of the analysis operator
  // C1 > frame_ratio * C2. The square of the rank cutoff, so a family is a
  // frame exactly when its analysis operator has full column rank.
  double frame_ratio = 1e-20;
  double parseval = 1e-10;                   // |C1 - 1|, |C2 - 1|
};

/// |W| x d matrix with rows conj(f_w), so (Theta x)_w = <x, f_w>.
CMatrix analysis_matrix(const Frame& f);
/// d x |W| synthesis operator Theta^*.
CMatrix synthesis_matrix(const Frame& f);

/// S = Theta^* Theta.
CMatrix frame_operator(const Frame& f);
/// S = sum_w f_w f_w^*, accumulated one rank-one update at a time. Used as an
/// independent route to cross-check frame_operator.
CMatrix frame_operator_by_sum(const Frame& f);

FrameReport frame_bounds(const Frame& f, const Tolerances& tol = {});

/// {S^-1 f_w}. Throws NotAFrame unless frame_bounds classifies f as a frame.
Frame canonical_dual(const Frame& f);

enum class Method { DirectDual, Iterative };

struct IterativeOptions {
  double relative_update = 1e-12;
  int max_iterations = 10000;
};

struct Reconstruction {
  CVector x;
  int iterations = 0;  // 0 for the direct method
};

/// Recover x from coefficients c_w = <x, f_w>. The iterative method is the
/// frame algorithm x <- x + 2/(C1+C2) Theta^*(c - Theta x) started at 0.
/// Throws NotAFrame, or NonConvergence when the iteration budget runs out.
Reconstruction reconstruct(const Frame& f, const CVector& coeffs, Method method,
                           const IterativeOptions& opts = {});

/// Orthonormal basis Q = Theta L^{-*} of range(Theta), S = L L^*. Then
/// Q Q^* = Theta S^-1 Theta^* is the range projector. Throws NotAFrame.
CMatrix range_basis(const Frame& f);

/// P = Theta S^-1 Theta^*, |W| x |W|.
CMatrix range_projector(const Frame& f);

struct EquivalenceOptions {
  double residual = 1e-8;       // |T F - G|_F <= residual * |G|_F
  double invertibility = 1e-8;  // sigma_min(T) >= invertibility * sigma_max(T)
  double projector = 1e-8;      // |P_F - P_G|_2
  double rank_cutoff = linalg::kRankCutoff;
};

struct EquivalenceResult {
  bool equivalent = false;
  // Operator route: least-squares T with T f_w = g_w.
  bool operator_verdict = false;
  CMatrix witness;  // d_G x d_F
  double operator_residual = 0.0;  // relative
  double sigma_ratio = 0.0;
  // Projector route: spectral distance between analysis ranges.
  bool projector_verdict = false;
  double projector_distance = 0.0;
};

/// Runs both routes. Throws IndexMismatch when the index sets differ and
/// InconsistentVerdicts when the routes disagree.
EquivalenceResult frames_equivalent(const Frame& f, const Frame& g, const EquivalenceOptions& opts = {});

/// |P_F - P_G|_2 from the analysis ranges, via principal angles. 1 when the
/// ranks differ.
double range_distance(const CMatrix& analysis_f, const CMatrix& analysis_g,
                      double rank_cutoff = linalg::kRankCutoff);

}  // namespace dynframe::frame
