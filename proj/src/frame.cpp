#include "dynframe/frame.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dynframe/error.hpp"
#include "dynframe/kernels.hpp"

namespace dynframe::frame {

Frame::Frame(CMatrix vectors, std::shared_ptr<const semigroup::Window> window)
    : vectors_(std::move(vectors)), window_(std::move(window)) {
  if (vectors_.rows() < 1 || vectors_.cols() < 1) throw InvalidArgument("frame needs dim >= 1 and at least one vector");
  linalg::require_finite(vectors_, "frame vectors");
  if (window_ && window_->size() != static_cast<std::size_t>(vectors_.cols())) {
    throw IndexMismatch("frame vector count does not match its window");
  }
}

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::Frame:
      return "Frame";
    case Classification::Parseval:
      return "Parseval";
    case Classification::BesselOnly:
      return "BesselOnly";
    case Classification::Incomplete:
      return "Incomplete";
  }
  return "?";
}

CMatrix analysis_matrix(const Frame& f) { return f.vectors().adjoint(); }

CMatrix synthesis_matrix(const Frame& f) { return f.vectors(); }

CMatrix frame_operator(const Frame& f) {
  const CMatrix theta = analysis_matrix(f);
  return theta.adjoint() * theta;
}

CMatrix frame_operator_by_sum(const Frame& f) { return linalg::gram_of_columns(f.vectors()); }

FrameReport frame_bounds(const Frame& f, const Tolerances& tol) {
  FrameReport r;
  const auto eig = linalg::eig_hermitian(frame_operator(f));
  r.bounds.lower = std::max(0.0, eig.eigenvalues(0));
  r.bounds.upper = std::max(r.bounds.lower, eig.eigenvalues(eig.eigenvalues.size() - 1));
  r.rank = linalg::numerical_rank(analysis_matrix(f), tol.rank_cutoff);

  const bool complete = f.size() >= f.dim() && r.rank == f.dim();
  const bool bounded_below = r.bounds.lower > tol.frame_ratio * r.bounds.upper;
  r.condition = bounded_below ? r.bounds.upper / r.bounds.lower : std::numeric_limits<double>::infinity();
  if (!complete) {
    r.classification = Classification::Incomplete;
  } else if (!bounded_below) {
    r.classification = Classification::BesselOnly;
  } else if (std::abs(r.bounds.lower - 1.0) <= tol.parseval && std::abs(r.bounds.upper - 1.0) <= tol.parseval) {
    r.classification = Classification::Parseval;
  } else {
    r.classification = Classification::Frame;
  }
  return r;
}

namespace {

Eigen::LLT<CMatrix> require_frame_factor(const Frame& f) {
  const FrameReport rep = frame_bounds(f);
  if (!rep.is_frame()) {
    throw NotAFrame(std::string("family is not a frame (classified ") + std::string(to_string(rep.classification)) + ")");
  }
  Eigen::LLT<CMatrix> llt(frame_operator(f));
  if (llt.info() != Eigen::Success) throw NotAFrame("frame operator is not numerically positive definite");
  return llt;
}

}  // namespace

Frame canonical_dual(const Frame& f) {
  const auto llt = require_frame_factor(f);
  return Frame(llt.solve(f.vectors()), f.window());
}

Reconstruction reconstruct(const Frame& f, const CVector& coeffs, Method method, const IterativeOptions& opts) {
  if (coeffs.size() != f.size()) throw DimMismatch("coefficient count does not match the frame size");
  linalg::require_finite(coeffs, "coefficients");
  const CVector rhs = synthesis_matrix(f) * coeffs;  // Theta^* c

  if (method == Method::DirectDual) {
    const auto llt = require_frame_factor(f);
    // Two rounds of refinement on the coefficient residual recover the
    // accuracy the normal equations lose on ill-conditioned frames.
    CVector x = llt.solve(rhs);
    const CMatrix theta = analysis_matrix(f);
    for (int round = 0; round < 2; ++round) x += llt.solve(synthesis_matrix(f) * (coeffs - theta * x));
    return Reconstruction{x, 0};
  }

  const FrameReport rep = frame_bounds(f);
  if (!rep.is_frame()) throw NotAFrame("iterative reconstruction needs a frame");
  const double relax = 2.0 / (rep.bounds.lower + rep.bounds.upper);
  const CMatrix s = frame_operator(f);
  const auto d = static_cast<std::size_t>(f.dim());

  CVector x = CVector::Zero(f.dim());
  CVector sx(f.dim());
  for (int it = 1; it <= opts.max_iterations; ++it) {
    kernels::cgemv(s.data(), d, d, {x.data(), d}, {sx.data(), d});
    const CVector step = relax * (rhs - sx);
    x += step;
    if (step.norm() <= opts.relative_update * x.norm()) return Reconstruction{x, it};
  }
  throw NonConvergence("frame algorithm hit the iteration limit; frame bounds may be poorly estimated");
}

CMatrix range_basis(const Frame& f) {
  const auto llt = require_frame_factor(f);
  // Q^* = L^{-1} Theta^*
  const CMatrix q = llt.matrixL().solve(synthesis_matrix(f)).adjoint();
  // Second Cholesky pass on Q^* Q restores orthonormality lost to cond(S).
  Eigen::LLT<CMatrix> again(q.adjoint() * q);
  if (again.info() != Eigen::Success) throw NotAFrame("range basis lost rank");
  return again.matrixU().solve<Eigen::OnTheRight>(q);
}

CMatrix range_projector(const Frame& f) {
  const CMatrix q = range_basis(f);
  return q * q.adjoint();
}

double range_distance(const CMatrix& analysis_f, const CMatrix& analysis_g, double rank_cutoff) {
  const CMatrix qf = linalg::orthonormal_range(analysis_f, rank_cutoff);
  const CMatrix qg = linalg::orthonormal_range(analysis_g, rank_cutoff);
  if (qf.cols() != qg.cols()) return 1.0;
  return std::sin(linalg::max_principal_angle(qf, qg));
}

EquivalenceResult frames_equivalent(const Frame& f, const Frame& g, const EquivalenceOptions& opts) {
  if (f.size() != g.size()) throw IndexMismatch("frames are indexed by sets of different sizes");
  if (f.window() && g.window() && f.window() != g.window() &&
      f.window()->elements() != g.window()->elements()) {
    throw IndexMismatch("frames are indexed by different windows");
  }
  EquivalenceResult r;

  // Operator route: T F = G  <=>  F^* T^* = G^*.
  const auto ls = linalg::lstsq(f.vectors().adjoint(), g.vectors().adjoint());
  r.witness = ls.solution.adjoint();
  const double gnorm = g.vectors().norm();
  r.operator_residual = gnorm > 0.0 ? ls.residual_norm / gnorm : ls.residual_norm;
  const RVector sv = linalg::singular_values(r.witness);
  if (g.dim() >= f.dim() && sv.size() == f.dim() && sv(0) > 0.0) {
    r.sigma_ratio = sv(sv.size() - 1) / sv(0);
  }
  r.operator_verdict = r.operator_residual <= opts.residual && r.sigma_ratio >= opts.invertibility;

  // Projector route.
  r.projector_distance = range_distance(analysis_matrix(f), analysis_matrix(g), opts.rank_cutoff);
  r.projector_verdict = r.projector_distance <= opts.projector;

  if (r.operator_verdict != r.projector_verdict) {
    throw InconsistentVerdicts("operator route says " + std::string(r.operator_verdict ? "equivalent" : "inequivalent") +
                               " (residual " + std::to_string(r.operator_residual) + ", sigma ratio " +
                               std::to_string(r.sigma_ratio) + ") but projector distance is " +
                               std::to_string(r.projector_distance));
  }
  r.equivalent = r.operator_verdict;
  return r;
}

}  // namespace dynframe::frame
