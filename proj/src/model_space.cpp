#include "dynframe/model_space.hpp"

#include <algorithm>
#include <cmath>

#include "dynframe/error.hpp"
#include "dynframe/random.hpp"

namespace dynframe::model_space {

using semigroup::Element;
using semigroup::Window;

namespace {

// target[t] = position of s * w[t] in W, or -1.
std::vector<std::ptrdiff_t> shift_table(const Window& w, const Element& s) {
  semigroup::require_valid(w.descriptor(), s);
  std::vector<std::ptrdiff_t> out(w.size(), -1);
  for (std::size_t t = 0; t < w.size(); ++t) {
    if (auto p = w.index_of(semigroup::mult(w.descriptor(), s, w[t]))) out[t] = static_cast<std::ptrdiff_t>(*p);
  }
  return out;
}

Check make_check(double residual, double tolerance) { return {residual, tolerance, residual <= tolerance}; }

}  // namespace

CMatrix ModelSpace::projector() const { return frame::range_projector(orbit); }

double ModelSpace::budget() const { return kBudgetFactor * std::sqrt(tau) + kBudgetFloor; }

ModelSpace build_model_space(const dynamical::OperatorTuple& t, const CVector& xi,
                             std::shared_ptr<const Window> w) {
  frame::Frame orbit = dynamical::orbit_frame(t, xi, w);
  dynamical::OrbitDiagnosis diag = dynamical::classify_orbit(t, orbit);
  if (!diag.is_frame()) {
    throw NotCertified("orbit is not a certified frame on " + w->spec().to_string() + " (" +
                       std::string(dynamical::to_string(diag.classification)) + ")");
  }
  CMatrix theta = frame::analysis_matrix(orbit);
  CMatrix q = frame::range_basis(orbit);
  std::vector<CMatrix> comp;
  for (const Element& g : semigroup::generators(w->descriptor())) comp.push_back(q.adjoint() * shift(*w, g, q));
  const double tau = diag.tail.tau;
  return ModelSpace{std::move(w), std::move(orbit), std::move(diag), std::move(theta), std::move(q), tau,
                    std::move(comp)};
}

CMatrix shift(const Window& w, const Element& s, const CMatrix& y) {
  if (static_cast<std::size_t>(y.rows()) != w.size()) throw DimMismatch("shift: row count differs from |W|");
  const auto table = shift_table(w, s);
  CMatrix out = CMatrix::Zero(y.rows(), y.cols());
  for (std::size_t t = 0; t < table.size(); ++t) {
    if (table[t] >= 0) out.row(table[t]) = y.row(static_cast<Eigen::Index>(t));
  }
  return out;
}

CMatrix shift_adjoint(const Window& w, const Element& s, const CMatrix& y) {
  if (static_cast<std::size_t>(y.rows()) != w.size()) throw DimMismatch("shift_adjoint: row count differs from |W|");
  const auto table = shift_table(w, s);
  CMatrix out = CMatrix::Zero(y.rows(), y.cols());
  for (std::size_t v = 0; v < table.size(); ++v) {
    if (table[v] >= 0) out.row(static_cast<Eigen::Index>(v)) = y.row(table[v]);
  }
  return out;
}

IntertwiningCheck check_intertwining(const ModelSpace& m, const dynamical::OperatorTuple& t, const Element& s) {
  const Window& w = *m.window;
  CMatrix pi_s(t.dim(), t.dim());
  for (int j = 0; j < t.dim(); ++j) pi_s.col(j) = dynamical::rep_apply(t, s, CVector::Unit(t.dim(), j));
  const CMatrix diff = shift_adjoint(w, s, m.theta) - m.theta * pi_s.adjoint();
  const auto table = shift_table(w, s);
  CMatrix inner = diff;
  for (std::size_t v = 0; v < table.size(); ++v) {
    if (table[v] < 0) inner.row(static_cast<Eigen::Index>(v)).setZero();
  }
  const double scale = std::max(1.0, linalg::spectral_norm(m.theta) * linalg::spectral_norm(pi_s));
  IntertwiningCheck out;
  out.interior = make_check(linalg::spectral_norm(inner), kExactTolerance * scale);
  out.full = make_check(linalg::spectral_norm(diff), kExactTolerance * scale + std::sqrt(m.tau));
  return out;
}

double coinvariance_residual(const CMatrix& q, const Window& w, const Element& s) {
  const CMatrix y = shift_adjoint(w, s, q);
  return linalg::spectral_norm(y - q * (q.adjoint() * y));
}

Check check_coinvariance(const ModelSpace& m, const Element& s) {
  return make_check(coinvariance_residual(m.basis, *m.window, s), m.budget());
}

CohyperCheck cohyperinvariance(const CMatrix& q, const Window& w, double tolerance) {
  CohyperCheck out;
  out.residuals.reserve(w.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double r = coinvariance_residual(q, w, w[i]);
    out.residuals.push_back(r);
    if (r > worst) {
      worst = r;
      out.worst = i;
    }
  }
  out.check = make_check(worst, tolerance);
  return out;
}

CohyperCheck check_cohyperinvariance(const ModelSpace& m) {
  return cohyperinvariance(m.basis, *m.window, m.budget());
}

CMatrix random_subspace(std::size_t size, Eigen::Index rank, std::uint64_t seed) {
  if (rank < 1 || static_cast<std::size_t>(rank) > size) throw InvalidArgument("random_subspace: bad rank");
  Rng rng(seed);
  const CMatrix g = rng.gaussian_matrix(static_cast<Eigen::Index>(size), rank);
  Eigen::HouseholderQR<CMatrix> qr(g);
  return qr.householderQ() * CMatrix::Identity(static_cast<Eigen::Index>(size), rank);
}

frame::Frame compressed_orbit(const ModelSpace& m, const CVector& phi) {
  if (phi.size() != m.basis.cols()) throw DimMismatch("compressed_orbit: phi must live in range coordinates");
  const Window& w = *m.window;
  const CVector y = m.basis * phi;
  CMatrix vectors(m.basis.cols(), static_cast<Eigen::Index>(w.size()));
  for (std::size_t n = 0; n < w.size(); ++n) {
    vectors.col(static_cast<Eigen::Index>(n)) = m.basis.adjoint() * shift(w, w[n], y);
  }
  return frame::Frame(std::move(vectors), m.window);
}

frame::Frame model_frame(const ModelSpace& m) {
  // Q^* delta_e: the identity sits at position 0 of every window.
  const CVector phi = m.basis.row(0).adjoint();
  return compressed_orbit(m, phi);
}

frame::EquivalenceResult model_frame_equivalence(const ModelSpace& m) {
  return frame::frames_equivalent(m.orbit, model_frame(m));
}

CVector noncyclic_vector(const ModelSpace& m, const dynamical::OperatorTuple& t) {
  if (t.free_generators().empty()) throw InvalidArgument("noncyclic_vector needs a free direction");
  const CMatrix& c = m.compressions[t.free_generators().front()];
  Eigen::ComplexEigenSolver<CMatrix> es(c);
  if (es.info() != Eigen::Success) throw NonConvergence("eigen decomposition of a compression failed");
  CVector v = es.eigenvectors().col(0);
  return v / v.norm();
}

CMatrix truncated_convolution(const CVector& p, const Window& w) {
  if (static_cast<std::size_t>(p.size()) != w.size()) throw DimMismatch("convolution coefficients must match |W|");
  const auto n = static_cast<Eigen::Index>(w.size());
  CMatrix out = CMatrix::Zero(n, n);
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (p(static_cast<Eigen::Index>(j)) == Complex(0.0)) continue;
    const auto table = shift_table(w, w[j]);
    for (std::size_t col = 0; col < table.size(); ++col) {
      if (table[col] >= 0) out(table[col], static_cast<Eigen::Index>(col)) += p(static_cast<Eigen::Index>(j));
    }
  }
  return out;
}

std::vector<CMatrix> truncated_shifts(const Window& w) {
  std::vector<CMatrix> out;
  for (const Element& g : semigroup::generators(w.descriptor())) out.push_back(semigroup::left_regular_matrix(g, w));
  return out;
}

// ---------------------------------------------------------------------------
// Polynomial symbols

std::size_t PolySymbol::arity() const { return static_cast<std::size_t>(window->descriptor().arity()); }

int PolySymbol::degree() const {
  int deg = -1;
  for (std::size_t i = 0; i < window->size(); ++i) {
    if (coeffs(static_cast<Eigen::Index>(i)) == Complex(0.0)) continue;
    std::int64_t s = 0;
    for (auto c : (*window)[i]) s += c;
    deg = std::max(deg, static_cast<int>(s));
  }
  return deg;
}

namespace {

void require_free(const semigroup::Descriptor& d, const char* what) {
  if (d.kind() != semigroup::Descriptor::Kind::FreeAbelian) {
    throw InvalidArgument(std::string(what) + " needs a window over Z+^k");
  }
}

std::int64_t total_degree(const Element& e) {
  std::int64_t s = 0;
  for (auto c : e) s += c;
  return s;
}

}  // namespace

PolySymbol monomial(const Element& exponent, Complex c) {
  if (exponent.empty()) throw InvalidArgument("monomial needs at least one variable");
  for (auto e : exponent) {
    if (e < 0) throw InvalidArgument("monomial exponents must be nonnegative");
  }
  const auto d = semigroup::Descriptor::free_abelian(static_cast<int>(exponent.size()));
  auto w = std::make_shared<const Window>(
      Window::enumerate(d, semigroup::WindowSpec::total_degree(static_cast<int>(total_degree(exponent)))));
  CVector coeffs = CVector::Zero(static_cast<Eigen::Index>(w->size()));
  coeffs(static_cast<Eigen::Index>(*w->index_of(exponent))) = c;
  return PolySymbol{std::move(w), std::move(coeffs)};
}

CMatrix multiplication_operator(const PolySymbol& phi, const Window& w) {
  require_free(w.descriptor(), "multiplication_operator");
  if (!(phi.window->descriptor() == w.descriptor())) {
    throw InvalidArgument("symbol and window have different numbers of variables");
  }
  const auto n = static_cast<Eigen::Index>(w.size());
  CMatrix out = CMatrix::Zero(n, n);
  for (std::size_t j = 0; j < phi.window->size(); ++j) {
    const Complex c = phi.coeffs(static_cast<Eigen::Index>(j));
    if (c == Complex(0.0)) continue;
    const auto table = shift_table(w, (*phi.window)[j]);
    for (std::size_t col = 0; col < table.size(); ++col) {
      if (table[col] >= 0) out(table[col], static_cast<Eigen::Index>(col)) += c;
    }
  }
  return out;
}

PolySymbol fejer_average(const PolySymbol& phi, int n) {
  if (n < 0) throw InvalidArgument("Fejer order must be >= 0");
  require_free(phi.window->descriptor(), "fejer_average");
  PolySymbol out{phi.window, phi.coeffs};
  for (std::size_t i = 0; i < phi.window->size(); ++i) {
    const std::int64_t j = total_degree((*phi.window)[i]);
    const double factor = j > n ? 0.0 : static_cast<double>(n + 1 - j) / static_cast<double>(n + 1);
    out.coeffs(static_cast<Eigen::Index>(i)) *= factor;
  }
  return out;
}

semigroup::WindowSpec dilate(const semigroup::WindowSpec& spec) {
  semigroup::WindowSpec out = spec;
  for (int& c : out.caps) c *= 2;
  return out;
}

}  // namespace dynframe::model_space
