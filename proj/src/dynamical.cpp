#include "dynframe/dynamical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "dynframe/error.hpp"
#include "dynframe/random.hpp"

namespace dynframe::dynamical {

using semigroup::Descriptor;
using semigroup::Element;
using semigroup::Window;
using semigroup::WindowSpec;

// ---------------------------------------------------------------------------
// OperatorTuple

OperatorTuple::OperatorTuple(std::vector<CMatrix> operators, std::vector<GroupGenerator> group,
                             std::vector<int> numerical_generators, const TupleTolerances& tol)
    : operators_(std::move(operators)), group_(std::move(group)), numerical_(std::move(numerical_generators)) {
  if (operators_.empty() && group_.empty()) throw InvalidArgument("operator tuple is empty");
  dim_ = static_cast<int>(!operators_.empty() ? operators_.front().rows() : group_.front().matrix.rows());
  if (dim_ < 1) throw InvalidArgument("operator tuple needs dimension >= 1");

  std::vector<const CMatrix*> all;
  for (const CMatrix& a : operators_) all.push_back(&a);
  for (const GroupGenerator& u : group_) all.push_back(&u.matrix);
  for (const CMatrix* m : all) {
    if (m->rows() != dim_ || m->cols() != dim_) throw InvalidArgument("tuple matrices must all be d x d");
    linalg::require_finite(*m, "tuple matrix");
  }
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      const CMatrix& x = *all[i];
      const CMatrix& y = *all[j];
      const double c = (x * y - y * x).norm();
      if (c > tol.commutation * x.norm() * y.norm()) {
        throw CommutationViolated("tuple members " + std::to_string(i) + " and " + std::to_string(j) +
                                  " do not commute (|[X,Y]|_F = " + std::to_string(c) + ")");
      }
    }
  }
  for (const GroupGenerator& u : group_) {
    if (u.order < 2) throw InvalidArgument("group generator order must be >= 2");
    const CMatrix p = linalg::matrix_power(u.matrix, static_cast<std::uint64_t>(u.order));
    const double dev = (p - CMatrix::Identity(dim_, dim_)).cwiseAbs().maxCoeff();
    if (dev > tol.group_order) {
      throw InvalidArgument("group generator U does not satisfy U^N = I (deviation " + std::to_string(dev) + ")");
    }
  }

  if (!numerical_.empty()) {
    if (operators_.size() != 1 || !group_.empty()) {
      throw InvalidArgument("a numerical-semigroup representation takes exactly one operator and no unitaries");
    }
    descriptor_ = std::make_shared<const Descriptor>(Descriptor::numerical(numerical_));
    for (int g : descriptor_->generator_values()) {
      generator_matrices_.push_back(linalg::matrix_power(operators_[0], static_cast<std::uint64_t>(g)));
    }
    return;
  }

  std::vector<int> orders;
  for (const GroupGenerator& u : group_) {
    orders.push_back(u.order);
    generator_matrices_.push_back(u.matrix);
  }
  for (std::size_t i = 0; i < operators_.size(); ++i) {
    free_generators_.push_back(generator_matrices_.size());
    generator_matrices_.push_back(operators_[i]);
  }
  const int k = static_cast<int>(operators_.size());
  if (group_.empty()) {
    descriptor_ = std::make_shared<const Descriptor>(Descriptor::free_abelian(k));
  } else if (k == 0) {
    descriptor_ = std::make_shared<const Descriptor>(Descriptor::finite_abelian(orders));
  } else {
    descriptor_ = std::make_shared<const Descriptor>(
        Descriptor::product(Descriptor::finite_abelian(orders), Descriptor::free_abelian(k)));
  }
}

std::vector<CMatrix> OperatorTuple::algebra_generators() const {
  std::vector<CMatrix> out = operators_;
  for (const GroupGenerator& u : group_) out.push_back(u.matrix);
  return out;
}

OperatorTuple OperatorTuple::adjoint() const {
  std::vector<CMatrix> a;
  for (const CMatrix& m : operators_) a.push_back(m.adjoint());
  std::vector<GroupGenerator> u;
  for (const GroupGenerator& g : group_) u.push_back({g.order, g.matrix.adjoint()});
  return OperatorTuple(std::move(a), std::move(u), numerical_);
}

// ---------------------------------------------------------------------------
// Orbits

CVector rep_apply(const OperatorTuple& t, const Element& n, const CVector& x) {
  semigroup::require_valid(t.descriptor(), n);
  if (x.size() != t.dim()) throw DimMismatch("rep_apply: vector dimension does not match the tuple");
  CVector y = x;
  if (!t.numerical_generators().empty()) {
    return linalg::apply(linalg::matrix_power(t.operators()[0], static_cast<std::uint64_t>(n[0])), y);
  }
  // Coordinates: group exponents first, then free exponents.
  const std::size_t l = t.group().size();
  for (std::size_t i = 0; i < t.operators().size(); ++i) {
    const auto e = static_cast<std::uint64_t>(n[l + i]);
    if (e > 0) y = linalg::apply(linalg::matrix_power(t.operators()[i], e), y);
  }
  for (std::size_t j = 0; j < l; ++j) {
    const auto e = static_cast<std::uint64_t>(n[j]);
    if (e > 0) y = linalg::apply(linalg::matrix_power(t.group()[j].matrix, e), y);
  }
  return y;
}

frame::Frame orbit_frame(const OperatorTuple& t, const CVector& xi, std::shared_ptr<const Window> w) {
  if (!w) throw InvalidArgument("orbit_frame: missing window");
  if (!(w->descriptor() == t.descriptor())) {
    throw InvalidArgument("window semigroup " + w->descriptor().describe() + " does not match the tuple's " +
                          t.descriptor().describe());
  }
  if (xi.size() != t.dim()) throw DimMismatch("generator vector dimension does not match the tuple");
  linalg::require_finite(xi, "generator vector");
  if (xi.norm() == 0.0) throw InvalidArgument("orbit generator must be nonzero");

  const auto& gm = t.generator_matrices();
  CMatrix vecs(t.dim(), static_cast<Eigen::Index>(w->size()));
  vecs.col(0) = xi;
  for (std::size_t p = 1; p < w->size(); ++p) {
    const auto dec = semigroup::predecessor(t.descriptor(), (*w)[p]);
    const auto v = dec ? w->index_of(dec->rest) : std::nullopt;
    if (!v || *v >= p) throw InvalidArgument("window is not a lower set in graded order");
    vecs.col(static_cast<Eigen::Index>(p)) = linalg::apply(gm[dec->generator], vecs.col(static_cast<Eigen::Index>(*v)));
  }
  return frame::Frame(std::move(vecs), std::move(w));
}

// ---------------------------------------------------------------------------
// Tail estimates

namespace {

constexpr int kShells = 5;
constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_ratio(double num, double den) {
  if (den > 0.0) return num / den;
  return num > 0.0 ? kInf : 0.0;
}

TailEstimate numerical_tail(const OperatorTuple& t, const frame::Frame& orbit) {
  TailEstimate est;
  const Window& w = *orbit.window();
  const std::int64_t cap = w.elements().back()[0];
  const CMatrix& a = t.operators()[0];
  // Energies of A^n xi for every integer n <= cap (a superset of the window).
  std::vector<double> e;
  CVector v = orbit.vector(0);
  for (std::int64_t n = 0; n <= cap; ++n) {
    e.push_back(v.squaredNorm());
    v = linalg::apply(a, v);
  }
  const double rho = linalg::spectral_radius(a);
  est.spectral_radii = {rho};
  double q = rho * rho;
  double qmin = kInf;
  for (std::int64_t n = std::max<std::int64_t>(0, cap - kShells); n < cap; ++n) {
    const double r = safe_ratio(e[static_cast<std::size_t>(n + 1)], e[static_cast<std::size_t>(n)]);
    q = std::max(q, r);
    qmin = std::min(qmin, r);
  }
  if (cap < 1) q = kInf;
  est.contraction = {q};
  est.min_shell_ratio = {qmin};
  const double face = e.back();
  if (face == 0.0) {
    est.tau = 0.0;
    est.certified = true;
    est.note = "orbit vanishes at the window boundary";
  } else if (q < 1.0) {
    est.tau = face * q / (1.0 - q);
    est.certified = true;
  } else {
    est.tau = kInf;
    est.note = "boundary growth ratio >= 1";
  }
  return est;
}

}  // namespace

TailEstimate tail_mass(const OperatorTuple& t, const frame::Frame& orbit) {
  if (!orbit.window()) throw InvalidArgument("tail_mass needs an orbit frame indexed by a window");
  const Window& w = *orbit.window();
  const Descriptor& d = w.descriptor();
  if (!(d == t.descriptor())) throw InvalidArgument("tail_mass: window and tuple semigroups differ");

  if (d.kind() == Descriptor::Kind::Numerical) return numerical_tail(t, orbit);

  TailEstimate est;
  const auto& free = t.free_generators();
  if (free.empty()) {
    est.certified = true;
    est.note = "finite group: the window is the whole semigroup";
    return est;
  }

  const std::size_t k = free.size();
  const std::size_t l = t.group().size();
  std::vector<double> energy(w.size());
  for (std::size_t p = 0; p < w.size(); ++p) energy[p] = orbit.vector(static_cast<Eigen::Index>(p)).squaredNorm();

  auto free_coord = [&](std::size_t p, std::size_t i) { return w[p][l + i]; };
  auto free_degree = [&](std::size_t p) {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < k; ++i) s += free_coord(p, i);
    return s;
  };

  const bool total = w.spec().kind == WindowSpec::Kind::TotalDegree;
  est.contraction.assign(k, 0.0);
  est.min_shell_ratio.assign(k, kInf);
  for (std::size_t i = 0; i < k; ++i) {
    const double rho = linalg::spectral_radius(t.operators()[i]);
    est.spectral_radii.push_back(rho);
    est.contraction[i] = rho * rho;
  }

  if (!total) {
    // Box: shells along each free coordinate.
    std::vector<std::int64_t> caps(k);
    for (std::size_t i = 0; i < k; ++i) caps[i] = w.coordinate_max(static_cast<int>(l + i));
    std::vector<double> face(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      std::vector<double> shell(static_cast<std::size_t>(caps[i] + 1), 0.0);
      for (std::size_t p = 0; p < w.size(); ++p) shell[static_cast<std::size_t>(free_coord(p, i))] += energy[p];
      face[i] = shell.back();
      if (caps[i] < 1) {
        est.contraction[i] = kInf;
        continue;
      }
      for (std::int64_t s = std::max<std::int64_t>(0, caps[i] - kShells); s < caps[i]; ++s) {
        const double r = safe_ratio(shell[static_cast<std::size_t>(s + 1)], shell[static_cast<std::size_t>(s)]);
        est.contraction[i] = std::max(est.contraction[i], r);
        est.min_shell_ratio[i] = std::min(est.min_shell_ratio[i], r);
      }
    }
    if (std::all_of(face.begin(), face.end(), [](double f) { return f == 0.0; })) {
      est.tau = 0.0;
      est.certified = true;
      est.note = "orbit vanishes on every boundary face";
      return est;
    }
    if (std::any_of(est.contraction.begin(), est.contraction.end(), [](double q) { return !(q < 1.0); })) {
      est.tau = kInf;
      est.note = "some boundary growth ratio >= 1 (or window too thin)";
      return est;
    }
    // Every point outside the box clamps onto a face F_i of some overflowing
    // coordinate i; continue geometrically from there in all overflowing
    // directions.
    double tau = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      double term = face[i] * est.contraction[i] / (1.0 - est.contraction[i]);
      for (std::size_t j = 0; j < k; ++j) {
        if (j != i) term /= (1.0 - est.contraction[j]);
      }
      tau += term;
    }
    est.tau = tau;
    est.certified = true;
    return est;
  }

  // Total degree: shells by free degree; ratios along each generator.
  const std::int64_t n_max = w.spec().caps[0];
  double top_shell = 0.0;
  for (std::size_t p = 0; p < w.size(); ++p) {
    if (free_degree(p) == n_max) top_shell += energy[p];
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (n_max < 1) {
      est.contraction[i] = kInf;
      continue;
    }
    for (std::int64_t deg = std::max<std::int64_t>(0, n_max - kShells); deg < n_max; ++deg) {
      double num = 0.0, den = 0.0;
      for (std::size_t p = 0; p < w.size(); ++p) {
        if (free_degree(p) != deg) continue;
        Element next = w[p];
        next[l + i] += 1;
        if (auto q = w.index_of(next)) {
          den += energy[p];
          num += energy[*q];
        }
      }
      const double r = safe_ratio(num, den);
      est.contraction[i] = std::max(est.contraction[i], r);
      est.min_shell_ratio[i] = std::min(est.min_shell_ratio[i], r);
    }
  }
  if (top_shell == 0.0) {
    est.tau = 0.0;
    est.certified = true;
    est.note = "orbit vanishes on the top degree shell";
    return est;
  }
  double prod = 1.0;
  for (double q : est.contraction) {
    if (!(q < 1.0)) {
      est.tau = kInf;
      est.note = "some boundary growth ratio >= 1 (or window too thin)";
      return est;
    }
    prod /= (1.0 - q);
  }
  est.tau = top_shell * (prod - 1.0);
  est.certified = true;
  return est;
}

TailEstimate tail_mass(const OperatorTuple& t, const CVector& xi, std::shared_ptr<const Window> w) {
  return tail_mass(t, orbit_frame(t, xi, std::move(w)));
}

// ---------------------------------------------------------------------------
// Classification

std::string_view to_string(OrbitClass c) {
  switch (c) {
    case OrbitClass::Frame:
      return "Frame";
    case OrbitClass::BesselNotComplete:
      return "BesselNotComplete";
    case OrbitClass::NotBessel:
      return "NotBessel";
    case OrbitClass::Undecided:
      return "Undecided";
  }
  return "?";
}

OrbitDiagnosis classify_orbit(const OperatorTuple& t, const frame::Frame& orbit) {
  OrbitDiagnosis diag;
  if (!linalg::all_finite(orbit.vectors())) {
    // Floating-point overflow inside the window: the orbit is unbounded for
    // every practical purpose.
    diag.truncated.bounds = {std::numeric_limits<double>::quiet_NaN(), kInf};
    diag.truncated.classification = frame::Classification::BesselOnly;
    diag.tail.tau = kInf;
    diag.tail.note = "orbit overflowed inside the window";
    diag.lower_bound = diag.truncated.bounds.lower;
    diag.upper_bound = kInf;
    diag.classification = OrbitClass::NotBessel;
    return diag;
  }
  diag.truncated = frame::frame_bounds(orbit);
  diag.krylov_rank = diag.truncated.rank;
  diag.tail = tail_mass(t, orbit);
  diag.lower_bound = diag.truncated.bounds.lower;
  diag.upper_bound = diag.truncated.bounds.upper + diag.tail.tau;

  if (diag.tail.certified) {
    diag.classification = diag.truncated.is_frame() ? OrbitClass::Frame : OrbitClass::BesselNotComplete;
    return diag;
  }
  // Divergence evidence: a direction that does not decay at the boundary and
  // whose operator has spectral radius >= 1.
  bool divergent = false;
  for (std::size_t i = 0; i < diag.tail.spectral_radii.size(); ++i) {
    if (diag.tail.spectral_radii[i] >= 1.0 && diag.tail.min_shell_ratio[i] >= 1.0 &&
        std::isfinite(diag.tail.min_shell_ratio[i])) {
      divergent = true;
    }
  }
  diag.classification = divergent ? OrbitClass::NotBessel : OrbitClass::Undecided;
  return diag;
}

OrbitDiagnosis classify_orbit(const OperatorTuple& t, const CVector& xi, std::shared_ptr<const Window> w) {
  return classify_orbit(t, orbit_frame(t, xi, std::move(w)));
}

// ---------------------------------------------------------------------------
// Random tuples

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::Poly:
      return "poly";
    case Scheme::Triangular:
      return "triangular";
    case Scheme::Diagonal:
      return "diagonal";
  }
  return "?";
}

Scheme parse_scheme(std::string_view text) {
  if (text == "poly" || text == "poly-of-one-matrix") return Scheme::Poly;
  if (text == "triangular" || text == "simultaneous-triangular") return Scheme::Triangular;
  if (text == "diagonal") return Scheme::Diagonal;
  throw InvalidArgument("unknown scheme '" + std::string(text) + "'");
}

namespace {

CMatrix random_polynomial_of(const CMatrix& b, Rng& rng) {
  const Eigen::Index d = b.rows();
  const auto degree = d > 1 ? rng.integer(1, d - 1) : 0;
  CMatrix out = rng.complex_normal() * CMatrix::Identity(d, d);
  CMatrix power = CMatrix::Identity(d, d);
  for (std::int64_t j = 1; j <= degree; ++j) {
    power = power * b;
    out += rng.complex_normal() * power;
  }
  return out;
}

// Scale so that rho(A) lands in [rho_max / 2, rho_max].
void rescale(CMatrix& a, double rho_max, Rng& rng) {
  const double target = rho_max * rng.uniform(0.5, 1.0);
  const double rho = linalg::spectral_radius(a);
  if (rho > 0.0) a *= target / rho;
}

void validate_request(int d, int k, double rho_max) {
  if (d < 1) throw InvalidArgument("dimension must be >= 1");
  if (k < 1) throw InvalidArgument("tuple size must be >= 1");
  if (!(rho_max > 0.0 && rho_max < 1.0)) throw InvalidArgument("rho_max must lie in (0, 1)");
}

}  // namespace

OperatorTuple random_commuting_tuple(int d, int k, double rho_max, Scheme scheme, std::uint64_t seed) {
  validate_request(d, k, rho_max);
  Rng rng(seed);
  std::vector<CMatrix> ops;
  switch (scheme) {
    case Scheme::Diagonal:
      for (int i = 0; i < k; ++i) {
        CVector z(d);
        for (int j = 0; j < d; ++j) z(j) = rng.in_disk(rho_max);
        ops.push_back(z.asDiagonal());
      }
      break;
    case Scheme::Poly: {
      const CMatrix b = rng.gaussian_matrix(d, d) / std::sqrt(static_cast<double>(d));
      for (int i = 0; i < k; ++i) {
        CMatrix a = random_polynomial_of(b, rng);
        rescale(a, rho_max, rng);
        ops.push_back(std::move(a));
      }
      break;
    }
    case Scheme::Triangular: {
      const CMatrix q = rng.unitary(d);
      CMatrix r = rng.gaussian_matrix(d, d).triangularView<Eigen::Upper>();
      r /= std::sqrt(static_cast<double>(d));
      for (int i = 0; i < k; ++i) {
        CMatrix a = random_polynomial_of(r, rng);
        a = q * a * q.adjoint();
        rescale(a, rho_max, rng);
        ops.push_back(std::move(a));
      }
      break;
    }
  }
  return OperatorTuple(std::move(ops));
}

OperatorTuple random_hybrid_tuple(int d, const std::vector<int>& orders, int m, double rho_max, Scheme scheme,
                                  std::uint64_t seed) {
  validate_request(d, m, rho_max);
  if (orders.empty()) throw InvalidArgument("hybrid tuple needs at least one group factor");
  Rng rng(seed);
  const CMatrix q = rng.unitary(d);

  // Character tuple per basis vector; basis vectors with equal tuples form a
  // joint eigenspace of the unitaries.
  std::vector<std::vector<int>> chars(static_cast<std::size_t>(d));
  for (auto& c : chars) {
    for (int o : orders) c.push_back(static_cast<int>(rng.integer(0, o - 1)));
  }
  std::vector<GroupGenerator> group;
  for (std::size_t j = 0; j < orders.size(); ++j) {
    CVector diag(d);
    for (int b = 0; b < d; ++b) {
      diag(b) = std::polar(1.0, 2.0 * std::numbers::pi * chars[static_cast<std::size_t>(b)][j] / orders[j]);
    }
    group.push_back({orders[j], q * diag.asDiagonal() * q.adjoint()});
  }

  // Block structure: blocks of basis indices with identical characters.
  CMatrix mask = CMatrix::Zero(d, d);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      if (chars[static_cast<std::size_t>(a)] == chars[static_cast<std::size_t>(b)]) mask(a, b) = 1.0;
    }
  }

  std::vector<CMatrix> ops;
  if (scheme == Scheme::Diagonal) {
    for (int i = 0; i < m; ++i) {
      CVector z(d);
      for (int j = 0; j < d; ++j) z(j) = rng.in_disk(rho_max);
      ops.push_back(q * z.asDiagonal() * q.adjoint());
    }
  } else {
    const CMatrix b = rng.gaussian_matrix(d, d).cwiseProduct(mask) / std::sqrt(static_cast<double>(d));
    for (int i = 0; i < m; ++i) {
      CMatrix a = random_polynomial_of(b, rng);
      rescale(a, rho_max, rng);
      ops.push_back(q * a * q.adjoint());
    }
  }
  return OperatorTuple(std::move(ops), std::move(group));
}

}  // namespace dynframe::dynamical
