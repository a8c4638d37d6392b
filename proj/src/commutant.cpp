#include "dynframe/commutant.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "dynframe/error.hpp"
#include "dynframe/random.hpp"

namespace dynframe::commutant {

CMatrix CommutantBasis::stacked() const {
  const Eigen::Index n = static_cast<Eigen::Index>(dim) * dim;
  CMatrix out(n, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t m = 0; m < basis.size(); ++m) {
    out.col(static_cast<Eigen::Index>(m)) = basis[m].reshaped();
  }
  return out;
}

CMatrix CommutantBasis::combine(const CVector& coeffs) const {
  CMatrix t = CMatrix::Zero(dim, dim);
  for (std::size_t m = 0; m < basis.size(); ++m) t += coeffs(static_cast<Eigen::Index>(m)) * basis[m];
  return t;
}

CVector CommutantBasis::coordinates(const CMatrix& t) const {
  CVector c(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t m = 0; m < basis.size(); ++m) {
    // <T, B> = tr(B^* T)
    c(static_cast<Eigen::Index>(m)) = (basis[m].conjugate().cwiseProduct(t)).sum();
  }
  return c;
}

CommutantBasis commutant_basis(const std::vector<CMatrix>& algebra, double tol) {
  if (algebra.empty()) throw InvalidArgument("commutant of an empty family");
  const Eigen::Index d = algebra.front().rows();
  const Eigen::Index n = d * d;
  const CMatrix eye = CMatrix::Identity(d, d);

  std::vector<const CMatrix*> active;
  for (const CMatrix& x : algebra) {
    if (x.rows() != d || x.cols() != d) throw InvalidArgument("commutant: matrices must be square of equal size");
    if (x.norm() > 0.0) active.push_back(&x);
  }
  CommutantBasis out;
  out.dim = static_cast<int>(d);
  if (active.empty()) {
    for (Eigen::Index j = 0; j < n; ++j) {
      CMatrix b = CMatrix::Zero(d, d);
      b(j % d, j / d) = 1.0;
      out.basis.push_back(std::move(b));
    }
    return out;
  }

  // vec(X T - T X) = (I (x) X - X^T (x) I) vec(T), column-major vec.
  CMatrix stacked(static_cast<Eigen::Index>(active.size()) * n, n);
  for (std::size_t i = 0; i < active.size(); ++i) {
    const CMatrix& x = *active[i];
    const CMatrix xs = x / x.norm();
    CMatrix block = CMatrix::Zero(n, n);
    for (Eigen::Index a = 0; a < d; ++a) {
      block.block(a * d, a * d, d, d) += xs;  // I (x) X
    }
    for (Eigen::Index a = 0; a < d; ++a) {
      for (Eigen::Index b = 0; b < d; ++b) {
        const Complex coef = xs(b, a);  // (X^T)(a, b)
        if (coef != Complex(0.0)) block.block(a * d, b * d, d, d) -= coef * eye;
      }
    }
    stacked.block(static_cast<Eigen::Index>(i) * n, 0, n, n) = block;
  }
  const CMatrix null = linalg::nullspace(stacked, tol);
  for (Eigen::Index m = 0; m < null.cols(); ++m) {
    out.basis.push_back(null.col(m).reshaped(d, d));
  }
  return out;
}

CommutantBasis commutant_basis(const dynamical::OperatorTuple& t, double tol) {
  return commutant_basis(t.algebra_generators(), tol);
}

double commutation_residual(const CMatrix& t, const std::vector<CMatrix>& algebra) {
  const double tn = t.norm();
  if (tn == 0.0) return 0.0;
  double worst = 0.0;
  for (const CMatrix& x : algebra) {
    const double xn = x.norm();
    if (xn == 0.0) continue;
    worst = std::max(worst, (t * x - x * t).norm() / (xn * tn));
  }
  return worst;
}

Intertwiner intertwiner(const CommutantBasis& basis, const std::vector<CMatrix>& algebra, const CVector& xi,
                        const CVector& eta, const IntertwinerOptions& opts) {
  if (xi.size() != basis.dim || eta.size() != basis.dim) throw DimMismatch("intertwiner: vector dimension mismatch");
  if (xi.norm() == 0.0) throw InvalidArgument("intertwiner: xi must be nonzero");

  const auto r = static_cast<Eigen::Index>(basis.size());
  CMatrix images(basis.dim, r);
  for (Eigen::Index m = 0; m < r; ++m) images.col(m) = basis.basis[static_cast<std::size_t>(m)] * xi;

  const CVector c_id = basis.coordinates(CMatrix::Identity(basis.dim, basis.dim));
  const CVector offset = eta - images * c_id;
  const auto ls = linalg::lstsq(images, offset);

  Intertwiner out;
  out.coefficients = c_id + ls.solution.col(0);
  out.matrix = basis.combine(out.coefficients);
  const double en = eta.norm();
  const double res = (out.matrix * xi - eta).norm();
  out.vector_residual = en > 0.0 ? res / en : res;
  out.commutation_residual = commutation_residual(out.matrix, algebra);
  const RVector sv = linalg::singular_values(out.matrix);
  out.sigma_max = sv(0);
  out.sigma_min = sv(sv.size() - 1);
  out.invertible = out.sigma_max > 0.0 && out.sigma_min >= opts.invertibility * out.sigma_max;
  out.found = out.vector_residual <= opts.residual;
  return out;
}

Intertwiner intertwiner(const dynamical::OperatorTuple& t, const CVector& xi, const CVector& eta,
                        const IntertwinerOptions& opts) {
  const auto algebra = t.algebra_generators();
  return intertwiner(commutant_basis(algebra), algebra, xi, eta, opts);
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Equivalent:
      return "Equivalent";
    case Verdict::IntertwinedNotEquivalent:
      return "IntertwinedNotEquivalent";
    case Verdict::NotEquivalent:
      return "NotEquivalent";
  }
  return "?";
}

EquivalenceReport are_equivalent_frame_vectors(const dynamical::OperatorTuple& t, const CommutantBasis& basis,
                                               const CVector& xi, const CVector& eta,
                                               std::shared_ptr<const semigroup::Window> w,
                                               const IntertwinerOptions& opts) {
  EquivalenceReport rep;
  const frame::Frame fx = dynamical::orbit_frame(t, xi, w);
  const frame::Frame fe = dynamical::orbit_frame(t, eta, w);
  rep.xi_diagnosis = dynamical::classify_orbit(t, fx);
  rep.eta_diagnosis = dynamical::classify_orbit(t, fe);
  if (!rep.xi_diagnosis.is_frame()) {
    throw PreconditionFailed("xi is not a certified frame vector on this window (" +
                             std::string(dynamical::to_string(rep.xi_diagnosis.classification)) + ")");
  }
  if (!rep.eta_diagnosis.is_frame()) {
    throw PreconditionFailed("eta is not a certified frame vector on this window (" +
                             std::string(dynamical::to_string(rep.eta_diagnosis.classification)) + ")");
  }
  const auto algebra = t.algebra_generators();
  rep.witness = intertwiner(basis, algebra, xi, eta, opts);
  if (rep.witness.found) {
    rep.verdict = rep.witness.invertible ? Verdict::Equivalent : Verdict::IntertwinedNotEquivalent;
  } else {
    rep.verdict = Verdict::NotEquivalent;
  }
  frame::EquivalenceOptions fopts;
  fopts.residual = opts.residual;
  fopts.invertibility = opts.invertibility;
  rep.frame_check = frame::frames_equivalent(fx, fe, fopts);
  if (rep.frame_check.equivalent != (rep.verdict == Verdict::Equivalent)) {
    throw InconsistentVerdicts("intertwiner verdict " + std::string(to_string(rep.verdict)) +
                               " disagrees with the range-projector test (distance " +
                               std::to_string(rep.frame_check.projector_distance) + ")");
  }
  return rep;
}

EquivalenceReport are_equivalent_frame_vectors(const dynamical::OperatorTuple& t, const CVector& xi,
                                               const CVector& eta,
                                               std::shared_ptr<const semigroup::Window> w,
                                               const IntertwinerOptions& opts) {
  return are_equivalent_frame_vectors(t, commutant_basis(t), xi, eta, std::move(w), opts);
}

// ---------------------------------------------------------------------------
// Centrality experiment

namespace {

int max_box_cap(int k) {
  switch (k) {
    case 1:
      return 1024;
    case 2:
      return 96;
    case 3:
      return 24;
    default:
      return 10;
  }
}

struct CertifiedPair {
  std::shared_ptr<const semigroup::Window> window;
  bool ok = false;
};

// Smallest box window (doubling from a start cap) on which both orbits are
// certified frames.
CertifiedPair find_window(const dynamical::OperatorTuple& t, const CVector& xi, const CVector& eta, int k) {
  int cap = std::max(8, 2 * t.dim());
  const int limit = max_box_cap(k);
  while (true) {
    const int c = std::min(cap, limit);
    auto w = std::make_shared<const semigroup::Window>(
        semigroup::Window::enumerate(t.descriptor(), semigroup::WindowSpec::box({c})));
    const auto dx = dynamical::classify_orbit(t, xi, w);
    if (dx.is_frame() && dynamical::classify_orbit(t, eta, w).is_frame()) return {w, true};
    if (c >= limit) return {w, false};
    cap *= 2;
  }
}

TrialRecord run_trial(const ExperimentConfig& cfg, int index) {
  TrialRecord rec;
  rec.trial = index;
  rec.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(index));
  Rng rng(rec.seed);
  rec.d = static_cast<int>(rng.integer(cfg.d_min, cfg.d_max));
  try {
    for (int attempt = 0; attempt <= cfg.max_resamples; ++attempt) {
      const std::uint64_t tuple_seed = derive_seed(rec.seed, static_cast<std::uint64_t>(attempt));
      const dynamical::OperatorTuple t =
          cfg.group_orders.empty()
              ? dynamical::random_commuting_tuple(rec.d, cfg.k, cfg.rho_max, cfg.scheme, tuple_seed)
              : dynamical::random_hybrid_tuple(rec.d, cfg.group_orders, cfg.k, cfg.rho_max, cfg.scheme, tuple_seed);
      const CVector xi = rng.unit_vector(rec.d);
      const CVector eta = rng.unit_vector(rec.d);
      const CertifiedPair pair = find_window(t, xi, eta, cfg.k);
      if (!pair.ok) {
        ++rec.resamples;
        continue;
      }
      rec.certified = true;
      rec.window = pair.window->spec().to_string();
      const CommutantBasis basis = commutant_basis(t);
      rec.commutant_dim = static_cast<int>(basis.size());
      const EquivalenceReport eq = are_equivalent_frame_vectors(t, basis, xi, eta, pair.window);
      rec.verdict = eq.verdict;
      rec.vector_residual = eq.witness.vector_residual;
      rec.commutation_residual = eq.witness.commutation_residual;
      rec.sigma_ratio = eq.witness.sigma_max > 0.0 ? eq.witness.sigma_min / eq.witness.sigma_max : 0.0;
      rec.projector_distance = eq.frame_check.projector_distance;
      rec.condition_xi = eq.xi_diagnosis.truncated.condition;
      rec.condition_eta = eq.eta_diagnosis.truncated.condition;
      return rec;
    }
  } catch (const Error& e) {
    rec.error = e.what();
  }
  return rec;
}

}  // namespace

ExperimentReport centrality_experiment(const ExperimentConfig& config) {
  if (config.trials < 1) throw InvalidArgument("centrality experiment needs at least one trial");
  if (config.d_min < 1 || config.d_max < config.d_min) throw InvalidArgument("bad dimension range");
  ExperimentReport rep;
  rep.config = config;
  rep.trials.resize(static_cast<std::size_t>(config.trials));

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < config.trials; i = next++) rep.trials[static_cast<std::size_t>(i)] = run_trial(config, i);
  };
  const int threads = std::max(1, std::min(config.threads, config.trials));
  std::vector<std::thread> pool;
  for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  bool all_ok = true;
  for (const TrialRecord& t : rep.trials) {
    if (!t.certified || !t.error.empty()) {
      all_ok = false;
      continue;
    }
    ++rep.certified;
    if (t.verdict == Verdict::Equivalent) {
      ++rep.equivalent;
    } else {
      all_ok = false;
    }
    rep.max_vector_residual = std::max(rep.max_vector_residual, t.vector_residual);
    rep.max_commutation_residual = std::max(rep.max_commutation_residual, t.commutation_residual);
    rep.min_sigma_ratio = std::min(rep.min_sigma_ratio, t.sigma_ratio);
    rep.worst_condition = std::max({rep.worst_condition, t.condition_xi, t.condition_eta});
  }
  rep.passed = all_ok;
  return rep;
}

}  // namespace dynframe::commutant
