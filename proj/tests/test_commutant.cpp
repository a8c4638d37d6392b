#include <doctest.h>

#include "dynframe/commutant.hpp"
#include "dynframe/error.hpp"
#include "dynframe/random.hpp"
#include "support.hpp"

using namespace dynframe;
using namespace dynframe::commutant;
using dynamical::OperatorTuple;
using testing_support::Gen;

namespace {

CMatrix diag2(Complex a, Complex b) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

CVector vec2(Complex a, Complex b) {
  CVector v(2);
  v << a, b;
  return v;
}

CMatrix jordan(int d) {
  CMatrix j = CMatrix::Zero(d, d);
  for (int i = 1; i < d; ++i) j(i, i - 1) = 1.0;
  return j;
}

std::shared_ptr<const semigroup::Window> box(const OperatorTuple& t, int cap) {
  return std::make_shared<const semigroup::Window>(
      semigroup::Window::enumerate(t.descriptor(), semigroup::WindowSpec::box({cap})));
}

// Brute-force commutant dimension: count free entries of the d^2 x d^2 system
// by Gaussian elimination on a real embedding is overkill; use the generic
// SVD of the explicit linear map built entry by entry.
int brute_force_dim(const std::vector<CMatrix>& algebra) {
  const auto d = algebra.front().rows();
  CMatrix big(static_cast<Eigen::Index>(algebra.size()) * d * d, d * d);
  for (Eigen::Index col = 0; col < d * d; ++col) {
    CMatrix e = CMatrix::Zero(d, d);
    e(col % d, col / d) = 1.0;
    for (std::size_t i = 0; i < algebra.size(); ++i) {
      const CMatrix r = algebra[i] * e - e * algebra[i];
      big.block(static_cast<Eigen::Index>(i) * d * d, col, d * d, 1) = r.reshaped();
    }
  }
  Eigen::JacobiSVD<CMatrix> svd(big);
  const auto& s = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > 1e-9 * std::max(1.0, s(0))) ++rank;
  return static_cast<int>(d * d) - rank;
}

}  // namespace

TEST_SUITE("commutant") {
  TEST_CASE("commutant basis examples") {
    CHECK(commutant_basis(OperatorTuple({CMatrix::Identity(3, 3)})).size() == 9);

    const auto diag = commutant_basis(OperatorTuple({diag2(1.0, 2.0)}));
    REQUIRE(diag.size() == 2);
    for (const auto& b : diag.basis) {
      CHECK(std::abs(b(0, 1)) <= 1e-12);
      CHECK(std::abs(b(1, 0)) <= 1e-12);
    }

    const auto toeplitz = commutant_basis(OperatorTuple({jordan(3)}));
    REQUIRE(toeplitz.size() == 3);
    for (const auto& b : toeplitz.basis) {
      CHECK(std::abs(b(0, 1)) + std::abs(b(0, 2)) + std::abs(b(1, 2)) <= 1e-12);
      CHECK(std::abs(b(0, 0) - b(1, 1)) <= 1e-12);
      CHECK(std::abs(b(1, 1) - b(2, 2)) <= 1e-12);
      CHECK(std::abs(b(1, 0) - b(2, 1)) <= 1e-12);
    }
    CHECK(commutant_basis(std::vector<CMatrix>{CMatrix::Zero(2, 2)}).size() == 4);
  }

  TEST_CASE("basis is orthonormal, commutes, and contains the identity") {
    for (int seed = 0; seed < 20; ++seed) {
      const auto t = dynamical::random_commuting_tuple(2 + seed % 5, 1 + seed % 3, 0.9,
                                                       seed % 2 ? dynamical::Scheme::Poly : dynamical::Scheme::Diagonal,
                                                       static_cast<std::uint64_t>(seed));
      const auto b = commutant_basis(t);
      const CMatrix st = b.stacked();
      CHECK((st.adjoint() * st - CMatrix::Identity(st.cols(), st.cols())).norm() <= 1e-10);
      for (const auto& m : b.basis) CHECK(commutation_residual(m, t.algebra_generators()) <= 1e-10);
      const CMatrix id = CMatrix::Identity(t.dim(), t.dim());
      CHECK((b.combine(b.coordinates(id)) - id).norm() <= 1e-10);
      CHECK(static_cast<int>(b.size()) == brute_force_dim(t.algebra_generators()));
    }
  }

  TEST_CASE("property: dimension is invariant under unitary conjugation") {
    Gen g(61);
    for (int seed = 0; seed < 20; ++seed) {
      const int d = 2 + seed % 5;
      const auto t = dynamical::random_commuting_tuple(d, 1 + seed % 2, 0.8, dynamical::Scheme::Triangular,
                                                       static_cast<std::uint64_t>(seed));
      Rng rng(static_cast<std::uint64_t>(1000 + seed));
      const CMatrix u = rng.unitary(d);
      std::vector<CMatrix> conj;
      for (const auto& a : t.operators()) conj.push_back(u * a * u.adjoint());
      CHECK(commutant_basis(t).size() == commutant_basis(conj).size());
    }
    // Repeated eigenvalues: block diagonal with a 2x2 identity block.
    CMatrix a = CMatrix::Zero(3, 3);
    a(0, 0) = a(1, 1) = 0.5;
    a(2, 2) = 0.2;
    Rng rng(5);
    const CMatrix u = rng.unitary(3);
    CHECK(commutant_basis(std::vector<CMatrix>{a}).size() == 5);
    CHECK(commutant_basis(std::vector<CMatrix>{u * a * u.adjoint()}).size() == 5);
  }

  TEST_CASE("intertwiner examples") {
    const OperatorTuple t({diag2(0.5, 0.3)});
    const auto w = intertwiner(t, vec2(1.0, 1.0), vec2(2.0, -1.0));
    CHECK(w.found);
    CHECK(w.invertible);
    CHECK((w.matrix - diag2(2.0, -1.0)).norm() <= 1e-12);

    const auto n = intertwiner(t, vec2(1.0, 1.0), vec2(1.0, 0.0));
    CHECK(n.found);
    CHECK_FALSE(n.invertible);
    CHECK((n.matrix - diag2(1.0, 0.0)).norm() <= 1e-12);

    const CVector xi = vec2(0.3, Complex(0.1, 0.7));
    const auto same = intertwiner(t, xi, xi);
    CHECK(same.found);
    CHECK((same.matrix - CMatrix::Identity(2, 2)).norm() <= 1e-12);
    CHECK(same.vector_residual <= 1e-15);

    // A larger commutant than the orbit of xi: the identity is still chosen.
    const OperatorTuple scalar({CMatrix::Identity(2, 2) * 0.5});
    CHECK((intertwiner(scalar, xi, xi).matrix - CMatrix::Identity(2, 2)).norm() <= 1e-12);

    // Not reachable: A = J_2 forces T lower-triangular Toeplitz, T e_2 = c e_2.
    const OperatorTuple j({jordan(2)});
    const auto miss = intertwiner(j, vec2(0.0, 1.0), vec2(1.0, 0.0));
    CHECK_FALSE(miss.found);
    CHECK(miss.vector_residual > 1e-3);
  }

  TEST_CASE("equivalence of frame vectors") {
    const OperatorTuple t({diag2(0.5, 0.3)});
    const auto w = box(t, 60);
    const auto rep = are_equivalent_frame_vectors(t, vec2(1.0, 1.0), vec2(2.0, -1.0), w);
    CHECK(rep.verdict == Verdict::Equivalent);
    CHECK(rep.frame_check.equivalent);
    const auto self = are_equivalent_frame_vectors(t, vec2(1.0, 1.0), vec2(1.0, 1.0), w);
    CHECK(self.verdict == Verdict::Equivalent);
    CHECK((self.witness.matrix - CMatrix::Identity(2, 2)).norm() <= 1e-12);
    CHECK_THROWS_AS(are_equivalent_frame_vectors(t, vec2(1.0, 1.0), vec2(1.0, 0.0), w), PreconditionFailed);
    CHECK(to_string(Verdict::IntertwinedNotEquivalent) == "IntertwinedNotEquivalent");
  }

  TEST_CASE("property: witness symmetry and verdict agreement") {
    Gen g(62);
    int checked = 0;
    for (int seed = 0; seed < 40; ++seed) {
      const int d = g.integer(2, 5);
      const int k = g.integer(1, 2);
      const auto t = dynamical::random_commuting_tuple(d, k, 0.7, seed % 2 ? dynamical::Scheme::Poly
                                                                            : dynamical::Scheme::Diagonal,
                                                       static_cast<std::uint64_t>(200 + seed));
      const auto w = box(t, k == 1 ? 200 : 48);
      const CVector xi = g.unit(d), eta = g.unit(d);
      EquivalenceReport rep;
      try {
        rep = are_equivalent_frame_vectors(t, xi, eta, w);
      } catch (const PreconditionFailed&) {
        continue;
      }
      ++checked;
      CHECK(rep.verdict == Verdict::Equivalent);
      CHECK(rep.frame_check.equivalent);
      const CMatrix inv = rep.witness.matrix.inverse();
      CHECK(commutation_residual(inv, t.algebra_generators()) <= 1e-7);
      CHECK((inv * eta - xi).norm() <= 1e-7 * xi.norm());
    }
    CHECK(checked >= 20);
  }

  TEST_CASE("centrality experiment is deterministic across thread counts") {
    ExperimentConfig c;
    c.k = 1;
    c.d_min = 2;
    c.d_max = 4;
    c.trials = 6;
    c.seed = 99;
    c.threads = 1;
    const auto a = centrality_experiment(c);
    c.threads = 3;
    const auto b = centrality_experiment(c);
    CHECK(a.passed);
    REQUIRE(a.trials.size() == b.trials.size());
    for (std::size_t i = 0; i < a.trials.size(); ++i) {
      CHECK(a.trials[i].seed == b.trials[i].seed);
      CHECK(a.trials[i].d == b.trials[i].d);
      CHECK(a.trials[i].vector_residual == b.trials[i].vector_residual);
    }
    ExperimentConfig hybrid;
    hybrid.group_orders = {2};
    hybrid.k = 1;
    hybrid.trials = 4;
    hybrid.seed = 3;
    CHECK(centrality_experiment(hybrid).passed);
  }
}
