#include <doctest.h>

#include <cmath>

#include "dynframe/commutant.hpp"
#include "dynframe/error.hpp"
#include "dynframe/sampling.hpp"
#include "support.hpp"

using namespace dynframe;
using namespace dynframe::sampling;
using testing_support::Gen;

namespace {

CMatrix diag2(Complex a, Complex b) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

SamplingScheme random_scheme(Gen& g, int d, int p, int horizon) {
  SamplingScheme s;
  s.evolution = g.matrix(d, d);
  s.evolution *= 0.8 / linalg::spectral_radius(s.evolution);
  for (int j = 0; j < p; ++j) s.sensors.push_back(g.vector(d));
  s.horizon = horizon;
  return s;
}

}  // namespace

TEST_SUITE("sampling") {
  TEST_CASE("sample examples") {
    SamplingScheme s{diag2(0.5, 0.3), {CVector::Unit(2, 0)}, 10};
    const auto y = collect_samples(s, CVector::Ones(2));
    CHECK(y.sensors == 1);
    CHECK(y.times == 11);
    for (int n = 0; n <= 10; ++n) CHECK(std::abs(y.values(0, n) - std::pow(0.5, n)) <= 1e-15);
    CHECK(y.route_mismatch <= kRouteTolerance);

    Gen g(81);
    SamplingScheme id{CMatrix::Identity(3, 3), {g.vector(3), g.vector(3)}, 5};
    const CVector f = g.vector(3);
    const auto c = collect_samples(id, f);
    for (int j = 0; j < 2; ++j) {
      CHECK(std::abs(c.values(j, 0) - linalg::inner(f, id.sensors[j])) <= 1e-14);
      for (int n = 1; n <= 5; ++n) CHECK(c.values(j, n) == c.values(j, 0));
    }
    CHECK_THROWS_AS(collect_samples(s, CVector::Ones(3)), DimMismatch);
  }

  TEST_CASE("scheme validation") {
    SamplingScheme none{CMatrix::Identity(2, 2), {}, 1};
    CHECK_THROWS_AS(none.validate(), InvalidArgument);
    SamplingScheme negative{CMatrix::Identity(2, 2), {CVector::Ones(2)}, -1};
    CHECK_THROWS_AS(negative.validate(), InvalidArgument);
    SamplingScheme wrong{CMatrix::Identity(2, 2), {CVector::Ones(3)}, 1};
    CHECK_THROWS_AS(wrong.validate(), DimMismatch);
  }

  TEST_CASE("property: both sample routes agree") {
    Gen g(82);
    for (int trial = 0; trial < 50; ++trial) {
      const auto s = random_scheme(g, g.integer(1, 8), g.integer(1, 3), g.integer(0, 30));
      CHECK(collect_samples(s, g.vector(s.dim())).route_mismatch <= kRouteTolerance);
    }
  }

  TEST_CASE("recovery frames") {
    SamplingScheme basis{CMatrix::Identity(3, 3) * 0.5, {}, 0};
    for (int j = 0; j < 3; ++j) basis.sensors.push_back(CVector::Unit(3, j));
    const auto rf = recovery_frame(basis);
    CHECK(rf.report.classification == frame::Classification::Parseval);
    CHECK(std::abs(rf.report.bounds.lower - 1.0) <= 1e-14);
    CHECK(std::abs(rf.report.bounds.upper - 1.0) <= 1e-14);

    // Cyclic sensor for A^*, rho < 1.
    SamplingScheme cyc{diag2(0.5, 0.3), {CVector::Ones(2)}, 20};
    const auto ok = recovery_frame(cyc);
    CHECK(ok.report.is_frame());
    REQUIRE(ok.per_sensor.size() == 1);
    CHECK(ok.per_sensor[0].krylov_rank == 2);

    // Block diagonal A, sensor inside one block: the other block is invisible.
    CMatrix a = CMatrix::Zero(4, 4);
    a.topLeftCorner(2, 2) << 0.5, 0.1, 0.0, 0.4;
    a.bottomRightCorner(2, 2) << 0.3, 0.2, 0.0, 0.6;
    CVector g(4);
    g << 1.0, 0.0, 0.0, 0.0;
    SamplingScheme block{a, {g}, 40};
    const auto inc = recovery_frame(block);
    CHECK(inc.report.classification == frame::Classification::Incomplete);
    CHECK(inc.report.rank == 2);
    CHECK_THROWS_AS(recover(block, collect_samples(block, CVector::Ones(4))), NotAFrame);
  }

  TEST_CASE("property: exact recovery roundtrip") {
    Gen g(83);
    for (int trial = 0; trial < 50; ++trial) {
      const int d = g.integer(1, 6);
      const auto s = random_scheme(g, d, g.integer(1, 2), 3 * d);
      const auto rf = recovery_frame(s);
      if (!rf.report.is_frame()) continue;
      const CVector f = g.vector(d);
      for (auto m : {frame::Method::DirectDual, frame::Method::Iterative}) {
        // The frame algorithm needs on the order of the condition number of steps.
        if (m == frame::Method::Iterative && rf.report.condition > 500) continue;
        const auto r = recover(s, collect_samples(s, f), f, m);
        REQUIRE(r.relative_error.has_value());
        CHECK(*r.relative_error <= 1e-8);
      }
      const auto zero = recover(s, collect_samples(s, CVector::Zero(d)));
      CHECK(zero.recovered.norm() == 0.0);
    }
  }

  TEST_CASE("Monte Carlo noise bound") {
    Gen g(84);
    const auto s = random_scheme(g, 4, 2, 10);
    const CVector f = g.vector(4);
    const auto clean = collect_samples(s, f);
    const double sigma = 1e-3;
    double mean_sq = 0.0;
    double gain = 0.0;
    const int draws = 400;
    for (int i = 0; i < draws; ++i) {
      const auto r = recover(s, add_noise(clean, sigma, static_cast<std::uint64_t>(i)));
      mean_sq += (r.recovered - f).squaredNorm() / draws;
      gain = r.noise_gain;
    }
    // E|f_hat - f|^2 = sigma^2 * gain^2 exactly.
    const double expect = sigma * sigma * gain * gain;
    CHECK(mean_sq <= 1.25 * expect);
    CHECK(mean_sq >= 0.75 * expect);

    const auto noisy = add_noise(clean, 0.5, 7);
    CHECK(noisy.values == add_noise(clean, 0.5, 7).values);
    CHECK(add_noise(clean, 0.0, 7).values == clean.values);
  }

  TEST_CASE("noise study slope") {
    Gen g(85);
    const auto s = random_scheme(g, 5, 2, 15);
    const auto study = noise_study(s, g.vector(5), {1e-4, 1e-3, 1e-2}, 11);
    REQUIRE(study.points.size() == 3);
    CHECK(std::abs(study.slope - 1.0) <= 0.05);
  }

  TEST_CASE("recovery commutes with equivalence") {
    Gen g(86);
    int checked = 0;
    for (int trial = 0; trial < 20; ++trial) {
      const int d = g.integer(2, 5);
      const auto t = dynamical::random_commuting_tuple(d, 1, 0.8, dynamical::Scheme::Poly, 700 + trial);
      const CMatrix a = t.operators()[0];
      const CVector xi = g.unit(d), eta = g.unit(d);
      // Sensor orbits live under A^*, so the witness must commute with A^*.
      const auto w = commutant::intertwiner(t.adjoint(), xi, eta);
      if (!w.found || !w.invertible) continue;
      SamplingScheme sx{a, {xi}, 4 * d};
      SamplingScheme se{a, {eta}, 4 * d};
      if (!recovery_frame(sx).report.is_frame()) continue;
      ++checked;
      const CVector f = g.vector(d);
      const auto y_eta = collect_samples(se, f);
      const auto transported = recover(sx, y_eta);
      const CVector expect = w.matrix.adjoint() * f;
      CHECK((transported.recovered - expect).norm() <= 1e-7 * expect.norm());
      CHECK((recover(se, y_eta).recovered - f).norm() <= 1e-7 * f.norm());
    }
    CHECK(checked >= 10);
  }

  TEST_CASE("diffusion demo") {
    const CMatrix a = diffusion_matrix(16, 0.1);
    CHECK(a.isApprox(a.transpose()));
    CHECK(std::abs(linalg::spectral_radius(a) - 0.99) <= 1e-12);
    CHECK_THROWS_AS(diffusion_matrix(16, 0.5), InvalidArgument);
    CHECK_THROWS_AS(diffusion_matrix(1, 0.1), InvalidArgument);

    const auto demo = demo_diffusion(16, 0.1, {0, 1}, 32, 5);
    REQUIRE(demo.recovery.has_value());
    CHECK(*demo.recovery->relative_error <= 1e-6);
    CHECK(demo.samples.route_mismatch <= kRouteTolerance);

    const auto single = demo_diffusion(16, 0.1, {0}, 32, 5);
    CHECK(single.frame.report.classification == frame::Classification::Incomplete);
    CHECK_FALSE(single.recovery.has_value());
    CHECK_THROWS_AS(demo_diffusion(16, 0.1, {16}, 32, 5), InvalidArgument);
  }
}
