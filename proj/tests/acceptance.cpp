// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>

#include "dynframe/commutant.hpp"
#include "dynframe/error.hpp"
#include "dynframe/frame.hpp"
#include "dynframe/model_space.hpp"
#include "dynframe/random.hpp"
#include "dynframe/sampling.hpp"

using namespace dynframe;
using semigroup::Descriptor;
using semigroup::Window;
using semigroup::WindowSpec;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int threads() {
  if (const char* env = std::getenv("DYNFRAME_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::shared_ptr<const Window> window(const Descriptor& d, const WindowSpec& spec) {
  return std::make_shared<const Window>(Window::enumerate(d, spec));
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void run_centrality(Outcome& o, commutant::ExperimentConfig c, const std::string& label) {
  c.trials = 100;
  c.d_min = 2;
  c.d_max = 6;
  c.threads = threads();
  const auto t0 = std::chrono::steady_clock::now();
  const auto rep = commutant::centrality_experiment(c);
  const double secs = seconds_since(t0);
  o.detail << ' ' << label << ": " << rep.equivalent << "/100, " << secs << "s;";
  o.require(rep.passed && rep.equivalent == 100, label + " not 100/100");
  o.require(rep.max_vector_residual <= 1e-8 && rep.max_commutation_residual <= 1e-8, label + " residuals");
  o.require(rep.min_sigma_ratio >= 1e-8, label + " sigma ratio");
  o.require(secs <= 60.0, label + " over 60 s");
}

Outcome criterion1() {
  Outcome o;
  for (int k : {1, 2, 3}) {
    for (auto scheme : {dynamical::Scheme::Poly, dynamical::Scheme::Diagonal}) {
      commutant::ExperimentConfig c;
      c.k = k;
      c.scheme = scheme;
      c.seed = 1000 + static_cast<std::uint64_t>(k) * 10 + (scheme == dynamical::Scheme::Poly ? 0 : 1);
      run_centrality(o, c, "k=" + std::to_string(k) + " " + std::string(dynamical::to_string(scheme)));
    }
  }
  return o;
}

Outcome criterion2() {
  Outcome o;
  commutant::ExperimentConfig a;
  a.k = 1;
  a.group_orders = {2};
  a.seed = 2001;
  run_centrality(o, a, "Z2 x Z+");
  commutant::ExperimentConfig b;
  b.k = 2;
  b.group_orders = {3};
  b.seed = 2002;
  run_centrality(o, b, "Z3 x Z+^2");
  return o;
}

Outcome criterion3() {
  Outcome o;
  Rng rng(3000);
  double worst = 0.0;
  int certified = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int d = static_cast<int>(rng.integer(1, 6));
    CVector a(d);
    for (int i = 0; i < d; ++i) a(i) = rng.in_disk(0.9);
    const CVector xi = rng.gaussian_vector(d);
    const dynamical::OperatorTuple t({CMatrix(a.asDiagonal())});
    dynamical::OrbitDiagnosis diag;
    std::shared_ptr<const Window> w;
    for (int cap = 16; cap <= 4096; cap *= 2) {
      w = window(t.descriptor(), WindowSpec::box({cap}));
      diag = dynamical::classify_orbit(t, xi, w);
      if (diag.tail.certified) break;
    }
    if (!diag.tail.certified) continue;
    ++certified;
    const CMatrix s = frame::frame_operator(dynamical::orbit_frame(t, xi, w));
    double excess = 0.0;
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        const Complex exact = xi(i) * std::conj(xi(j)) / (1.0 - a(i) * std::conj(a(j)));
        excess = std::max(excess, std::abs(s(i, j) - exact) - (diag.tail.tau + 1e-12));
      }
    }
    worst = std::max(worst, excess);
  }
  o.detail << " certified " << certified << "/100, worst excess over tau + 1e-12: " << worst;
  o.require(certified == 100, "uncertified instances");
  o.require(worst <= 0.0, "entry outside tau + 1e-12");
  return o;
}

Outcome criterion4() {
  Outcome o;
  Rng rng(4000);
  int built = 0, equivalent = 0;
  double worst_interior = 0.0, worst_co_ratio = 0.0;
  for (int trial = 0; built < 50 && trial < 200; ++trial) {
    const int k = 1 + trial % 3;
    const int d = static_cast<int>(rng.integer(1, 4));
    // The model frame matches the orbit up to O(sqrt(tau)); the spectral
    // radius is kept small enough that tau is negligible at these windows.
    const auto t = dynamical::random_commuting_tuple(d, k, k == 3 ? 0.3 : 0.5, dynamical::Scheme::Poly,
                                                     derive_seed(4000, trial));
    const int cap = k == 1 ? 80 : (k == 2 ? 40 : 20);
    const auto w = window(t.descriptor(), WindowSpec::box({cap}));
    std::optional<model_space::ModelSpace> m;
    try {
      m.emplace(model_space::build_model_space(t, rng.unit_vector(d), w));
    } catch (const NotCertified&) {
      continue;
    }
    ++built;
    for (const auto& s : semigroup::generators(t.descriptor())) {
      const auto in = model_space::check_intertwining(*m, t, s);
      worst_interior = std::max(worst_interior, in.interior.residual);
      o.require(in.interior.residual <= 1e-10, "intertwining residual");
      const auto co = model_space::check_coinvariance(*m, s);
      worst_co_ratio = std::max(worst_co_ratio, co.residual / co.tolerance);
      o.require(co.pass, "co-invariance budget");
    }
    if (model_space::model_frame_equivalence(*m).equivalent) ++equivalent;
  }
  o.detail << " instances " << built << ", model frame equivalent " << equivalent
           << ", worst intertwining " << worst_interior << ", worst co-invariance residual/budget " << worst_co_ratio;
  o.require(built == 50, "fewer than 50 certified instances");
  o.require(equivalent == built, "model frame inequivalent");
  return o;
}

Outcome criterion5() {
  Outcome o;
  double worst_angle = 0.0;
  int windows = 0;
  auto check = [&](const Descriptor& d, const WindowSpec& spec) {
    const Window w = Window::enumerate(d, spec);
    const auto basis = commutant::commutant_basis(model_space::truncated_shifts(w));
    ++windows;
    if (basis.size() != w.size()) {
      o.require(false, "dimension at " + spec.to_string());
      return;
    }
    CMatrix conv(static_cast<Eigen::Index>(w.size() * w.size()), static_cast<Eigen::Index>(w.size()));
    for (std::size_t m = 0; m < w.size(); ++m) {
      conv.col(static_cast<Eigen::Index>(m)) = semigroup::left_regular_matrix(w[m], w).reshaped();
    }
    const double angle = linalg::max_principal_angle_of_spans(basis.stacked(), conv);
    worst_angle = std::max(worst_angle, angle);
    o.require(angle <= 1e-8, "angle at " + spec.to_string());
  };
  for (int c = 1; c <= 20; ++c) check(Descriptor::free_abelian(1), WindowSpec::box({c}));
  for (int c = 0; c <= 6; ++c) check(Descriptor::free_abelian(2), WindowSpec::box({c}));
  for (int c = 1; c <= 30; ++c) check(Descriptor::numerical({2, 3}), WindowSpec::cap(c));
  o.detail << " windows " << windows << ", worst principal angle " << worst_angle;
  return o;
}

Outcome criterion6() {
  Outcome o;
  Rng rng(6000);
  int built = 0, passed = 0, controls_failed = 0, controls = 0;
  for (int trial = 0; built < 30 && trial < 100; ++trial) {
    const int k = 1 + trial % 2;
    const int d = static_cast<int>(rng.integer(1, 4));
    const auto t = dynamical::random_commuting_tuple(d, k, 0.5, dynamical::Scheme::Poly, derive_seed(6000, trial));
    const auto w = window(t.descriptor(), WindowSpec::box({k == 1 ? 80 : 30}));
    std::optional<model_space::ModelSpace> m;
    try {
      m.emplace(model_space::build_model_space(t, rng.unit_vector(d), w));
    } catch (const NotCertified&) {
      continue;
    }
    ++built;
    if (model_space::check_cohyperinvariance(*m).check.pass) ++passed;
    // Controls of the same rank on the same window.
    if (controls < 100) {
      for (int c = 0; c < 4 && controls < 100; ++c, ++controls) {
        const CMatrix q = model_space::random_subspace(w->size(), d, derive_seed(6100 + trial, c));
        if (model_space::cohyperinvariance(q, *w, m->budget()).check.residual >= 1e-2) ++controls_failed;
      }
    }
  }
  o.detail << " certified instances " << built << ", passing " << passed << "; controls failing " << controls_failed
           << "/" << controls;
  o.require(built == 30 && passed == built, "co-hyperinvariance");
  o.require(controls == 100 && controls_failed >= 95, "negative controls");
  return o;
}

Outcome criterion7() {
  Outcome o;
  Rng rng(7000);
  double worst_factor = 0.0, worst_norm = -1.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int k = static_cast<int>(rng.integer(1, 3));
    const int deg = static_cast<int>(rng.integer(0, 6));
    const auto w = window(Descriptor::free_abelian(k), WindowSpec::total_degree(deg));
    const model_space::PolySymbol phi{w, rng.gaussian_vector(static_cast<Eigen::Index>(w->size()))};
    const int n = static_cast<int>(rng.integer(0, 12));
    const auto psi = model_space::fejer_average(phi, n);
    for (std::size_t i = 0; i < w->size(); ++i) {
      std::int64_t j = 0;
      for (auto e : (*w)[i]) j += e;
      const Complex c = phi.coeffs(static_cast<Eigen::Index>(i));
      const Complex err = c - psi.coeffs(static_cast<Eigen::Index>(i));
      const Complex expected = j > n ? c : c * (static_cast<double>(j) / (n + 1));
      worst_factor = std::max(worst_factor, std::abs(err - expected) / std::max(1.0, std::abs(c)));
    }
    const Window big = Window::enumerate(w->descriptor(), model_space::dilate(w->spec()));
    const double lhs = linalg::spectral_norm(model_space::multiplication_operator(psi, *w));
    const double rhs = linalg::spectral_norm(model_space::multiplication_operator(phi, big));
    worst_norm = std::max(worst_norm, lhs - rhs);
  }
  o.detail << " worst coefficient deviation " << worst_factor << ", worst norm excess " << worst_norm;
  o.require(worst_factor <= 4 * std::numeric_limits<double>::epsilon(), "factor j/(n+1)");
  o.require(worst_norm <= 1e-8, "norm diagnostic");
  return o;
}

Outcome criterion8() {
  Outcome o;
  const int steps = 32;
  const auto demo = sampling::demo_diffusion(16, 0.1, {0, 1}, steps, 8000);
  const bool recovered = demo.recovery.has_value();
  o.require(recovered, "two-sensor family is not a frame");
  if (recovered) {
    o.detail << " relative error " << *demo.recovery->relative_error;
    o.require(*demo.recovery->relative_error <= 1e-6, "relative error");
    const auto study = sampling::noise_study(demo.scheme, demo.truth, {1e-4, 1e-3, 1e-2}, 8001);
    o.detail << ", noise slope " << study.slope;
    o.require(std::abs(study.slope - 1.0) <= 0.05, "noise slope");
  }
  const auto single = sampling::demo_diffusion(16, 0.1, {0}, steps, 8000);
  o.detail << ", single sensor " << frame::to_string(single.frame.report.classification) << " (rank "
           << single.frame.report.rank << ")";
  o.require(single.frame.report.classification == frame::Classification::Incomplete, "single sensor");
  return o;
}

Outcome criterion9() {
  Outcome o;
  const double r = std::sqrt(3.0) / 2.0;
  CMatrix mercedes(2, 3);
  mercedes << 0.0, -r, r, 1.0, -0.5, -0.5;
  const auto m = frame::frame_bounds(frame::Frame(mercedes));
  o.require(std::abs(m.bounds.lower - 1.5) <= 1e-12 && std::abs(m.bounds.upper - 1.5) <= 1e-12, "Mercedes bounds");
  const auto onb = frame::frame_bounds(frame::Frame(CMatrix::Identity(4, 4)));
  o.require(std::abs(onb.bounds.lower - 1.0) <= 1e-14 && std::abs(onb.bounds.upper - 1.0) <= 1e-14, "ONB bounds");
  Rng rng(9000);
  double worst = 0.0;
  int iterative = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto d = rng.integer(1, 8);
    const auto n = d + rng.integer(0, 12);
    const frame::Frame f(rng.gaussian_matrix(d, n));
    const CVector x = rng.gaussian_vector(d);
    const CVector c = frame::analysis_matrix(f) * x;
    worst = std::max(worst, (frame::reconstruct(f, c, frame::Method::DirectDual).x - x).norm() / x.norm());
    // The frame algorithm converges at rate (C2 - C1) / (C2 + C1).
    if (frame::frame_bounds(f).condition <= 500) {
      ++iterative;
      worst = std::max(worst, (frame::reconstruct(f, c, frame::Method::Iterative).x - x).norm() / x.norm());
    }
  }
  o.detail << " Mercedes (" << m.bounds.lower << ", " << m.bounds.upper << "), worst roundtrip " << worst
           << " (200 direct, " << iterative << " iterative)";
  o.require(worst <= 1e-8, "roundtrip");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"centrality of Z+^k", criterion1},
      {"centrality of hybrid semigroups", criterion2},
      {"closed-form frame operator", criterion3},
      {"model-space identities", criterion4},
      {"truncated commutant structure", criterion5},
      {"co-hyperinvariance", criterion6},
      {"Fejer construction", criterion7},
      {"recovery pipeline", criterion8},
      {"frame machinery", criterion9}};
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    all = all && o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << (i + 1) << " (" << criteria[i].first << "):"
              << o.detail.str() << std::endl;
  }
  return all ? 0 : 1;
}
