#include "dynframe/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "dynframe/error.hpp"
#include "dynframe/random.hpp"

namespace dynframe::sampling {

void SamplingScheme::validate() const {
  if (evolution.rows() < 1 || evolution.rows() != evolution.cols()) {
    throw InvalidArgument("evolution operator must be square and nonempty");
  }
  if (sensors.empty()) throw InvalidArgument("at least one sensor is required");
  if (horizon < 0) throw InvalidArgument("time horizon must be >= 0");
  for (const CVector& g : sensors) {
    if (g.size() != evolution.rows()) throw DimMismatch("sensor dimension differs from the state dimension");
  }
  linalg::require_finite(evolution, "evolution operator");
}

CVector SampleTable::flatten() const { return values.transpose().reshaped(); }

SampleTable collect_samples(const SamplingScheme& s, const CVector& f) {
  s.validate();
  if (f.size() != s.dim()) throw DimMismatch("state dimension differs from the scheme");
  const auto p = static_cast<Eigen::Index>(s.sensors.size());
  SampleTable out;
  out.sensors = static_cast<int>(p);
  out.times = s.times();
  out.values.resize(p, s.times());

  CMatrix adjoint_route(p, s.times());
  const CMatrix a_star = s.evolution.adjoint();
  CVector state = f;
  std::vector<CVector> probes(s.sensors.begin(), s.sensors.end());
  for (int n = 0; n < s.times(); ++n) {
    for (Eigen::Index j = 0; j < p; ++j) {
      out.values(j, n) = linalg::inner(state, s.sensors[static_cast<std::size_t>(j)]);
      adjoint_route(j, n) = linalg::inner(f, probes[static_cast<std::size_t>(j)]);
    }
    state = linalg::apply(s.evolution, state);
    for (CVector& g : probes) g = linalg::apply(a_star, g);
  }
  const double scale = out.values.cwiseAbs().maxCoeff();
  const double diff = (out.values - adjoint_route).cwiseAbs().maxCoeff();
  out.route_mismatch = scale > 0.0 ? diff / scale : diff;
  return out;
}

SampleTable add_noise(const SampleTable& y, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw InvalidArgument("noise level must be >= 0");
  Rng rng(seed);
  SampleTable out = y;
  out.route_mismatch = 0.0;
  // Draw in sensor-major order so the realization does not depend on storage.
  for (Eigen::Index j = 0; j < y.values.rows(); ++j) {
    for (Eigen::Index n = 0; n < y.values.cols(); ++n) out.values(j, n) += sigma * rng.complex_normal();
  }
  return out;
}

RecoveryFrame recovery_frame(const SamplingScheme& s) {
  s.validate();
  const int d = s.dim();
  const int times = s.times();
  const CMatrix a_star = s.evolution.adjoint();
  CMatrix vectors(d, static_cast<Eigen::Index>(s.sensors.size()) * times);
  for (std::size_t j = 0; j < s.sensors.size(); ++j) {
    CVector g = s.sensors[j];
    for (int n = 0; n < times; ++n) {
      vectors.col(static_cast<Eigen::Index>(j) * times + n) = g;
      g = linalg::apply(a_star, g);
    }
  }
  frame::Frame fr(std::move(vectors));
  frame::FrameReport report = frame::frame_bounds(fr);

  std::vector<dynamical::OrbitDiagnosis> per_sensor;
  const dynamical::OperatorTuple adj({a_star});
  auto w = std::make_shared<const semigroup::Window>(
      semigroup::Window::enumerate(adj.descriptor(), semigroup::WindowSpec::box({s.horizon})));
  for (const CVector& g : s.sensors) {
    if (g.norm() == 0.0) {
      per_sensor.push_back(dynamical::OrbitDiagnosis{});
      continue;
    }
    per_sensor.push_back(dynamical::classify_orbit(adj, g, w));
  }
  return RecoveryFrame{std::move(fr), report, std::move(per_sensor)};
}

RecoveryReport recover(const SamplingScheme& s, const SampleTable& y, const std::optional<CVector>& truth,
                       frame::Method method) {
  if (y.sensors != static_cast<int>(s.sensors.size()) || y.times != s.times()) {
    throw DimMismatch("sample table shape differs from the scheme");
  }
  const RecoveryFrame rf = recovery_frame(s);
  if (!rf.report.is_frame()) {
    throw NotAFrame("sampling family is " + std::string(frame::to_string(rf.report.classification)) +
                    ", not a frame");
  }
  RecoveryReport out;
  out.report = rf.report;
  const auto rec = frame::reconstruct(rf.frame, y.flatten(), method);
  out.recovered = rec.x;
  out.iterations = rec.iterations;
  out.noise_gain = frame::canonical_dual(rf.frame).vectors().norm();
  if (truth) {
    if (truth->size() != s.dim()) throw DimMismatch("truth dimension differs from the scheme");
    const double tn = truth->norm();
    const double err = (out.recovered - *truth).norm();
    out.relative_error = tn > 0.0 ? err / tn : err;
  }
  return out;
}

NoiseStudy noise_study(const SamplingScheme& s, const CVector& f, const std::vector<double>& sigmas,
                       std::uint64_t seed) {
  if (sigmas.size() < 2) throw InvalidArgument("noise study needs at least two noise levels");
  const SampleTable clean = collect_samples(s, f);
  const SampleTable unit = add_noise(SampleTable{clean.sensors, clean.times,
                                                 CMatrix::Zero(clean.values.rows(), clean.values.cols()), 0.0},
                                     1.0, seed);
  NoiseStudy out;
  for (double sigma : sigmas) {
    if (!(sigma > 0.0)) throw InvalidArgument("noise levels must be positive");
    SampleTable noisy = clean;
    noisy.values += sigma * unit.values;
    out.points.push_back({sigma, *recover(s, noisy, f).relative_error});
  }
  double mx = 0.0, my = 0.0;
  for (const auto& p : out.points) {
    mx += std::log(p.sigma);
    my += std::log(p.error);
  }
  mx /= static_cast<double>(out.points.size());
  my /= static_cast<double>(out.points.size());
  double sxy = 0.0, sxx = 0.0;
  for (const auto& p : out.points) {
    sxy += (std::log(p.sigma) - mx) * (std::log(p.error) - my);
    sxx += (std::log(p.sigma) - mx) * (std::log(p.sigma) - mx);
  }
  out.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  return out;
}

CMatrix diffusion_matrix(int nodes, double eps) {
  if (nodes < 2) throw InvalidArgument("diffusion demo needs at least two nodes");
  if (!(eps > 0.0 && eps < 0.5)) throw InvalidArgument("diffusion rate must lie in (0, 1/2)");
  CMatrix a = (1.0 - 2.0 * eps) * CMatrix::Identity(nodes, nodes);
  for (int i = 0; i < nodes; ++i) {
    a(i, (i + 1) % nodes) += eps;
    a(i, (i + nodes - 1) % nodes) += eps;
  }
  return a * (0.99 / linalg::spectral_radius(a));
}

DemoReport demo_diffusion(int nodes, double eps, const std::vector<int>& sensor_nodes, int steps,
                          std::uint64_t seed) {
  SamplingScheme scheme;
  scheme.evolution = diffusion_matrix(nodes, eps);
  scheme.horizon = steps;
  for (int node : sensor_nodes) {
    if (node < 0 || node >= nodes) throw InvalidArgument("sensor node " + std::to_string(node) + " out of range");
    scheme.sensors.push_back(CVector::Unit(nodes, node));
  }
  scheme.validate();
  Rng rng(seed);
  CVector truth = rng.unit_vector(nodes);
  SampleTable samples = collect_samples(scheme, truth);
  RecoveryFrame rf = recovery_frame(scheme);
  std::optional<RecoveryReport> recovery;
  if (rf.report.is_frame()) recovery = recover(scheme, samples, truth);
  return DemoReport{nodes,           eps,           sensor_nodes, std::move(scheme), std::move(truth),
                    std::move(samples), std::move(rf), std::move(recovery)};
}

}  // namespace dynframe::sampling
