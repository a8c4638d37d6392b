#pragma once

// Dynamical sampling: a state f evolves under A, sensors g_j observe
// y[j][n] = <A^n f, g_j> for n = 0..N, and f is recovered from the samples
// through the frame {(A^*)^n g_j}.

#include <cstdint>
#include <optional>
#include <vector>

#include "dynframe/dynamical.hpp"
#include "dynframe/frame.hpp"

namespace dynframe::sampling {

struct SamplingScheme {
  CMatrix evolution;             // A, d x d
  std::vector<CVector> sensors;  // g_1..g_p
  int horizon = 0;               // N: times 0..N

  int dim() const { return static_cast<int>(evolution.rows()); }
  int times() const { return horizon + 1; }
  /// InvalidArgument for p = 0, N < 0 or a non-square A; DimMismatch for sensors.
  void validate() const;
};

struct SampleTable {
  int sensors = 0;
  int times = 0;
  CMatrix values;  // sensors x times
  /// max |<A^n f, g_j> - <f, (A^*)^n g_j>| relative to max |y|; 0 when only
  /// one route was evaluated.
  double route_mismatch = 0.0;

  /// Sensor-major flattening, matching recovery_frame's vector order.
  CVector flatten() const;
};

inline constexpr double kRouteTolerance = 1e-12;

/// Both formulas are evaluated; DimMismatch when f has the wrong size.
SampleTable collect_samples(const SamplingScheme& s, const CVector& f);

/// y + sigma * z with z i.i.d. circular complex Gaussian, E|z|^2 = 1.
SampleTable add_noise(const SampleTable& y, double sigma, std::uint64_t seed);

struct RecoveryFrame {
  frame::Frame frame;  // (A^*)^n g_j, sensor-major
  frame::FrameReport report;
  /// Orbit of each sensor under A^* over the box [0..N] (truncated family,
  /// tail estimate for the infinite orbit).
  std::vector<dynamical::OrbitDiagnosis> per_sensor;
};

RecoveryFrame recovery_frame(const SamplingScheme& s);

struct RecoveryReport {
  CVector recovered;
  std::optional<double> relative_error;  // when the truth is known
  frame::FrameReport report;
  /// sqrt(sum_w |dual_w|^2): the expected error of recovery from samples with
  /// noise of unit variance scales with this factor.
  double noise_gain = 0.0;
  int iterations = 0;
};

/// Throws NotAFrame unless the finite sampling family is a frame.
RecoveryReport recover(const SamplingScheme& s, const SampleTable& y, const std::optional<CVector>& truth = {},
                       frame::Method method = frame::Method::DirectDual);

struct NoisePoint {
  double sigma = 0.0;
  double error = 0.0;  // relative
};

struct NoiseStudy {
  std::vector<NoisePoint> points;
  double slope = 0.0;  // least-squares slope of log(error) on log(sigma)
};

/// Recovers from y + sigma * z for one fixed noise draw z and every sigma.
NoiseStudy noise_study(const SamplingScheme& s, const CVector& f, const std::vector<double>& sigmas,
                       std::uint64_t seed);

/// (1 - 2 eps) I + eps (L + R) on the cycle with n nodes, scaled by 0.99 / rho.
CMatrix diffusion_matrix(int nodes, double eps);

struct DemoReport {
  int nodes = 0;
  double epsilon = 0.0;
  std::vector<int> sensor_nodes;
  SamplingScheme scheme;
  CVector truth;
  SampleTable samples;
  RecoveryFrame frame;
  std::optional<RecoveryReport> recovery;  // absent when the family is not a frame
};

/// Evolve, sample at the given nodes for t = 0..steps, recover. The state is a
/// unit Gaussian vector drawn from `seed`. InvalidArgument unless
/// 0 < eps < 1/2, nodes >= 2 and every sensor node is in range.
DemoReport demo_diffusion(int nodes, double eps, const std::vector<int>& sensor_nodes, int steps,
                          std::uint64_t seed);

}  // namespace dynframe::sampling
