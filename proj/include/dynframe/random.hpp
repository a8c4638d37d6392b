#pragma once

// Seeded random generation with a portable draw sequence: std::mt19937_64
// bits converted by hand, so the same seed yields the same numbers under any
// standard library (the std:: distributions are implementation-defined).

#include <cstdint>
#include <random>

#include "dynframe/linalg.hpp"

namespace dynframe {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [lo, hi].
  std::int64_t integer(std::int64_t lo, std::int64_t hi);
  double normal();
  /// Circular complex Gaussian with E|z|^2 = 1.
  Complex complex_normal();
  /// Uniform in the closed disk of the given radius.
  Complex in_disk(double radius);

  CVector gaussian_vector(Eigen::Index n);
  CMatrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols);
  /// Haar-distributed unitary (QR of a Gaussian matrix with phase fix).
  CMatrix unitary(Eigen::Index n);
  CVector unit_vector(Eigen::Index n);

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// SplitMix64 mixing step; derives independent per-trial seeds.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace dynframe
