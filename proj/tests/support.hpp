#pragma once

// Hand-rolled generators and oracles shared by the test suites. They use
// their own engine so that test inputs do not depend on dynframe::Rng.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace testing_support {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  Complex complex() { return {normal_(engine_), normal_(engine_)}; }
  Complex in_disk(double r) { return std::polar(r * std::sqrt(uniform()), uniform(0.0, 2.0 * M_PI)); }

  CMatrix matrix(Eigen::Index rows, Eigen::Index cols) {
    CMatrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = complex();
    return m;
  }
  CVector vector(Eigen::Index n) { return matrix(n, 1).col(0); }
  CVector unit(Eigen::Index n) {
    CVector v = vector(n);
    return v / v.norm();
  }
  std::vector<Complex> buffer(std::size_t n) {
    std::vector<Complex> v(n);
    for (auto& z : v) z = complex();
    return v;
  }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

inline double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace testing_support
