#pragma once

#include "qric/tensor.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace qric {

// Seeded generator with hand-rolled Gaussian sampling. std::mt19937_64 has a
// fully specified bit stream; std::normal_distribution does not, so Box-Muller
// is done here to keep byte-identical output across standard libraries.
struct Rng {
  std::mt19937_64 engine;
  bool has_spare = false;
  double spare = 0.0;

  explicit Rng(std::uint64_t seed) : engine(seed) {}

  double uniform() {  // [0, 1), 53-bit resolution
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
  }

  double gauss() {
    if (has_spare) {
      has_spare = false;
      return spare;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare = r * std::sin(t);
    has_spare = true;
    return r * std::cos(t);
  }

  int below(int n) {  // uniform on [0, n), rejection sampled
    const std::uint64_t bound = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
      x = engine();
    } while (x >= bound);
    return static_cast<int>(x % n);
  }
};

inline Vec haar_state(int d, Rng& rng) {
  Vec v(d);
  for (int i = 0; i < d; ++i) v[i] = cplx(rng.gauss(), rng.gauss());
  return v / v.norm();
}

inline Mat random_coefficient_table(int d, Rng& rng) {
  Mat c(d, d);
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n) c(m, n) = cplx(rng.gauss(), rng.gauss());
  return c / c.norm();
}

// Haar-distributed via QR of a Gaussian matrix with phase-fixed diagonal.
inline Mat random_unitary(int d, Rng& rng) {
  Mat g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = cplx(rng.gauss(), rng.gauss());
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i) {
    const cplx rii = r(i, i);
    q.col(i) *= std::abs(rii) > 0 ? rii / std::abs(rii) : cplx(1.0, 0.0);
  }
  return q;
}

}  // namespace qric
