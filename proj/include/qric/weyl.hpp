#pragma once

#include "qric/tensor.hpp"

#include <cmath>
#include <numbers>

namespace qric {

// omega^e for omega = exp(2 pi i / d), with the exponent reduced mod d first
// so phases stay exact for multiples of d, and quarter and half turns kept
// free of rounding noise.
inline cplx omega_pow(int d, long long e) {
  const long long r = ((e % d) + d) % d;
  if (r == 0) return {1.0, 0.0};
  if (2 * r == d) return {-1.0, 0.0};
  if (4 * r == d) return {0.0, 1.0};
  if (4 * r == 3 * d) return {0.0, -1.0};
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(r) / d;
  return {std::cos(angle), std::sin(angle)};
}

// U^{m,n} = sum_k omega^{km} |k+n><k|  (indices normalized into [0,d)).
inline Mat weyl(int m, int n, int d) {
  Mat u = Mat::Zero(d, d);
  for (int k = 0; k < d; ++k) u(mod(k + n, d), k) = omega_pow(d, static_cast<long long>(k) * m);
  return u;
}

// |B^{m,n}> = (1/sqrt d) sum_j omega^{jm} |j>|j+n>
inline Vec bell_vec(int m, int n, int d) {
  Vec b = Vec::Zero(static_cast<std::int64_t>(d) * d);
  const double s = 1.0 / std::sqrt(static_cast<double>(d));
  for (int j = 0; j < d; ++j)
    b[static_cast<std::int64_t>(j) * d + mod(j + n, d)] =
        s * omega_pow(d, static_cast<long long>(j) * m);
  return b;
}

inline State bell_state(int m, int n, int d, const std::string& la, const std::string& lb) {
  return State(d, {la, lb}, bell_vec(m, n, d));
}

inline Vec basis_vec(int j, int d) {
  Vec e = Vec::Zero(d);
  e[j] = 1.0;
  return e;
}

// Coefficients of |j>|k> = (1/sqrt d) sum_r omega^{-jr} |B^{r, k-j}>, as a
// table over (m, n).
inline Mat product_to_bell(int j, int k, int d) {
  Mat c = Mat::Zero(d, d);
  const double s = 1.0 / std::sqrt(static_cast<double>(d));
  for (int r = 0; r < d; ++r)
    c(r, mod(k - j, d)) = s * omega_pow(d, -static_cast<long long>(j) * r);
  return c;
}

inline double product_to_bell_residual(int j, int k, int d) {
  const Mat c = product_to_bell(j, k, d);
  Vec rhs = Vec::Zero(static_cast<std::int64_t>(d) * d);
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n)
      if (c(m, n) != cplx(0.0, 0.0)) rhs += c(m, n) * bell_vec(m, n, d);
  Vec lhs = Vec::Zero(rhs.size());
  lhs[static_cast<std::int64_t>(j) * d + k] = 1.0;
  return (lhs - rhs).norm();
}

// Entanglement swapping between two Bell pairs:
// |B^{m,n}>_{XY} |B^{m',n'}>_{X'Y'}
//   = (1/d) sum_{m'',n''} omega^{m''n''} |B^{m+m'',n'+n''}>_{XY'} |B^{m'-m'',n-n''}>_{X'Y}
inline double swap_identity_residual(int m, int n, int mp, int np, int d) {
  const Labels order{"X", "Y", "X'", "Y'"};
  const State lhs = tensor(bell_state(m, n, d, "X", "Y"), bell_state(mp, np, d, "X'", "Y'"));
  Vec rhs = Vec::Zero(lhs.v.size());
  for (int m2 = 0; m2 < d; ++m2)
    for (int n2 = 0; n2 < d; ++n2) {
      const State term = tensor(bell_state(mod(m + m2, d), mod(np + n2, d), d, "X", "Y'"),
                                bell_state(mod(mp - m2, d), mod(n - n2, d), d, "X'", "Y"));
      rhs += omega_pow(d, static_cast<long long>(m2) * n2) * permute(term, order).v;
    }
  rhs /= static_cast<double>(d);
  return (permute(lhs, order).v - rhs).norm();
}

}  // namespace qric
