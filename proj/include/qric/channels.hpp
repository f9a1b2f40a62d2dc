#pragma once

#include "qric/random.hpp"
#include "qric/telecloning.hpp"
#include "qric/tensor.hpp"
#include "qric/weyl.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <variant>

namespace qric {

// Four-qudit channel families on labels (3,4,5,6). A pure member is
//   sum_{m',n'} C_{m'n'} |B^{m',n'}>_{34} |B^{u-m', n'-v}>_{56}
// with the second pair's shift index locked to n' - v. This locking is what
// makes one Weyl correction on qudit 6 close every measurement branch; the
// mixed families below are correlated mixtures of the same components.

struct GeneralPure {
  Mat coefficients;  // C(m', n')
  int u = 0, v = 0;
};

struct Ghz {
  int c = 0;
};

struct TelecloningLike {
  double alpha = 0.0, beta = 0.0, gamma = 0.0;
};

struct DoubleBell {
  int m = 0, n = 0, u = 0, v = 0;
};

struct MixedCorrelated {
  Eigen::MatrixXd weights;  // |C_{m'n'}|^2
  int u = 0, v = 0;
};

struct BoundSmolinLike {};

using ChannelSpec =
    std::variant<GeneralPure, Ghz, TelecloningLike, DoubleBell, MixedCorrelated, BoundSmolinLike>;

inline const Labels& channel_labels() {
  static const Labels ls{"3", "4", "5", "6"};
  return ls;
}

inline std::string family_tag(const ChannelSpec& spec) {
  struct V {
    std::string operator()(const GeneralPure&) const { return "general_pure"; }
    std::string operator()(const Ghz&) const { return "ghz"; }
    std::string operator()(const TelecloningLike&) const { return "telecloning_like"; }
    std::string operator()(const DoubleBell&) const { return "double_bell"; }
    std::string operator()(const MixedCorrelated&) const { return "mixed_correlated"; }
    std::string operator()(const BoundSmolinLike&) const { return "bound_smolin_like"; }
  };
  return std::visit(V{}, spec);
}

inline bool is_mixed(const ChannelSpec& spec) {
  return std::holds_alternative<MixedCorrelated>(spec) ||
         std::holds_alternative<BoundSmolinLike>(spec);
}

inline std::pair<int, int> channel_offsets(const ChannelSpec& spec) {
  if (const auto* g = std::get_if<GeneralPure>(&spec)) return {g->u, g->v};
  if (const auto* b = std::get_if<DoubleBell>(&spec)) return {b->u, b->v};
  if (const auto* m = std::get_if<MixedCorrelated>(&spec)) return {m->u, m->v};
  return {0, 0};
}

inline void validate(const ChannelSpec& spec, int d) {
  if (d < 2) throw std::invalid_argument("dimension must be at least 2");
  auto check_offset = [d](int x, const char* name) {
    if (x < 0 || x >= d) throw std::invalid_argument(std::string(name) + " out of range");
  };
  if (const auto* g = std::get_if<GeneralPure>(&spec)) {
    if (g->coefficients.rows() != d || g->coefficients.cols() != d)
      throw std::invalid_argument("coefficient table must be d x d");
    if (std::abs(g->coefficients.squaredNorm() - 1.0) > 1e-9)
      throw std::invalid_argument("coefficient table must have unit norm");
    check_offset(g->u, "u");
    check_offset(g->v, "v");
  } else if (const auto* z = std::get_if<Ghz>(&spec)) {
    check_offset(z->c, "c");
  } else if (const auto* t = std::get_if<TelecloningLike>(&spec)) {
    const double n2 = t->alpha * t->alpha + (d - 1) * t->beta * t->beta +
                      static_cast<double>(d) * (d - 1) * t->gamma * t->gamma;
    if (std::abs(n2 - 1.0) > 1e-9)
      throw std::invalid_argument("telecloning coefficients must have unit norm");
  } else if (const auto* b = std::get_if<DoubleBell>(&spec)) {
    check_offset(b->m, "m");
    check_offset(b->n, "n");
    check_offset(b->u, "u");
    check_offset(b->v, "v");
  } else if (const auto* m = std::get_if<MixedCorrelated>(&spec)) {
    if (m->weights.rows() != d || m->weights.cols() != d)
      throw std::invalid_argument("weight table must be d x d");
    if (m->weights.minCoeff() < 0.0)
      throw std::invalid_argument("weights must be nonnegative");
    if (std::abs(m->weights.sum() - 1.0) > 1e-9)
      throw std::invalid_argument("weights must sum to one");
    check_offset(m->u, "u");
    check_offset(m->v, "v");
  }
}

inline State build_general_pure(const Mat& c, int u, int v, int d) {
  Vec total = Vec::Zero(ipow(d, 4));
  for (int mp = 0; mp < d; ++mp)
    for (int np = 0; np < d; ++np) {
      if (c(mp, np) == cplx(0.0, 0.0)) continue;
      const Vec b34 = bell_vec(mp, np, d);
      const Vec b56 = bell_vec(mod(u - mp, d), mod(np - v, d), d);
      for (std::int64_t i = 0; i < b34.size(); ++i)
        total.segment(i * b56.size(), b56.size()) += c(mp, np) * b34[i] * b56;
    }
  return State(d, channel_labels(), std::move(total));
}

inline Mat coefficients_of(const TelecloningLike& t, int d) {
  Mat c = Mat::Constant(d, d, t.gamma);
  c.col(0).setConstant(t.beta);
  c(0, 0) = t.alpha;
  return c;
}

inline TelecloningLike symmetric_telecloning_like(int d) {
  const CloneCoefficients cc = bell_coefficients(cloning_params(d, 0.5));
  return {cc.alpha, cc.beta, cc.gamma};
}

inline State build_pure(const ChannelSpec& spec, int d) {
  validate(spec, d);
  if (const auto* g = std::get_if<GeneralPure>(&spec))
    return build_general_pure(g->coefficients, g->u, g->v, d);
  if (const auto* z = std::get_if<Ghz>(&spec)) {
    Mat c = Mat::Zero(d, d);
    c.col(z->c).setConstant(1.0 / std::sqrt(static_cast<double>(d)));
    return build_general_pure(c, 0, 0, d);
  }
  if (const auto* t = std::get_if<TelecloningLike>(&spec))
    return build_general_pure(coefficients_of(*t, d), 0, 0, d);
  if (const auto* b = std::get_if<DoubleBell>(&spec)) {
    Mat c = Mat::Zero(d, d);
    c(b->m, b->n) = 1.0;
    return build_general_pure(c, b->u, b->v, d);
  }
  throw std::invalid_argument("channel family is not pure");
}

inline Eigen::MatrixXd uniform_weights(int d) {
  return Eigen::MatrixXd::Constant(d, d, 1.0 / (d * d));
}

inline Mat mixed_density(const Eigen::MatrixXd& w, int u, int v, int d) {
  Mat rho = Mat::Zero(ipow(d, 4), ipow(d, 4));
  for (int mp = 0; mp < d; ++mp)
    for (int np = 0; np < d; ++np) {
      if (w(mp, np) == 0.0) continue;
      Mat c = Mat::Zero(d, d);
      c(mp, np) = 1.0;
      const Vec t = build_general_pure(c, u, v, d).v;
      rho.noalias() += w(mp, np) * (t * t.adjoint());
    }
  return rho;
}

inline Mat bound_state(int d) { return mixed_density(uniform_weights(d), 0, 0, d); }

inline Mat build_density(const ChannelSpec& spec, int d) {
  validate(spec, d);
  if (const auto* m = std::get_if<MixedCorrelated>(&spec))
    return mixed_density(m->weights, m->u, m->v, d);
  if (std::holds_alternative<BoundSmolinLike>(spec)) return bound_state(d);
  return density(build_pure(spec, d));
}

// Purification on (3,4,5,6,X,Y) with coefficients +sqrt(W); tracing out (X,Y)
// reproduces the mixed channel.
inline State purify(const Eigen::MatrixXd& w, int u, int v, int d) {
  Vec total = Vec::Zero(ipow(d, 6));
  for (int mp = 0; mp < d; ++mp)
    for (int np = 0; np < d; ++np) {
      if (w(mp, np) == 0.0) continue;
      Mat c = Mat::Zero(d, d);
      c(mp, np) = 1.0;
      const Vec comp = build_general_pure(c, u, v, d).v;
      const Vec bxy = bell_vec(mp, np, d);
      const double amp = std::sqrt(w(mp, np));
      for (std::int64_t i = 0; i < comp.size(); ++i)
        total.segment(i * bxy.size(), bxy.size()) += amp * comp[i] * bxy;
    }
  Labels ls = channel_labels();
  ls.push_back("X");
  ls.push_back("Y");
  return State(d, std::move(ls), std::move(total));
}

inline State purify(const ChannelSpec& spec, int d) {
  validate(spec, d);
  if (const auto* m = std::get_if<MixedCorrelated>(&spec)) return purify(m->weights, m->u, m->v, d);
  if (std::holds_alternative<BoundSmolinLike>(spec)) return purify(uniform_weights(d), 0, 0, d);
  throw std::invalid_argument("purification applies to mixed channel families");
}

// Uniform mixture of {U^{m,n} on qudit 4, U^{-m,-n} on qudit 5} applied to
// |B^{0,0}>_{34} |B^{0,0}>_{56}. samples = 0 means the exact d^2-term mixture.
inline Mat build_bound_by_twirl(int d, std::uint64_t seed, int samples) {
  if (samples < 0) throw std::invalid_argument("sample count must be nonnegative");
  const State base =
      tensor(bell_state(0, 0, d, "3", "4"), bell_state(0, 0, d, "5", "6"));
  auto component = [&](int m, int n) {
    State s = apply_local(base, "4", weyl(m, n, d));
    s = apply_local(s, "5", weyl(mod(-m, d), mod(-n, d), d));
    return density(s);
  };
  Mat rho = Mat::Zero(ipow(d, 4), ipow(d, 4));
  if (samples == 0) {
    for (int m = 0; m < d; ++m)
      for (int n = 0; n < d; ++n) rho += component(m, n);
    return rho / static_cast<double>(d * d);
  }
  Rng rng(seed);
  for (int s = 0; s < samples; ++s) rho += component(rng.below(d), rng.below(d));
  return rho / static_cast<double>(samples);
}

// S^{jk} = U^{-j,k} x U^{j,k} x U^{j,k} x U^{-j,k} on (3,4,5,6). The factor
// signs pair qudit 3 with 6 and qudit 4 with 5; every channel family above is
// a +1 eigenstate at u = v = 0, and S^{jk} S^{j'k'} = S^{j+j', k+k'} exactly.
inline std::array<Mat, 4> stabilizer_factors(int j, int k, int d) {
  return {weyl(mod(-j, d), k, d), weyl(j, k, d), weyl(j, k, d), weyl(mod(-j, d), k, d)};
}

inline Mat stabilizer_matrix(int j, int k, int d) {
  const auto f = stabilizer_factors(j, k, d);
  Mat s = f[0];
  for (int i = 1; i < 4; ++i) {
    Mat next(s.rows() * d, s.cols() * d);
    for (Eigen::Index r = 0; r < s.rows(); ++r)
      for (Eigen::Index c = 0; c < s.cols(); ++c)
        next.block(r * d, c * d, d, d) = s(r, c) * f[i];
    s = std::move(next);
  }
  return s;
}

inline State apply_stabilizer(const State& s, int j, int k) {
  const auto f = stabilizer_factors(j, k, s.d);
  State out = apply_local(s, "3", f[0]);
  out = apply_local(out, "4", f[1]);
  out = apply_local(out, "5", f[2]);
  out = apply_local(out, "6", f[3]);
  return out;
}

inline Mat stabilizer_expectations(const State& channel, int d) {
  Mat table(d, d);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) table(j, k) = channel.v.dot(apply_stabilizer(channel, j, k).v);
  return table;
}

inline Mat stabilizer_expectations(const Mat& rho, int d) {
  Mat table(d, d);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) table(j, k) = (stabilizer_matrix(j, k, d) * rho).trace();
  return table;
}

inline Mat stabilizer_expectations(const ChannelSpec& spec, int d) {
  // Purifying qudits are untouched by the stabilizer, so the pure-state path
  // gives the mixed-state expectations directly.
  if (is_mixed(spec)) return stabilizer_expectations(purify(spec, d), d);
  return stabilizer_expectations(build_pure(spec, d), d);
}

// The bound state rewritten as Bell-pair products across the other separable
// split: sum_{a,b} |B^{a,b}>_{35} |B^{-a,b}>_{46} with uniform weights.
inline Mat bound_pair_mixture(int d) {
  Mat rho = Mat::Zero(ipow(d, 4), ipow(d, 4));
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      const State prod =
          tensor(bell_state(a, b, d, "3", "5"), bell_state(mod(-a, d), b, d, "4", "6"));
      const Vec w = permute(prod, channel_labels()).v;
      rho.noalias() += w * w.adjoint();
    }
  return rho / static_cast<double>(d * d);
}

inline double bound_symmetry_check(int d) {
  return (bound_state(d) - bound_pair_mixture(d)).cwiseAbs().maxCoeff();
}

}  // namespace qric
