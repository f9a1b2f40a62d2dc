#pragma once

#include "qric/random.hpp"
#include "qric/tensor.hpp"
#include "qric/weyl.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace qric {

struct CloningParams {
  int d = 2;
  double p = 0.5;
  double q = 0.5;
  double norm = 0.0;  // 1/sqrt(1 + (d-1)(p^2 + q^2))
};

inline CloningParams cloning_params(int d, double p) {
  if (d < 2) throw std::invalid_argument("dimension must be at least 2");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("p must lie in [0,1]");
  CloningParams cp;
  cp.d = d;
  cp.p = p;
  cp.q = 1.0 - p;
  cp.norm = 1.0 / std::sqrt(1.0 + (d - 1) * (cp.p * cp.p + cp.q * cp.q));
  return cp;
}

// |phi_j> = Q [ |jjj> + sum_{r=1}^{d-1} (p |j>|j+r> + q |j+r>|j>) |j+r>_a ]
// on labels (1, 2, a). These are orthonormal for any p.
inline State clone_basis_state(int j, const CloningParams& cp) {
  const int d = cp.d;
  Vec v = Vec::Zero(ipow(d, 3));
  auto at = [d](int i1, int i2, int ia) {
    return (static_cast<std::int64_t>(i1) * d + i2) * d + ia;
  };
  v[at(j, j, j)] = cp.norm;
  for (int r = 1; r < d; ++r) {
    const int jr = mod(j + r, d);
    v[at(j, jr, jr)] += cp.norm * cp.p;
    v[at(jr, j, jr)] += cp.norm * cp.q;
  }
  return State(d, {"1", "2", "a"}, std::move(v));
}

inline State clone_state(const Vec& phi, const CloningParams& cp) {
  if (phi.size() != cp.d) throw std::invalid_argument("input state has wrong dimension");
  Vec v = Vec::Zero(ipow(cp.d, 3));
  for (int j = 0; j < cp.d; ++j) v += phi[j] * clone_basis_state(j, cp).v;
  return State(cp.d, {"1", "2", "a"}, std::move(v));
}

// (1/sqrt d) sum_j |j>_t' |phi_j>_{12a}
inline State telecloning_channel(const CloningParams& cp) {
  const int d = cp.d;
  Vec v = Vec::Zero(ipow(d, 4));
  const double s = 1.0 / std::sqrt(static_cast<double>(d));
  for (int j = 0; j < d; ++j) {
    const Vec pj = clone_basis_state(j, cp).v;
    v.segment(static_cast<std::int64_t>(j) * pj.size(), pj.size()) = s * pj;
  }
  return State(d, {"t'", "1", "2", "a"}, std::move(v));
}

struct DistributionBranch {
  int m = 0, n = 0;
  double prob = 0.0;
  State post;  // on (1, 2, a), corrections already applied
};

// Bell measurement on (t, t') for every outcome, followed by the local
// corrections U^{m,-n} on qudits 1 and 2 and U^{-m,-n} on qudit a.
inline std::vector<DistributionBranch> distribute(const Vec& phi, const CloningParams& cp) {
  const int d = cp.d;
  const State global = tensor(State(d, {"t"}, phi), telecloning_channel(cp));
  std::vector<DistributionBranch> out;
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n) {
      Projection pr = project(global, {"t", "t'"}, bell_vec(m, n, d));
      if (!pr.kept) continue;
      State s = apply_local(pr.rest, "1", weyl(m, mod(-n, d), d));
      s = apply_local(s, "2", weyl(m, mod(-n, d), d));
      s = apply_local(s, "a", weyl(mod(-m, d), mod(-n, d), d));
      out.push_back({m, n, pr.prob, permute(s, {"1", "2", "a"})});
    }
  return out;
}

// Reduced-state fidelities <phi|rho_1|phi>, <phi|rho_2|phi> of the two clones.
inline std::pair<double, double> clone_fidelities(const Vec& phi, const CloningParams& cp) {
  const State cs = clone_state(phi, cp);
  const Mat rho = density(cs);
  const Mat r1 = partial_trace(rho, cp.d, cs.labels, {"1"}).first;
  const Mat r2 = partial_trace(rho, cp.d, cs.labels, {"2"}).first;
  return {std::real(phi.dot(r1 * phi)), std::real(phi.dot(r2 * phi))};
}

struct CloneCoefficients {
  double alpha = 0.0;  // Bell component (0,0)
  double beta = 0.0;   // components (m!=0, 0)
  double gamma = 0.0;  // components with n != 0
};

inline CloneCoefficients bell_coefficients(const CloningParams& cp) {
  const double sd = std::sqrt(static_cast<double>(cp.d));
  return {cp.norm * (1.0 + (cp.d - 1) * cp.p) / sd, cp.norm * (1.0 - cp.p) / sd,
          cp.norm * cp.q / sd};
}

enum class ExpansionPair { pair_1a, pair_2a };

struct ExpansionResult {
  Mat table;                       // coefficient c_{m,n} in front of |B^{m,n}>_pair
  double residual = 0.0;           // worst reconstruction error over test inputs
  double input_dependence = 0.0;   // worst spread of c_{m,n} across test inputs
  bool swapped = false;            // true when the p<->q form fits, not the direct one
};

// Expands clone_state over the Bell basis of the chosen pair,
//   |psi> = sum_{m,n} c_{m,n} |B^{m,n}>_pair  U^{-m,n}|phi>_partner.
// For pair (2,a) the coefficients match bell_coefficients directly; for pair
// (1,a) they match with p and q interchanged.
inline ExpansionResult expansion_check(const CloningParams& cp, ExpansionPair which) {
  const int d = cp.d;
  const std::string partner = which == ExpansionPair::pair_2a ? "1" : "2";
  const Labels pair = which == ExpansionPair::pair_2a ? Labels{"2", "a"} : Labels{"1", "a"};
  Rng rng(8141);
  ExpansionResult res;
  res.table = Mat::Zero(d, d);
  Labels order = pair;
  order.push_back(partner);
  for (int trial = 0; trial < 4; ++trial) {
    const Vec phi = haar_state(d, rng);
    const State sp = permute(clone_state(phi, cp), order);
    for (int m = 0; m < d; ++m)
      for (int n = 0; n < d; ++n) {
        const Vec b = bell_vec(m, n, d);
        Vec comp = Vec::Zero(d);
        for (int r = 0; r < d * d; ++r)
          comp += std::conj(b[r]) * sp.v.segment(static_cast<std::int64_t>(r) * d, d);
        const Vec ref = weyl(mod(-m, d), n, d) * phi;
        const cplx c = ref.dot(comp);  // conjugate-linear in ref
        res.residual = std::max(res.residual, (comp - c * ref).norm());
        if (trial == 0)
          res.table(m, n) = c;
        else
          res.input_dependence = std::max(res.input_dependence, std::abs(res.table(m, n) - c));
      }
  }
  const CloneCoefficients direct = bell_coefficients(cp);
  const CloneCoefficients flipped = bell_coefficients(cloning_params(d, cp.q));
  auto deviation = [&](const CloneCoefficients& cc) {
    double dev = 0.0;
    for (int m = 0; m < d; ++m)
      for (int n = 0; n < d; ++n) {
        const double want = (m == 0 && n == 0) ? cc.alpha : (n == 0 ? cc.beta : cc.gamma);
        dev = std::max(dev, std::abs(res.table(m, n) - want));
      }
    return dev;
  };
  res.swapped = deviation(flipped) < deviation(direct);
  return res;
}

struct WitnessReport {
  std::vector<Eigen::MatrixXd> tables;  // one d x d outcome-probability table per input
  double max_variation = 0.0;
};

// Bell-measurement outcome probabilities on the clone pair (1,2). For qubits
// these are input-independent; for d > 2 they are not.
inline WitnessReport inequality_witness(const CloningParams& cp, const std::vector<Vec>& inputs) {
  if (inputs.size() < 2) throw std::invalid_argument("need at least two input states");
  const int d = cp.d;
  WitnessReport rep;
  for (const Vec& phi : inputs) {
    const State cs = clone_state(phi, cp);
    Eigen::MatrixXd t(d, d);
    for (int m = 0; m < d; ++m)
      for (int n = 0; n < d; ++n) t(m, n) = project(cs, {"1", "2"}, bell_vec(m, n, d)).prob;
    rep.tables.push_back(std::move(t));
  }
  for (std::size_t i = 1; i < rep.tables.size(); ++i)
    rep.max_variation =
        std::max(rep.max_variation, (rep.tables[i] - rep.tables[0]).cwiseAbs().maxCoeff());
  return rep;
}

}  // namespace qric
