#pragma once

#include "qric/channels.hpp"
#include "qric/tensor.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace qric {

struct PartitionReport {
  std::string cut;
  double min_pt_eigenvalue = 0.0;
  bool npt = false;
};

inline double min_eigenvalue(const Mat& rho) {
  Eigen::SelfAdjointEigenSolver<Mat> es(rho, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// Natural-log von Neumann entropy.
inline double von_neumann_entropy(const Mat& rho) {
  Eigen::SelfAdjointEigenSolver<Mat> es(rho, Eigen::EigenvaluesOnly);
  double h = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double lam = es.eigenvalues()[i];
    if (lam > 1e-15) h -= lam * std::log(lam);
  }
  return h;
}

inline PartitionReport ppt_single(const Mat& rho, int d, const Labels& first_side) {
  const Labels& all = channel_labels();
  std::string name;
  for (const auto& l : first_side) name += l;
  name += "|";
  for (const auto& l : all)
    if (std::find(first_side.begin(), first_side.end(), l) == first_side.end()) name += l;
  const Mat pt = partial_transpose(rho, d, all, first_side);
  const double lam = min_eigenvalue(pt);
  return {name, lam, lam < -1e-10};
}

// The three two-two cuts of a channel state on (3,4,5,6).
inline std::vector<PartitionReport> ppt_report(const Mat& rho, int d) {
  return {ppt_single(rho, d, {"3", "4"}), ppt_single(rho, d, {"3", "5"}),
          ppt_single(rho, d, {"3", "6"})};
}

struct SeparabilityReport {
  std::string cut;
  double residual = 0.0;
};

// Reconstructs the bound state as an explicit mixture of Bell-pair products
// across the requested cut and reports the reconstruction residual. The bound
// state is separable across {3,4}|{5,6} and {3,5}|{4,6}; the remaining cut has
// no such decomposition (it is NPT for d > 2).
inline SeparabilityReport separable_decomposition_check(int d, const Labels& first_side) {
  Mat mixture;
  std::string cut;
  if (first_side == Labels{"3", "4"}) {
    cut = "34|56";
    mixture = Mat::Zero(ipow(d, 4), ipow(d, 4));
    for (int m = 0; m < d; ++m)
      for (int n = 0; n < d; ++n) {
        const Vec left = bell_vec(m, n, d);
        const Vec right = bell_vec(mod(-m, d), n, d);
        Vec prod(left.size() * right.size());
        for (std::int64_t i = 0; i < left.size(); ++i)
          prod.segment(i * right.size(), right.size()) = left[i] * right;
        mixture.noalias() += prod * prod.adjoint();
      }
    mixture /= static_cast<double>(d * d);
  } else if (first_side == Labels{"3", "5"}) {
    cut = "35|46";
    mixture = bound_pair_mixture(d);
  } else {
    throw std::invalid_argument("no product decomposition across this cut");
  }
  return {cut, (bound_state(d) - mixture).cwiseAbs().maxCoeff()};
}

inline double permutation_residual(const Mat& rho, int d, const Labels& order) {
  return (rho - permute_density(rho, d, channel_labels(), order)).cwiseAbs().maxCoeff();
}

struct RankProfile {
  std::map<std::string, int> ranks;  // keyed by the first side of the cut
};

inline bool operator==(const RankProfile& a, const RankProfile& b) { return a.ranks == b.ranks; }

// Schmidt ranks across the seven bipartitions of a pure four-qudit state.
inline RankProfile rank_profile(const State& s, double tol = 1e-10) {
  static const std::vector<Labels> cuts{{"3"}, {"4"}, {"5"}, {"6"},
                                        {"3", "4"}, {"3", "5"}, {"3", "6"}};
  RankProfile p;
  for (const Labels& cut : cuts) {
    std::string key;
    for (const auto& l : cut) key += l;
    p.ranks[key] = schmidt_rank(s, cut, tol);
  }
  return p;
}

enum class Equivalence { Inequivalent, Inconclusive };

inline std::string to_string(Equivalence e) {
  return e == Equivalence::Inequivalent ? "INEQUIVALENT" : "INCONCLUSIVE";
}

// Differing rank profiles certify that no local unitaries map one state to the
// other. Matching profiles certify nothing.
inline Equivalence inequivalence_witness(const RankProfile& a, const RankProfile& b) {
  return a == b ? Equivalence::Inconclusive : Equivalence::Inequivalent;
}

}  // namespace qric
