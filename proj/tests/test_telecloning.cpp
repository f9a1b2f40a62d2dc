#include "catch2/catch_amalgamated.hpp"

#include "qric/random.hpp"
#include "qric/telecloning.hpp"

#include <cmath>

using namespace qric;

namespace {

double overlap2(const State& a, const State& b) {
  return std::norm(permute(a, b.labels).v.dot(b.v));
}

}  // namespace

TEST_CASE("cloning parameters") {
  CHECK_THROWS(cloning_params(2, -0.1));
  CHECK_THROWS(cloning_params(2, 1.1));
  CHECK_THROWS(cloning_params(1, 0.5));
  const CloningParams cp = cloning_params(3, 0.7);
  CHECK(std::abs(cp.q - 0.3) < 1e-15);
  const double want = 1.0 / std::sqrt(1.0 + 2.0 * (0.49 + 0.09));
  CHECK(std::abs(cp.norm - want) < 1e-15);
}

TEST_CASE("clone states are normalized and linear") {
  for (int d : {2, 3, 5})
    for (double p : {0.5, 0.7, 1.0}) {
      const CloningParams cp = cloning_params(d, p);
      Rng rng(100 + d);
      const Vec phi = haar_state(d, rng);
      CHECK(std::abs(clone_state(phi, cp).v.norm() - 1.0) < 1e-12);
    }
  const CloningParams cp = cloning_params(3, 0.7);
  Rng rng(321);
  const Vec phi = haar_state(3, rng);
  Vec expect = Vec::Zero(27);
  for (int j = 0; j < 3; ++j) expect += phi[j] * clone_basis_state(j, cp).v;
  CHECK((clone_state(phi, cp).v - expect).norm() < 1e-12);
}

TEST_CASE("channel state reduces to a maximally mixed port") {
  for (int d : {2, 3}) {
    const State ch = telecloning_channel(cloning_params(d, 0.6));
    CHECK(std::abs(ch.v.norm() - 1.0) < 1e-12);
    const Mat port = partial_trace(density(ch), d, ch.labels, {"t'"}).first;
    CHECK((port - Mat::Identity(d, d) / d).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("distribution over the channel recovers the clone state on every branch") {
  for (int d : {2, 3}) {
    const CloningParams cp = cloning_params(d, 0.7);
    Rng rng(7 * d);
    const Vec phi = haar_state(d, rng);
    const State reference = clone_state(phi, cp);
    const auto branches = distribute(phi, cp);
    REQUIRE(branches.size() == static_cast<std::size_t>(d * d));
    double total = 0.0;
    for (const DistributionBranch& br : branches) {
      total += br.prob;
      CHECK(std::abs(br.prob - 1.0 / (d * d)) < 1e-10);
      CHECK(overlap2(br.post, reference) > 1.0 - 1e-10);
    }
    CHECK(std::abs(total - 1.0) < 1e-10);
  }
}

TEST_CASE("clone fidelities") {
  SECTION("symmetric point") {
    for (int d : {2, 3, 5}) {
      Rng rng(d);
      const auto [f1, f2] = clone_fidelities(haar_state(d, rng), cloning_params(d, 0.5));
      const double want = (d + 3.0) / (2.0 * (d + 1.0));
      CHECK(std::abs(f1 - want) < 1e-10);
      CHECK(std::abs(f2 - want) < 1e-10);
    }
  }
  SECTION("asymmetric point, d=2") {
    Rng rng(40);
    const auto [f1, f2] = clone_fidelities(haar_state(2, rng), cloning_params(2, 0.7));
    CHECK(std::abs(f1 - 0.9430379747) < 1e-9);
    CHECK(std::abs(f2 - 0.6898734177) < 1e-9);
  }
  SECTION("keep-everything limit") {
    for (int d : {2, 3, 5}) {
      Rng rng(50 + d);
      const auto [f1, f2] = clone_fidelities(haar_state(d, rng), cloning_params(d, 1.0));
      CHECK(std::abs(f1 - 1.0) < 1e-10);
      CHECK(std::abs(f2 - 1.0 / d) < 1e-10);
    }
  }
  SECTION("universality over random inputs") {
    for (int d : {2, 3, 5})
      for (double p : {0.5, 0.7, 1.0}) {
        const CloningParams cp = cloning_params(d, p);
        Rng rng(1000 + d);
        const auto [ref1, ref2] = clone_fidelities(haar_state(d, rng), cp);
        double dev = 0.0;
        for (int t = 0; t < 49; ++t) {
          const auto [f1, f2] = clone_fidelities(haar_state(d, rng), cp);
          dev = std::max({dev, std::abs(f1 - ref1), std::abs(f2 - ref2)});
        }
        CHECK(dev < 1e-10);
      }
  }
}

TEST_CASE("Bell-basis coefficients of the clone state") {
  SECTION("qubit symmetric values") {
    const CloneCoefficients cc = bell_coefficients(cloning_params(2, 0.5));
    CHECK(std::abs(cc.alpha - std::sqrt(3.0) / 2.0) < 1e-12);
    CHECK(std::abs(cc.beta - 0.5 / std::sqrt(3.0)) < 1e-12);
    CHECK(std::abs(cc.gamma - 0.5 / std::sqrt(3.0)) < 1e-12);
  }
  SECTION("normalization identity") {
    for (int d : {2, 3, 5})
      for (double p : {0.3, 0.5, 0.9}) {
        const CloneCoefficients cc = bell_coefficients(cloning_params(d, p));
        const double n2 = cc.alpha * cc.alpha + (d - 1) * cc.beta * cc.beta +
                          static_cast<double>(d) * (d - 1) * cc.gamma * cc.gamma;
        CHECK(std::abs(n2 - 1.0) < 1e-12);
      }
  }
  SECTION("keep-everything limit collapses to one component") {
    const CloneCoefficients cc = bell_coefficients(cloning_params(3, 1.0));
    CHECK(std::abs(cc.alpha - 1.0) < 1e-12);
    CHECK(std::abs(cc.beta) < 1e-12);
    CHECK(std::abs(cc.gamma) < 1e-12);
  }
}

TEST_CASE("Bell expansion of the clone state") {
  SECTION("direct pair") {
    for (int d : {2, 3}) {
      const ExpansionResult er = expansion_check(cloning_params(d, 0.7), ExpansionPair::pair_2a);
      CHECK(er.residual < 1e-10);
      CHECK(er.input_dependence < 1e-10);
      CHECK_FALSE(er.swapped);
      const CloneCoefficients cc = bell_coefficients(cloning_params(d, 0.7));
      CHECK(std::abs(er.table(0, 0) - cc.alpha) < 1e-10);
      if (d > 1) CHECK(std::abs(er.table(1, 0) - cc.beta) < 1e-10);
      CHECK(std::abs(er.table(0, 1) - cc.gamma) < 1e-10);
    }
  }
  SECTION("other pair swaps the clone weights") {
    const ExpansionResult er = expansion_check(cloning_params(3, 0.7), ExpansionPair::pair_1a);
    CHECK(er.residual < 1e-10);
    CHECK(er.swapped);
    const CloneCoefficients flipped = bell_coefficients(cloning_params(3, 0.3));
    CHECK(std::abs(er.table(0, 0) - flipped.alpha) < 1e-10);
  }
  SECTION("keep-everything limit") {
    const ExpansionResult direct = expansion_check(cloning_params(2, 1.0), ExpansionPair::pair_2a);
    CHECK(std::abs(direct.table(0, 0) - 1.0) < 1e-10);
    const ExpansionResult other = expansion_check(cloning_params(2, 1.0), ExpansionPair::pair_1a);
    for (int m = 0; m < 2; ++m)
      for (int n = 0; n < 2; ++n) CHECK(std::abs(std::abs(other.table(m, n)) - 0.5) < 1e-10);
  }
}

TEST_CASE("outcome statistics on the clone pair") {
  Vec zero2 = basis_vec(0, 2), plus2 = Vec::Zero(2);
  plus2[0] = plus2[1] = 1.0 / std::sqrt(2.0);
  Vec zero3 = basis_vec(0, 3), plus3 = Vec::Zero(3);
  plus3[0] = plus3[1] = 1.0 / std::sqrt(2.0);

  SECTION("input-independent for qubits") {
    Rng rng(77);
    const WitnessReport rep = inequality_witness(cloning_params(2, 0.5),
                                                 {zero2, plus2, haar_state(2, rng)});
    CHECK(rep.max_variation < 1e-10);
    for (const auto& t : rep.tables) CHECK(std::abs(t.sum() - 1.0) < 1e-10);
  }
  SECTION("input-dependent beyond qubits") {
    const WitnessReport rep = inequality_witness(cloning_params(3, 0.5), {zero3, plus3});
    CHECK(rep.max_variation > 1e-3);
    for (const auto& t : rep.tables) CHECK(std::abs(t.sum() - 1.0) < 1e-10);
  }
  SECTION("input validation") {
    CHECK_THROWS(inequality_witness(cloning_params(2, 0.5), {zero2}));
  }
}
