#include "catch2/catch_amalgamated.hpp"

#include "qric/protocol.hpp"
#include "qric/random.hpp"

#include <map>

using namespace qric;

namespace {

GeneralPure random_general(int d, std::uint64_t seed, int u = 0, int v = 0) {
  Rng rng(seed);
  return {random_coefficient_table(d, rng), u, v};
}

double best_weyl_fidelity(const Mat& rho6, const Vec& phi, int d) {
  double best = 0.0;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      const Mat w = weyl(a, b, d);
      best = std::max(best, (phi.adjoint() * w * rho6 * w.adjoint() * phi).real().value());
    }
  return best;
}

}  // namespace

TEST_CASE("assignments") {
  CHECK(all_assignments().size() == 6);
  const Assignment f1 = parse_assignment("fig1");
  CHECK(f1.holder == std::array<Party, 3>{Party::Alice, Party::Bob, Party::Charlie});
  const Assignment code = parse_assignment("acb");
  CHECK(code.tag == "custom:acb");
  CHECK(code.holder == std::array<Party, 3>{Party::Alice, Party::Charlie, Party::Bob});
  CHECK_THROWS(parse_assignment("xyz"));
  CHECK_THROWS(parse_assignment("aab"));
  CHECK_THROWS(parse_assignment("fig9"));
  CHECK(clone_label(Party::Alice) == "a");
  CHECK(clone_label(Party::Bob) == "1");
  CHECK(clone_label(Party::Charlie) == "2");
  CHECK_THROWS(clone_label(Party::Diana));
}

TEST_CASE("measurement pairing puts the channel qudit first only for qudit 3") {
  const auto pairs = measurement_pairs(parse_assignment("fig1"));
  CHECK(pairs[0].first == "3");
  CHECK(pairs[0].second == "a");
  CHECK(pairs[1].first == "1");
  CHECK(pairs[1].second == "4");
  CHECK(pairs[2].first == "2");
  CHECK(pairs[2].second == "5");

  const auto p3 = measurement_pairs(parse_assignment("fig3"));
  CHECK(p3[0].first == "3");
  CHECK(p3[0].second == "1");
  CHECK(p3[1].second == "4");
  CHECK(p3[1].first == "2");
  CHECK(p3[2].first == "a");
  CHECK(p3[2].second == "5");
}

TEST_CASE("input validation") {
  const int d = 2;
  Rng rng(3);
  const Vec phi = haar_state(d, rng);
  const State clone = clone_state(phi, cloning_params(d, 0.5));
  const State channel = build_pure(Ghz{0}, d);
  const Assignment assign = parse_assignment("fig1");

  State bad_labels = channel;
  bad_labels.labels = {"3", "4", "5", "7"};
  CHECK_THROWS(run_ric(clone, bad_labels, assign, 0, 0, phi));

  State unnorm = channel;
  unnorm.v *= 2.0;
  CHECK_THROWS(run_ric(clone, unnorm, assign, 0, 0, phi));

  CHECK_THROWS(run_ric(clone, channel, assign, 0, 0, Vec::Ones(d)));
  RicOptions bad;
  bad.enumerate = false;
  bad.samples = 0;
  CHECK_THROWS(run_ric(clone, channel, assign, 0, 0, phi, bad));
}

TEST_CASE("enumeration recovers the input on every branch") {
  SECTION("qubit GHZ channel") {
    const int d = 2;
    Rng rng(8);
    const Vec phi = haar_state(d, rng);
    const auto ts = run_ric(phi, 0.5, Ghz{0}, parse_assignment("fig1"), d);
    CHECK(ts.size() <= 64);
    double total = 0.0;
    for (const Transcript& t : ts) {
      CHECK(t.fidelity > 1.0 - 1e-10);
      total += t.prob;
    }
    CHECK(std::abs(total - 1.0) < 1e-10);
  }
  SECTION("qutrit random channel with offsets, second assignment") {
    const int d = 3;
    Rng rng(9);
    const Vec phi = haar_state(d, rng);
    const auto ts = run_ric(phi, 0.5, random_general(d, 14, 1, 2), parse_assignment("fig2"), d);
    double total = 0.0;
    for (const Transcript& t : ts) {
      CHECK(t.fidelity > 1.0 - 1e-10);
      CHECK(t.m_final == mod(t.u_second + t.u_prime - 1, d));
      CHECK(t.n_final == mod(t.v_second + t.v_prime - 2, d));
      total += t.prob;
    }
    CHECK(std::abs(total - 1.0) < 1e-10);
  }
  SECTION("all-zero outcomes need no correction") {
    const int d = 3;
    Rng rng(10);
    const Vec phi = haar_state(d, rng);
    const auto ts = run_ric(phi, 0.5, DoubleBell{0, 0, 0, 0}, parse_assignment("fig1"), d);
    bool found = false;
    for (const Transcript& t : ts) {
      bool all_zero = true;
      for (const Measurement& m : t.measurements) all_zero = all_zero && m.m == 0 && m.n == 0;
      if (!all_zero) continue;
      found = true;
      CHECK(t.corr_m == 0);
      CHECK(t.corr_n == 0);
      CHECK(t.corr_phase == 0);
      CHECK(t.fidelity > 1.0 - 1e-10);
    }
    CHECK(found);
  }
}

TEST_CASE("third assignment fails for a generic qutrit channel") {
  const int d = 3;
  Rng rng(11);
  const Vec phi = haar_state(d, rng);
  const auto ts = run_ric(phi, 0.5, random_general(d, 15), parse_assignment("fig3"), d);
  int unrecoverable = 0;
  for (const Transcript& t : ts)
    if (best_weyl_fidelity(t.rho6, phi, d) <= 1.0 - 1e-6) ++unrecoverable;
  CHECK(unrecoverable > 0);
}

TEST_CASE("applied correction matches the recorded fidelity") {
  const int d = 3;
  Rng rng(12);
  const Vec phi = haar_state(d, rng);
  for (const Transcript& t : run_ric(phi, 0.5, random_general(d, 16, 2, 1), parse_assignment("fig1"), d)) {
    const Mat w = weyl(t.corr_m, t.corr_n, d);
    const double fid = (phi.adjoint() * w * t.rho6 * w.adjoint() * phi).real().value();
    CHECK(std::abs(fid - t.fidelity) < 1e-12);
    CHECK(t.corr_n == mod(-t.n_final, d));
    CHECK(t.corr_phase == mod(-t.m_final * t.n_final, d));
  }
}

TEST_CASE("mixed channels run through their purification") {
  const int d = 2;
  Rng rng(13);
  const Vec phi = haar_state(d, rng);

  SECTION("bound channel still concentrates perfectly") {
    for (const char* tag : {"fig1", "fig2"}) {
      const auto ts = run_ric(phi, 0.5, BoundSmolinLike{}, parse_assignment(tag), d);
      double total = 0.0;
      for (const Transcript& t : ts) {
        CHECK(t.fidelity > 1.0 - 1e-10);
        total += t.prob;
      }
      CHECK(std::abs(total - 1.0) < 1e-10);
    }
  }
  SECTION("branch statistics equal the weighted pure-component statistics") {
    Rng wr(14);
    Eigen::MatrixXd w(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) w(i, j) = wr.uniform();
    w /= w.sum();
    const int u = 1, v = 0;

    std::map<std::string, double> probs;
    std::map<std::string, Mat> weighted;
    for (int m = 0; m < d; ++m)
      for (int n = 0; n < d; ++n) {
        if (w(m, n) == 0.0) continue;
        for (const Transcript& t : run_ric(phi, 0.5, DoubleBell{m, n, u, v},
                                           parse_assignment("fig1"), d)) {
          const std::string key = outcome_key(t);
          probs[key] += w(m, n) * t.prob;
          auto it = weighted.find(key);
          if (it == weighted.end())
            weighted.emplace(key, Mat(w(m, n) * t.prob * t.rho6));
          else
            it->second += w(m, n) * t.prob * t.rho6;
        }
      }

    const auto ts = run_ric(phi, 0.5, MixedCorrelated{w, u, v}, parse_assignment("fig1"), d);
    for (const Transcript& t : ts) {
      const std::string key = outcome_key(t);
      REQUIRE(probs.count(key));
      CHECK(std::abs(t.prob - probs[key]) < 1e-10);
      CHECK((t.prob * t.rho6 - weighted[key]).cwiseAbs().maxCoeff() < 1e-10);
    }
    CHECK(ts.size() == probs.size());
  }
}

TEST_CASE("measurement order does not matter") {
  for (int d : {2, 3}) {
    Rng rng(20 + d);
    const Vec phi = haar_state(d, rng);
    const ChannelSpec spec = random_general(d, 30 + d, 1 % d, 0);

    RicOptions forward;
    RicOptions backward;
    backward.level_order = {2, 1, 0};
    std::map<std::string, Transcript> a, b;
    for (Transcript& t : run_ric(phi, 0.5, spec, parse_assignment("fig1"), d, forward))
      a.emplace(outcome_key(t), std::move(t));
    for (Transcript& t : run_ric(phi, 0.5, spec, parse_assignment("fig1"), d, backward))
      b.emplace(outcome_key(t), std::move(t));

    REQUIRE(a.size() == b.size());
    for (const auto& [key, ta] : a) {
      REQUIRE(b.count(key));
      CHECK(std::abs(ta.prob - b[key].prob) < 1e-10);
      CHECK(std::abs(ta.fidelity - b[key].fidelity) < 1e-10);
      CHECK((ta.rho6 - b[key].rho6).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("sampling mode") {
  const int d = 3;
  Rng rng(44);
  const Vec phi = haar_state(d, rng);
  const ChannelSpec spec = Ghz{1};

  std::map<std::string, Transcript> enumerated;
  for (Transcript& t : run_ric(phi, 0.5, spec, parse_assignment("fig1"), d))
    enumerated.emplace(outcome_key(t), std::move(t));

  RicOptions opts;
  opts.enumerate = false;
  opts.samples = 60;
  opts.seed = 99;
  const auto sampled = run_ric(phi, 0.5, spec, parse_assignment("fig1"), d, opts);
  REQUIRE(sampled.size() == 60);
  for (const Transcript& t : sampled) {
    const auto it = enumerated.find(outcome_key(t));
    REQUIRE(it != enumerated.end());
    CHECK(std::abs(t.prob - it->second.prob) < 1e-10);
    CHECK(std::abs(t.fidelity - it->second.fidelity) < 1e-10);
  }

  const auto again = run_ric(phi, 0.5, spec, parse_assignment("fig1"), d, opts);
  REQUIRE(again.size() == sampled.size());
  for (std::size_t i = 0; i < again.size(); ++i)
    CHECK(outcome_key(again[i]) == outcome_key(sampled[i]));
}

TEST_CASE("correction search") {
  SECTION("qubits always admit a unique correction") {
    const CorrectionSearchReport rep =
        correction_search(random_general(2, 71), 2, parse_assignment("fig3"));
    CHECK(rep.all_covered);
    CHECK(rep.all_unique);
  }
  SECTION("search verdict matches the deduced correction") {
    const int d = 2;
    const ChannelSpec spec = random_general(d, 72, 1, 1);
    const CorrectionSearchReport rep = correction_search(spec, d, parse_assignment("fig1"));
    REQUIRE(rep.all_unique);
    std::map<std::string, std::pair<int, int>> expected;
    Rng crng(20260819);
    const Vec phi0 = haar_state(d, crng);
    for (const Transcript& t : run_ric(phi0, 0.5, spec, parse_assignment("fig1"), d))
      expected[outcome_key(t)] = {t.corr_m, t.corr_n};
    for (const OutcomeCorrections& oc : rep.outcomes) {
      std::string key;
      for (int x : oc.outcomes) key += std::to_string(x);
      REQUIRE(expected.count(key));
      CHECK(oc.working.front() == expected[key]);
    }
  }
  SECTION("input count validation") {
    CHECK_THROWS(correction_search(Ghz{0}, 2, parse_assignment("fig1"), 2));
  }
}

TEST_CASE("assignment search across channel families") {
  SECTION("generic qutrit channel works only with qudit 3 at the sender") {
    const auto results = search_distributions(random_general(3, 81, 1, 2), 3);
    REQUIRE(results.size() == 6);
    for (const AssignmentSearchResult& r : results) {
      const bool expect = r.assignment == "fig1" || r.assignment == "fig2";
      CHECK(r.works == expect);
      if (!expect) CHECK(r.failing_outcomes > 0);
    }
  }
  SECTION("GHZ channels work with every assignment") {
    for (const AssignmentSearchResult& r : search_distributions(Ghz{1}, 3))
      CHECK(r.works);
  }
  SECTION("qubit channels work with every assignment") {
    for (const AssignmentSearchResult& r : search_distributions(random_general(2, 82), 2))
      CHECK(r.works);
  }
}

TEST_CASE("unlocking the bound state") {
  for (int d : {2, 3}) {
    const Mat rho = bound_state(d);
    for (const auto& join : {std::pair<std::string, std::string>{"3", "4"},
                             std::pair<std::string, std::string>{"3", "5"}}) {
      const auto branches = unlock_bound(rho, d, join);
      REQUIRE(branches.size() == static_cast<std::size_t>(d * d));
      double total = 0.0;
      for (const UnlockBranch& br : branches) {
        total += br.prob;
        CHECK(std::abs(br.prob - 1.0 / (d * d)) < 1e-10);
        Eigen::SelfAdjointEigenSolver<Mat> es(br.conditional, Eigen::EigenvaluesOnly);
        CHECK(es.eigenvalues().maxCoeff() > 1.0 - 1e-10);  // conditional state is pure
      }
      CHECK(std::abs(total - 1.0) < 1e-10);
    }
  }
  CHECK_THROWS(unlock_bound(bound_state(2), 2, {"3", "6"}));
  CHECK_THROWS(unlock_bound(bound_state(2), 2, {"4", "5"}));

  // Joining (3,6) merely filters the mixture at odd d.
  const auto b36 = conditional_after_bell(bound_state(3), 3, {"3", "6"});
  for (const UnlockBranch& br : b36) {
    if (br.prob <= 1e-12) continue;
    Eigen::SelfAdjointEigenSolver<Mat> es(br.conditional, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().maxCoeff() < 1.0 / 3 + 1e-10);
  }
}

TEST_CASE("classical messages") {
  CHECK(outcome_bits(2) == 2);
  CHECK(outcome_bits(3) == 4);
  CHECK(outcome_bits(5) == 5);
  CHECK(outcome_bits(7) == 6);

  const int d = 3;
  Rng rng(5);
  const Vec phi = haar_state(d, rng);
  const auto ts = run_ric(phi, 0.5, Ghz{0}, parse_assignment("fig2"), d);
  REQUIRE_FALSE(ts.empty());
  const auto log = message_log(ts.front(), d);
  REQUIRE(log.size() == 3);
  int total = 0;
  for (const ClassicalMessage& m : log) {
    CHECK(m.to == Party::Diana);
    CHECK(m.bits == 4);
    total += m.bits;
  }
  CHECK(total == 12);
  // Senders are the three measuring parties.
  CHECK(log[0].from == Party::Alice);
  CHECK(log[1].from == Party::Charlie);
  CHECK(log[2].from == Party::Bob);
}

TEST_CASE("full pipeline") {
  SECTION("qubit GHZ, full enumeration") {
    const int d = 2;
    Rng rng(61);
    const Vec phi = haar_state(d, rng);
    const auto branches = end_to_end(phi, 0.5, Ghz{0}, parse_assignment("fig1"), d);
    REQUIRE(branches.size() == 4);
    for (const EndToEndBranch& br : branches) {
      CHECK(std::abs(br.tprob - 0.25) < 1e-10);
      double total = 0.0;
      for (const Transcript& t : br.transcripts) {
        CHECK(t.fidelity > 1.0 - 1e-10);
        total += t.prob;
      }
      CHECK(std::abs(total - 1.0) < 1e-10);
    }
  }
  SECTION("qutrit telecloning channel, sampled") {
    const int d = 3;
    Rng rng(62);
    const Vec phi = haar_state(d, rng);
    RicOptions opts;
    opts.enumerate = false;
    opts.samples = 25;
    opts.seed = 7;
    const auto branches =
        end_to_end(phi, 0.7, symmetric_telecloning_like(d), parse_assignment("fig1"), d, opts);
    REQUIRE(branches.size() == 9);
    int count = 0;
    for (const EndToEndBranch& br : branches)
      for (const Transcript& t : br.transcripts) {
        CHECK(t.fidelity > 1.0 - 1e-9);
        ++count;
      }
    CHECK(count == 9 * 25);
  }
}
