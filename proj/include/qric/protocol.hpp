#pragma once

#include "qric/channels.hpp"
#include "qric/random.hpp"
#include "qric/telecloning.hpp"
#include "qric/tensor.hpp"
#include "qric/weyl.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qric {

enum class Party { Alice, Bob, Charlie, Diana };

inline std::string party_name(Party p) {
  switch (p) {
    case Party::Alice: return "alice";
    case Party::Bob: return "bob";
    case Party::Charlie: return "charlie";
    case Party::Diana: return "diana";
  }
  throw std::logic_error("bad party");
}

// Qudit of the clone state held by each measuring party.
inline std::string clone_label(Party p) {
  switch (p) {
    case Party::Alice: return "a";
    case Party::Bob: return "1";
    case Party::Charlie: return "2";
    default: throw std::invalid_argument("party holds no clone qudit");
  }
}

// Who holds channel qudits 3, 4, 5. Diana always holds qudit 6.
struct Assignment {
  std::string tag;
  std::array<Party, 3> holder;
};

inline const std::vector<Assignment>& all_assignments() {
  static const std::vector<Assignment> table{
      {"fig1", {Party::Alice, Party::Bob, Party::Charlie}},
      {"fig2", {Party::Alice, Party::Charlie, Party::Bob}},
      {"fig3", {Party::Bob, Party::Charlie, Party::Alice}},
      {"alt4", {Party::Bob, Party::Alice, Party::Charlie}},
      {"alt5", {Party::Charlie, Party::Alice, Party::Bob}},
      {"alt6", {Party::Charlie, Party::Bob, Party::Alice}},
  };
  return table;
}

// Accepts a preset tag or a three-letter code over {a,b,c} giving the holders
// of qudits 3, 4, 5 in order, e.g. "abc" is fig1.
inline Assignment parse_assignment(const std::string& name) {
  for (const auto& a : all_assignments())
    if (a.tag == name) return a;
  if (name.size() == 3) {
    std::array<Party, 3> holder{};
    bool seen[3] = {false, false, false};
    for (int i = 0; i < 3; ++i) {
      const char c = static_cast<char>(std::tolower(name[i]));
      if (c != 'a' && c != 'b' && c != 'c') throw std::invalid_argument("unknown assignment: " + name);
      const int idx = c - 'a';
      if (seen[idx]) throw std::invalid_argument("assignment repeats a party: " + name);
      seen[idx] = true;
      holder[i] = idx == 0 ? Party::Alice : (idx == 1 ? Party::Bob : Party::Charlie);
    }
    return {"custom:" + name, holder};
  }
  throw std::invalid_argument("unknown assignment: " + name);
}

struct Measurement {
  Party party{};
  std::string first, second;  // measured pair, in projection order
  int m = 0, n = 0;
};

struct Transcript {
  std::string assignment;
  std::array<Measurement, 3> measurements;  // indexed by channel qudit 3, 4, 5
  int u_prime = 0, v_prime = 0;    // deduced from the qudit-3 and qudit-4 outcomes
  int u_second = 0, v_second = 0;  // qudit-5 outcome
  int m_final = 0, n_final = 0;
  int corr_m = 0, corr_n = 0;      // Weyl correction applied on qudit 6
  int corr_phase = 0;              // omega exponent of the accompanying phase
  double prob = 0.0;
  double fidelity = 0.0;
  Mat rho6;                        // qudit-6 state before correction
};

struct PairSpec {
  Party party{};
  std::string first, second;
};

// Qudit 3 is measured against the clone qudit of its holder with the channel
// qudit in front; qudits 4 and 5 go clone-first.
inline std::array<PairSpec, 3> measurement_pairs(const Assignment& a) {
  std::array<PairSpec, 3> out;
  for (int i = 0; i < 3; ++i) {
    const std::string q = std::to_string(3 + i);
    const std::string partner = clone_label(a.holder[i]);
    if (i == 0)
      out[i] = {a.holder[i], q, partner};
    else
      out[i] = {a.holder[i], partner, q};
  }
  return out;
}

struct RicOptions {
  bool enumerate = true;
  int samples = 0;
  std::uint64_t seed = 0;
  std::array<int, 3> level_order = {0, 1, 2};  // projection order of the pairs
};

namespace detail {

inline void check_ric_inputs(const State& clone, const State& channel, const Vec& target) {
  if (clone.d != channel.d) throw std::invalid_argument("dimension mismatch");
  Labels cl = clone.labels;
  std::sort(cl.begin(), cl.end());
  if (cl != Labels{"1", "2", "a"}) throw std::invalid_argument("clone state must live on qudits 1, 2, a");
  Labels ch = channel.labels;
  std::sort(ch.begin(), ch.end());
  if (ch != Labels{"3", "4", "5", "6"} && ch != Labels{"3", "4", "5", "6", "X", "Y"})
    throw std::invalid_argument("channel state must live on qudits 3..6 (optionally with X, Y)");
  if (std::abs(clone.v.norm() - 1.0) > 1e-9 || std::abs(channel.v.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("states must be normalized");
  if (target.size() != clone.d || std::abs(target.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("target must be a normalized single-qudit state");
}

inline Transcript finish_branch(const Assignment& assign, const std::array<PairSpec, 3>& pairs,
                                const std::array<std::array<int, 2>, 3>& oc, double prob,
                                const State& rest, int u, int v, const Vec& target) {
  const int d = rest.d;
  Transcript t;
  t.assignment = assign.tag;
  for (int i = 0; i < 3; ++i)
    t.measurements[i] = {pairs[i].party, pairs[i].first, pairs[i].second, oc[i][0], oc[i][1]};
  t.u_prime = mod(oc[1][0] + oc[0][0], d);
  t.v_prime = mod(oc[1][1] + oc[0][1], d);
  t.u_second = oc[2][0];
  t.v_second = oc[2][1];
  t.m_final = mod(t.u_second + t.u_prime - u, d);
  t.n_final = mod(t.v_second + t.v_prime - v, d);
  t.corr_m = t.m_final;
  t.corr_n = mod(-t.n_final, d);
  t.corr_phase = mod(-t.m_final * t.n_final, d);
  t.prob = prob;
  if (rest.labels.size() == 1)
    t.rho6 = density(rest);
  else
    t.rho6 = partial_trace(density(rest), d, rest.labels, {"6"}).first;
  const Mat w = weyl(t.corr_m, t.corr_n, d);
  t.fidelity = (target.adjoint() * w * t.rho6 * w.adjoint() * target).real().value();
  return t;
}

}  // namespace detail

// Runs the concentration protocol: three Bell measurements per the assignment,
// index deduction, one Weyl correction on qudit 6. The channel may carry
// purifying qudits (X, Y); they are never measured and are traced out of the
// branch state.
inline std::vector<Transcript> run_ric(const State& clone, const State& channel,
                                       const Assignment& assign, int u, int v, const Vec& target,
                                       const RicOptions& opts = {}) {
  detail::check_ric_inputs(clone, channel, target);
  const int d = clone.d;
  const auto pairs = measurement_pairs(assign);
  const State total = tensor(clone, channel);
  std::vector<Transcript> out;

  auto level_pair = [&](int level) -> const PairSpec& { return pairs[opts.level_order[level]]; };

  if (opts.enumerate) {
    std::array<std::array<int, 2>, 3> oc{};
    auto descend = [&](auto&& self, const State& cur, int level, double acc) -> void {
      if (level == 3) {
        out.push_back(detail::finish_branch(assign, pairs, oc, acc, cur, u, v, target));
        return;
      }
      const PairSpec& pr = level_pair(level);
      for (int m = 0; m < d; ++m)
        for (int n = 0; n < d; ++n) {
          const Projection p = project(cur, {pr.first, pr.second}, bell_vec(m, n, d));
          if (!p.kept) continue;
          oc[opts.level_order[level]] = {m, n};
          self(self, p.rest, level + 1, acc * p.prob);
        }
    };
    descend(descend, total, 0, 1.0);
    return out;
  }

  if (opts.samples <= 0) throw std::invalid_argument("sample count must be positive");
  Rng rng(opts.seed);
  for (int s = 0; s < opts.samples; ++s) {
    State cur = total;
    std::array<std::array<int, 2>, 3> oc{};
    double acc = 1.0;
    for (int level = 0; level < 3; ++level) {
      const PairSpec& pr = level_pair(level);
      std::vector<double> probs(d * d, 0.0);
      for (int m = 0; m < d; ++m)
        for (int n = 0; n < d; ++n)
          probs[m * d + n] = project(cur, {pr.first, pr.second}, bell_vec(m, n, d)).prob;
      double r = rng.uniform();
      int pick = -1;
      for (int i = 0; i < d * d; ++i) {
        if (probs[i] <= 0.0) continue;
        pick = i;
        r -= probs[i];
        if (r <= 0.0) break;
      }
      const int m = pick / d, n = pick % d;
      const Projection p = project(cur, {pr.first, pr.second}, bell_vec(m, n, d));
      oc[opts.level_order[level]] = {m, n};
      acc *= p.prob;
      cur = p.rest;
    }
    out.push_back(detail::finish_branch(assign, pairs, oc, acc, cur, u, v, target));
  }
  return out;
}

// Convenience entry: builds the channel state (purifying mixed families), the
// symmetric clone of the input, and runs the protocol against the input as
// target.
inline std::vector<Transcript> run_ric(const Vec& phi, double p, const ChannelSpec& spec,
                                       const Assignment& assign, int d,
                                       const RicOptions& opts = {}) {
  const State clone = clone_state(phi, cloning_params(d, p));
  const State channel = is_mixed(spec) ? purify(spec, d) : build_pure(spec, d);
  const auto [u, v] = channel_offsets(spec);
  return run_ric(clone, channel, assign, u, v, phi, opts);
}

struct ClassicalMessage {
  Party from{};
  Party to{};
  int m = 0, n = 0;
  int bits = 0;
};

inline int outcome_bits(int d) {
  return static_cast<int>(std::ceil(std::log2(static_cast<double>(d) * d)));
}

inline std::vector<ClassicalMessage> message_log(const Transcript& t, int d) {
  const int bits = outcome_bits(d);
  std::vector<ClassicalMessage> log;
  for (const Measurement& m : t.measurements)
    log.push_back({m.party, Party::Diana, m.m, m.n, bits});
  return log;
}

inline std::string outcome_key(const Transcript& t) {
  std::string key;
  for (const Measurement& m : t.measurements) {
    key += std::to_string(m.m);
    key += std::to_string(m.n);
  }
  return key;
}

struct OutcomeCorrections {
  std::array<int, 6> outcomes{};  // (m3, n3, m4, n4, m5, n5)
  std::vector<std::pair<int, int>> working;
};

struct CorrectionSearchReport {
  std::vector<OutcomeCorrections> outcomes;
  bool all_covered = true;  // every outcome admits at least one working Weyl
  bool all_unique = true;   // exactly one works per outcome
};

// For several independent inputs, tries all d^2 Weyl labels against the
// uncorrected branch states. A label works only if it restores every input on
// the same outcome; outcomes absent for some input (zero probability) are
// dropped.
inline CorrectionSearchReport correction_search(const ChannelSpec& spec, int d,
                                                const Assignment& assign, int n_inputs = 4,
                                                std::uint64_t seed = 20260819) {
  if (n_inputs < 3) throw std::invalid_argument("need at least three independent inputs");
  Rng rng(seed);
  std::vector<Vec> inputs;
  for (int i = 0; i < n_inputs; ++i) inputs.push_back(haar_state(d, rng));

  std::vector<std::map<std::string, Transcript>> runs;
  for (const Vec& phi : inputs) {
    std::map<std::string, Transcript> by_key;
    for (Transcript& t : run_ric(phi, 0.5, spec, assign, d)) by_key.emplace(outcome_key(t), std::move(t));
    runs.push_back(std::move(by_key));
  }

  CorrectionSearchReport report;
  for (const auto& [key, first] : runs.front()) {
    bool everywhere = true;
    for (std::size_t i = 1; i < runs.size(); ++i)
      if (!runs[i].count(key)) { everywhere = false; break; }
    if (!everywhere) continue;

    OutcomeCorrections oc;
    for (int i = 0; i < 3; ++i) {
      oc.outcomes[2 * i] = first.measurements[i].m;
      oc.outcomes[2 * i + 1] = first.measurements[i].n;
    }
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        const Mat w = weyl(a, b, d);
        bool ok = true;
        for (std::size_t i = 0; i < runs.size(); ++i) {
          const Transcript& t = runs[i].at(key);
          const double fid = (inputs[i].adjoint() * w * t.rho6 * w.adjoint() * inputs[i]).real().value();
          if (fid <= 1.0 - 1e-9) { ok = false; break; }
        }
        if (ok) oc.working.emplace_back(a, b);
      }
    if (oc.working.empty()) report.all_covered = false;
    if (oc.working.size() != 1) report.all_unique = false;
    report.outcomes.push_back(std::move(oc));
  }
  return report;
}

struct AssignmentSearchResult {
  std::string assignment;
  bool works = false;
  int failing_outcomes = 0;
};

// Which of the six holder assignments admit a working correction on every
// outcome for the given channel.
inline std::vector<AssignmentSearchResult> search_distributions(const ChannelSpec& spec, int d,
                                                                int n_inputs = 4,
                                                                std::uint64_t seed = 20260819) {
  std::vector<AssignmentSearchResult> results;
  for (const Assignment& a : all_assignments()) {
    const CorrectionSearchReport rep = correction_search(spec, d, a, n_inputs, seed);
    int failing = 0;
    for (const auto& oc : rep.outcomes)
      if (oc.working.empty()) ++failing;
    results.push_back({a.tag, failing == 0, failing});
  }
  return results;
}

struct UnlockBranch {
  int m = 0, n = 0;
  double prob = 0.0;
  Labels kept;
  Mat conditional;  // state of the unjoined pair given the Bell outcome
};

// Conditional states of the complementary pair after a Bell measurement on
// `joined`, for a four-qudit density matrix on (3,4,5,6).
inline std::vector<UnlockBranch> conditional_after_bell(const Mat& rho, int d,
                                                        const std::pair<std::string, std::string>& joined) {
  const Labels all = channel_labels();
  Labels kept;
  for (const auto& l : all)
    if (l != joined.first && l != joined.second) kept.push_back(l);
  if (kept.size() != 2) throw std::invalid_argument("joined pair must name two channel qudits");

  Labels order{joined.first, joined.second, kept[0], kept[1]};
  const Mat perm = permute_density(rho, d, all, order);
  const std::int64_t dd = static_cast<std::int64_t>(d) * d;

  std::vector<UnlockBranch> out;
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n) {
      const Vec b = bell_vec(m, n, d);
      Mat cond = Mat::Zero(dd, dd);
      for (std::int64_t i = 0; i < dd; ++i)
        for (std::int64_t j = 0; j < dd; ++j) {
          const cplx w = std::conj(b[i]) * b[j];
          if (w == cplx(0.0, 0.0)) continue;
          cond.noalias() += w * perm.block(i * dd, j * dd, dd, dd);
        }
      const double prob = cond.trace().real();
      UnlockBranch br{m, n, prob, kept, Mat()};
      if (prob > kProjectionCutoff) br.conditional = cond / prob;
      out.push_back(std::move(br));
    }
  return out;
}

// Unlocking the bound state: joining (3,4) or (3,5) leaves the other pair in
// a pure maximally entangled state on every outcome. Other joins do not, so
// they are rejected here; use conditional_after_bell to inspect them.
inline std::vector<UnlockBranch> unlock_bound(const Mat& rho, int d,
                                              const std::pair<std::string, std::string>& joined) {
  const bool ok = (joined == std::pair<std::string, std::string>{"3", "4"}) ||
                  (joined == std::pair<std::string, std::string>{"3", "5"});
  if (!ok) throw std::invalid_argument("unlock requires joining (3,4) or (3,5)");
  return conditional_after_bell(rho, d, joined);
}

struct EndToEndBranch {
  int tm = 0, tn = 0;  // Bell outcome of the distribution step
  double tprob = 0.0;
  std::vector<Transcript> transcripts;
};

// Full pipeline: teleport-distribute the input through the cloning channel,
// then concentrate each distribution branch back onto qudit 6.
inline std::vector<EndToEndBranch> end_to_end(const Vec& phi, double p, const ChannelSpec& spec,
                                              const Assignment& assign, int d,
                                              const RicOptions& opts = {}) {
  const CloningParams cp = cloning_params(d, p);
  const State channel = is_mixed(spec) ? purify(spec, d) : build_pure(spec, d);
  const auto [u, v] = channel_offsets(spec);
  std::vector<EndToEndBranch> out;
  for (const DistributionBranch& db : distribute(phi, cp)) {
    EndToEndBranch br{db.m, db.n, db.prob, {}};
    br.transcripts = run_ric(db.post, channel, assign, u, v, phi, opts);
    out.push_back(std::move(br));
  }
  return out;
}

}  // namespace qric
