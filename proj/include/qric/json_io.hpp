#pragma once

#include "qric/analysis.hpp"
#include "qric/channels.hpp"
#include "qric/protocol.hpp"
#include "qric/telecloning.hpp"
#include "qric/tensor.hpp"

#include "json.hpp"

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qric {

using json = nlohmann::ordered_json;

// Complex numbers serialize as [re, im]; complex tables are row-major with the
// first index as the row.

inline json complex_to_json(const cplx& z) { return json::array({z.real(), z.imag()}); }

inline cplx complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("complex entries must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json mat_to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Mat mat_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("expected a nonempty table");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
  Mat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(j[r].size()) != cols)
      throw std::invalid_argument("ragged table");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = complex_from_json(j[r][c]);
  }
  return m;
}

inline json real_mat_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Eigen::MatrixXd real_mat_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("expected a nonempty table");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(j[r].size()) != cols)
      throw std::invalid_argument("ragged table");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

inline json vec_to_json(const Vec& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(complex_to_json(v[i]));
  return arr;
}

inline Vec vec_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("expected an array state");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = complex_from_json(j[i]);
  return v;
}

inline json channel_to_json(const ChannelSpec& spec) {
  json j;
  j["family"] = family_tag(spec);
  if (const auto* g = std::get_if<GeneralPure>(&spec)) {
    j["coefficients"] = mat_to_json(g->coefficients);
    j["u"] = g->u;
    j["v"] = g->v;
  } else if (const auto* z = std::get_if<Ghz>(&spec)) {
    j["c"] = z->c;
  } else if (const auto* t = std::get_if<TelecloningLike>(&spec)) {
    j["alpha"] = t->alpha;
    j["beta"] = t->beta;
    j["gamma"] = t->gamma;
  } else if (const auto* b = std::get_if<DoubleBell>(&spec)) {
    j["m"] = b->m;
    j["n"] = b->n;
    j["u"] = b->u;
    j["v"] = b->v;
  } else if (const auto* m = std::get_if<MixedCorrelated>(&spec)) {
    j["weights"] = real_mat_to_json(m->weights);
    j["u"] = m->u;
    j["v"] = m->v;
  }
  return j;
}

inline ChannelSpec channel_from_json(const json& j) {
  if (!j.is_object() || !j.contains("family"))
    throw std::invalid_argument("channel JSON must carry a family tag");
  const std::string family = j["family"].get<std::string>();
  auto geti = [&](const char* key, int fallback, bool required) {
    if (!j.contains(key)) {
      if (required) throw std::invalid_argument(std::string("channel JSON is missing ") + key);
      return fallback;
    }
    return j[key].get<int>();
  };
  if (family == "general_pure")
    return GeneralPure{mat_from_json(j.at("coefficients")), geti("u", 0, false), geti("v", 0, false)};
  if (family == "ghz") return Ghz{geti("c", 0, false)};
  if (family == "telecloning_like")
    return TelecloningLike{j.at("alpha").get<double>(), j.at("beta").get<double>(),
                           j.at("gamma").get<double>()};
  if (family == "double_bell")
    return DoubleBell{geti("m", 0, true), geti("n", 0, true), geti("u", 0, false),
                      geti("v", 0, false)};
  if (family == "mixed_correlated")
    return MixedCorrelated{real_mat_from_json(j.at("weights")), geti("u", 0, false),
                           geti("v", 0, false)};
  if (family == "bound_smolin_like") return BoundSmolinLike{};
  throw std::invalid_argument("unknown channel family: " + family);
}

inline bool spec_equal(const ChannelSpec& a, const ChannelSpec& b) {
  if (a.index() != b.index()) return false;
  if (const auto* g = std::get_if<GeneralPure>(&a)) {
    const auto& h = std::get<GeneralPure>(b);
    return g->u == h.u && g->v == h.v && g->coefficients == h.coefficients;
  }
  if (const auto* z = std::get_if<Ghz>(&a)) return z->c == std::get<Ghz>(b).c;
  if (const auto* t = std::get_if<TelecloningLike>(&a)) {
    const auto& s = std::get<TelecloningLike>(b);
    return t->alpha == s.alpha && t->beta == s.beta && t->gamma == s.gamma;
  }
  if (const auto* x = std::get_if<DoubleBell>(&a)) {
    const auto& y = std::get<DoubleBell>(b);
    return x->m == y.m && x->n == y.n && x->u == y.u && x->v == y.v;
  }
  if (const auto* m = std::get_if<MixedCorrelated>(&a)) {
    const auto& w = std::get<MixedCorrelated>(b);
    return m->u == w.u && m->v == w.v && m->weights == w.weights;
  }
  return true;
}

// Run configuration. `q` is redundant with `p` for the cloning family used
// here and must match 1 - p when given.
struct ExperimentConfig {
  int dim = 2;
  std::string task = "ric";
  ChannelSpec channel = Ghz{0};
  std::string assignment = "fig1";
  double p = 0.5;
  bool input_explicit = false;
  Vec input_state;
  std::uint64_t input_seed = 1;
  bool enumerate_all = true;
  int samples = 0;
  std::uint64_t sample_seed = 1;
  std::string out;
};

inline json config_to_json(const ExperimentConfig& c) {
  json j;
  j["dim"] = c.dim;
  j["task"] = c.task;
  j["channel"] = channel_to_json(c.channel);
  j["assignment"] = c.assignment;
  j["p"] = c.p;
  j["q"] = 1.0 - c.p;
  if (c.input_explicit)
    j["input"] = json{{"explicit", vec_to_json(c.input_state)}};
  else
    j["input"] = json{{"seed", c.input_seed}};
  if (c.enumerate_all)
    j["mode"] = "enumerate";
  else
    j["mode"] = json{{"samples", c.samples}, {"seed", c.sample_seed}};
  j["out"] = c.out;
  return j;
}

inline ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  c.dim = j.at("dim").get<int>();
  c.task = j.at("task").get<std::string>();
  if (j.contains("channel")) c.channel = channel_from_json(j.at("channel"));
  if (j.contains("assignment")) c.assignment = j.at("assignment").get<std::string>();
  if (j.contains("p")) c.p = j.at("p").get<double>();
  if (j.contains("q") && std::abs(j.at("q").get<double>() - (1.0 - c.p)) > 1e-12)
    throw std::invalid_argument("q must equal 1 - p");
  if (j.contains("input")) {
    const json& in = j.at("input");
    if (in.contains("explicit")) {
      c.input_explicit = true;
      c.input_state = vec_from_json(in.at("explicit"));
    } else if (in.contains("seed")) {
      c.input_seed = in.at("seed").get<std::uint64_t>();
    } else {
      throw std::invalid_argument("input must carry either explicit or seed");
    }
  }
  if (j.contains("mode")) {
    const json& mode = j.at("mode");
    if (mode.is_string() && mode.get<std::string>() == "enumerate") {
      c.enumerate_all = true;
    } else if (mode.is_object()) {
      c.enumerate_all = false;
      c.samples = mode.at("samples").get<int>();
      c.sample_seed = mode.at("seed").get<std::uint64_t>();
    } else {
      throw std::invalid_argument("mode must be enumerate or {samples, seed}");
    }
  }
  if (j.contains("out")) c.out = j.at("out").get<std::string>();
  return c;
}

inline json measurement_to_json(const Measurement& m) {
  return json{{"party", party_name(m.party)},
              {"pair", json::array({m.first, m.second})},
              {"m", m.m},
              {"n", m.n}};
}

inline json transcript_to_json(const Transcript& t) {
  json ms = json::array();
  for (const Measurement& m : t.measurements) ms.push_back(measurement_to_json(m));
  return json{{"assignment", t.assignment},
              {"measurements", std::move(ms)},
              {"u_prime", t.u_prime},
              {"v_prime", t.v_prime},
              {"u_second", t.u_second},
              {"v_second", t.v_second},
              {"m_final", t.m_final},
              {"n_final", t.n_final},
              {"correction", json{{"m", t.corr_m}, {"n", t.corr_n}, {"phase_exponent", t.corr_phase}}},
              {"prob", t.prob},
              {"fidelity", t.fidelity}};
}

struct BranchSummary {
  int branches = 0;
  double prob_sum = 0.0;
  double min_fidelity = 0.0;
  double mean_fidelity = 0.0;  // probability-weighted
};

inline BranchSummary summarize(const std::vector<Transcript>& ts) {
  BranchSummary s;
  s.branches = static_cast<int>(ts.size());
  if (ts.empty()) return s;
  s.min_fidelity = 2.0;
  for (const Transcript& t : ts) {
    s.prob_sum += t.prob;
    s.min_fidelity = std::min(s.min_fidelity, t.fidelity);
    s.mean_fidelity += t.prob * t.fidelity;
  }
  s.mean_fidelity /= s.prob_sum > 0.0 ? s.prob_sum : 1.0;
  return s;
}

inline json summary_to_json(const BranchSummary& s) {
  return json{{"branches", s.branches},
              {"prob_sum", s.prob_sum},
              {"min_fidelity", s.min_fidelity},
              {"mean_fidelity", s.mean_fidelity}};
}

inline json partition_to_json(const PartitionReport& r) {
  return json{{"cut", r.cut}, {"min_pt_eigenvalue", r.min_pt_eigenvalue}, {"npt", r.npt}};
}

inline json rank_profile_to_json(const RankProfile& p) {
  json j;
  for (const auto& [cut, rank] : p.ranks) j[cut] = rank;
  return j;
}

inline json correction_report_to_json(const CorrectionSearchReport& r) {
  json outcomes = json::array();
  for (const auto& oc : r.outcomes) {
    json working = json::array();
    for (const auto& [a, b] : oc.working) working.push_back(json::array({a, b}));
    json verdict;
    if (oc.working.size() == 1)
      verdict = json::array({oc.working[0].first, oc.working[0].second});
    else
      verdict = "none";
    outcomes.push_back(json{{"outcomes", oc.outcomes},
                            {"working", std::move(working)},
                            {"verdict", std::move(verdict)}});
  }
  return json{{"outcomes", std::move(outcomes)},
              {"all_covered", r.all_covered},
              {"all_unique", r.all_unique}};
}

inline json search_results_to_json(const std::vector<AssignmentSearchResult>& rs) {
  json arr = json::array();
  for (const auto& r : rs)
    arr.push_back(json{{"assignment", r.assignment},
                       {"works", r.works},
                       {"failing_outcomes", r.failing_outcomes}});
  return arr;
}

inline json message_log_to_json(const std::vector<ClassicalMessage>& log) {
  json arr = json::array();
  int total = 0;
  for (const ClassicalMessage& m : log) {
    arr.push_back(json{{"from", party_name(m.from)},
                       {"to", party_name(m.to)},
                       {"m", m.m},
                       {"n", m.n},
                       {"bits", m.bits}});
    total += m.bits;
  }
  return json{{"messages", std::move(arr)}, {"total_bits", total}};
}

inline std::string csv_header() {
  return "task,d,channel_tag,assignment,branches,min_fidelity,mean_fidelity,seed";
}

inline std::string csv_row(const std::string& task, int d, const std::string& channel_tag,
                           const std::string& assignment, int branches, double min_fidelity,
                           double mean_fidelity, std::uint64_t seed) {
  std::ostringstream os;
  os.precision(17);
  os << task << ',' << d << ',' << channel_tag << ',' << assignment << ',' << branches << ','
     << min_fidelity << ',' << mean_fidelity << ',' << seed;
  return os.str();
}

}  // namespace qric
