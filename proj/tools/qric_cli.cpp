#include "qric/json_io.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace qric;
using qric::json;

Vec input_state_for(const ExperimentConfig& cfg) {
  if (cfg.input_explicit) {
    Vec v = cfg.input_state;
    if (v.size() != cfg.dim) throw std::invalid_argument("explicit input has wrong dimension");
    if (std::abs(v.norm() - 1.0) > 1e-9)
      throw std::invalid_argument("explicit input must be normalized");
    return v;
  }
  Rng rng(cfg.input_seed);
  return haar_state(cfg.dim, rng);
}

RicOptions options_for(const ExperimentConfig& cfg) {
  RicOptions opts;
  opts.enumerate = cfg.enumerate_all;
  opts.samples = cfg.samples;
  opts.seed = cfg.sample_seed;
  return opts;
}

double state_fidelity(const State& a, const State& b) {
  const cplx ov = permute(a, b.labels).v.dot(b.v);
  return std::norm(ov);
}

json run_teleclone(const ExperimentConfig& cfg) {
  const int d = cfg.dim;
  const CloningParams cp = cloning_params(d, cfg.p);
  const Vec phi = input_state_for(cfg);
  const State reference = clone_state(phi, cp);

  json rep;
  const CloneCoefficients cc = bell_coefficients(cp);
  rep["coefficients"] = json{{"alpha", cc.alpha}, {"beta", cc.beta}, {"gamma", cc.gamma}};
  const auto [f1, f2] = clone_fidelities(phi, cp);
  rep["clone_fidelities"] = json{{"first", f1}, {"second", f2}};

  json branches = json::array();
  double min_fid = 2.0, mean_fid = 0.0, prob_sum = 0.0;
  for (const DistributionBranch& br : distribute(phi, cp)) {
    const double fid = state_fidelity(br.post, reference);
    branches.push_back(json{{"m", br.m}, {"n", br.n}, {"prob", br.prob}, {"fidelity", fid}});
    min_fid = std::min(min_fid, fid);
    mean_fid += br.prob * fid;
    prob_sum += br.prob;
  }
  rep["distribution"] = std::move(branches);
  rep["distribution_prob_sum"] = prob_sum;
  rep["distribution_min_fidelity"] = min_fid;
  rep["distribution_mean_fidelity"] = mean_fid / (prob_sum > 0.0 ? prob_sum : 1.0);

  json expansion;
  for (const auto& [name, which] :
       {std::pair<const char*, ExpansionPair>{"pair_2a", ExpansionPair::pair_2a},
        std::pair<const char*, ExpansionPair>{"pair_1a", ExpansionPair::pair_1a}}) {
    const ExpansionResult er = expansion_check(cp, which);
    expansion[name] = json{{"residual", er.residual},
                           {"input_dependence", er.input_dependence},
                           {"swapped_parameters", er.swapped}};
  }
  rep["expansion"] = std::move(expansion);

  std::vector<Vec> witness_inputs{basis_vec(0, d)};
  Vec plus = Vec::Zero(d);
  plus[0] = plus[1] = 1.0 / std::sqrt(2.0);
  witness_inputs.push_back(plus);
  witness_inputs.push_back(phi);
  const WitnessReport wr = inequality_witness(cp, witness_inputs);
  rep["witness_max_variation"] = wr.max_variation;
  return rep;
}

json run_ric_task(const ExperimentConfig& cfg) {
  const int d = cfg.dim;
  const Vec phi = input_state_for(cfg);
  const Assignment assign = parse_assignment(cfg.assignment);
  const std::vector<Transcript> ts = run_ric(phi, cfg.p, cfg.channel, assign, d, options_for(cfg));

  json rep;
  rep["summary"] = summary_to_json(summarize(ts));
  if (ts.size() <= 2000) {
    json arr = json::array();
    for (const Transcript& t : ts) arr.push_back(transcript_to_json(t));
    rep["transcripts"] = std::move(arr);
  }
  if (!ts.empty()) rep["classical_messages"] = message_log_to_json(message_log(ts.front(), d));
  rep["stabilizer_expectations"] = mat_to_json(stabilizer_expectations(cfg.channel, d));
  if (d <= 5) {
    json parts = json::array();
    for (const PartitionReport& pr : ppt_report(build_density(cfg.channel, d), d))
      parts.push_back(partition_to_json(pr));
    rep["partitions"] = std::move(parts);
  }
  return rep;
}

json run_end_to_end_task(const ExperimentConfig& cfg) {
  const int d = cfg.dim;
  const Vec phi = input_state_for(cfg);
  const Assignment assign = parse_assignment(cfg.assignment);
  const auto branches = end_to_end(phi, cfg.p, cfg.channel, assign, d, options_for(cfg));

  json arr = json::array();
  double min_fid = 2.0, mean = 0.0, weight = 0.0;
  int total_branches = 0;
  for (const EndToEndBranch& br : branches) {
    const BranchSummary s = summarize(br.transcripts);
    arr.push_back(json{
        {"m", br.tm}, {"n", br.tn}, {"prob", br.tprob}, {"summary", summary_to_json(s)}});
    min_fid = std::min(min_fid, s.min_fidelity);
    mean += br.tprob * s.prob_sum * s.mean_fidelity;
    weight += br.tprob * s.prob_sum;
    total_branches += s.branches;
  }
  json rep;
  rep["teleport_branches"] = std::move(arr);
  rep["overall"] = json{{"branches", total_branches},
                        {"min_fidelity", min_fid},
                        {"mean_fidelity", mean / (weight > 0.0 ? weight : 1.0)}};
  return rep;
}

json run_analyze(const ExperimentConfig& cfg) {
  const int d = cfg.dim;
  if (d > 5) throw std::invalid_argument("analyze works with dimensions up to 5");
  json rep;
  rep["stabilizer_expectations"] = mat_to_json(stabilizer_expectations(cfg.channel, d));

  const Mat rho = build_density(cfg.channel, d);
  json parts = json::array();
  for (const PartitionReport& pr : ppt_report(rho, d)) parts.push_back(partition_to_json(pr));
  rep["partitions"] = std::move(parts);

  if (!is_mixed(cfg.channel))
    rep["rank_profile"] = rank_profile_to_json(rank_profile(build_pure(cfg.channel, d)));

  if (std::holds_alternative<BoundSmolinLike>(cfg.channel)) {
    json bound;
    bound["pair_rewrite_residual"] = bound_symmetry_check(d);
    json seps = json::array();
    for (const Labels& side : {Labels{"3", "4"}, Labels{"3", "5"}}) {
      const SeparabilityReport sr = separable_decomposition_check(d, side);
      seps.push_back(json{{"cut", sr.cut}, {"residual", sr.residual}});
    }
    bound["separability"] = std::move(seps);

    json unlocks = json::array();
    for (const auto& join : {std::pair<std::string, std::string>{"3", "4"},
                             std::pair<std::string, std::string>{"3", "5"}}) {
      double min_top = 2.0, max_entropy_dev = 0.0;
      for (const UnlockBranch& br : unlock_bound(rho, d, join)) {
        if (br.prob <= 1e-12) continue;
        Eigen::SelfAdjointEigenSolver<Mat> es(br.conditional, Eigen::EigenvaluesOnly);
        min_top = std::min(min_top, es.eigenvalues().maxCoeff());
        const Mat marginal =
            partial_trace(br.conditional, d, br.kept, {br.kept.front()}).first;
        max_entropy_dev = std::max(
            max_entropy_dev, std::abs(von_neumann_entropy(marginal) - std::log(double(d))));
      }
      unlocks.push_back(json{{"join", json::array({join.first, join.second})},
                             {"min_top_eigenvalue", min_top},
                             {"max_marginal_entropy_deviation", max_entropy_dev}});
    }
    // The remaining join does not produce pure conditionals; report its best
    // eigenvalue as data.
    double top36 = 2.0;
    for (const UnlockBranch& br : conditional_after_bell(rho, d, {"3", "6"})) {
      if (br.prob <= 1e-12) continue;
      Eigen::SelfAdjointEigenSolver<Mat> es(br.conditional, Eigen::EigenvaluesOnly);
      top36 = std::min(top36, es.eigenvalues().maxCoeff());
    }
    unlocks.push_back(json{{"join", json::array({"3", "6"})},
                           {"min_top_eigenvalue", top36},
                           {"unlocks", top36 > 1.0 - 1e-9}});
    bound["unlock"] = std::move(unlocks);
    rep["bound"] = std::move(bound);
  }
  return rep;
}

json run_search(const ExperimentConfig& cfg) {
  const int d = cfg.dim;
  json rep;
  rep["assignments"] = search_results_to_json(search_distributions(cfg.channel, d, 4, cfg.input_seed));
  rep["detail"] = correction_report_to_json(
      correction_search(cfg.channel, d, parse_assignment(cfg.assignment), 4, cfg.input_seed));
  return rep;
}

struct CheckRow {
  std::string name;
  int d = 0;
  double value = 0.0;
  double tol = 0.0;
  bool pass = false;
};

void add_check(std::vector<CheckRow>& rows, std::string name, int d, double value, double tol) {
  rows.push_back({std::move(name), d, value, tol, value < tol});
}

void verify_dimension(std::vector<CheckRow>& rows, int d) {
  // Operator identities.
  double worst = 0.0;
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n) {
      const Mat u = weyl(m, n, d);
      worst = std::max(worst, (u.adjoint() * u - Mat::Identity(d, d)).cwiseAbs().maxCoeff());
    }
  add_check(rows, "weyl_unitarity", d, worst, 1e-12);

  worst = 0.0;
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n)
      for (int mp = 0; mp < d; ++mp)
        for (int np = 0; np < d; ++np) {
          const Mat lhs = weyl(m, n, d) * weyl(mp, np, d);
          const Mat rhs = omega_pow(d, static_cast<long long>(m) * np) *
                          weyl(mod(m + mp, d), mod(n + np, d), d);
          worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
        }
  add_check(rows, "weyl_composition", d, worst, 1e-12);

  worst = 0.0;
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k)
      for (int m = 0; m < d; ++m)
        for (int n = 0; n < d; ++n) {
          const State b = bell_state(m, n, d, "x", "y");
          State t = apply_local(b, "x", weyl(mod(-j, d), k, d));
          t = apply_local(t, "y", weyl(j, k, d));
          const cplx phase = omega_pow(d, static_cast<long long>(j) * n - static_cast<long long>(k) * m);
          worst = std::max(worst, (t.v - phase * b.v).norm());
        }
  add_check(rows, "bell_eigenrelation", d, worst, 1e-12);

  worst = 0.0;
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) worst = std::max(worst, product_to_bell_residual(j, k, d));
  add_check(rows, "product_bell_reconstruction", d, worst, 1e-12);

  worst = 0.0;
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n)
      for (int mp = 0; mp < d; ++mp)
        for (int np = 0; np < d; ++np)
          worst = std::max(worst, swap_identity_residual(m, n, mp, np, d));
  add_check(rows, "swap_identity", d, worst, 1e-12);

  // Cloning.
  Rng rng(91);
  const Vec phi = haar_state(d, rng);
  const CloningParams sym = cloning_params(d, 0.5);
  add_check(rows, "clone_unit_norm", d, std::abs(clone_state(phi, sym).v.norm() - 1.0), 1e-12);
  const double expected = (d + 3.0) / (2.0 * (d + 1.0));
  const auto [fs1, fs2] = clone_fidelities(phi, sym);
  add_check(rows, "clone_symmetric_fidelity", d,
            std::max(std::abs(fs1 - expected), std::abs(fs2 - expected)), 1e-10);
  const auto [fa1, fa2] = clone_fidelities(phi, cloning_params(d, 1.0));
  add_check(rows, "clone_keep_all_limit", d,
            std::max(std::abs(fa1 - 1.0), std::abs(fa2 - 1.0 / d)), 1e-10);

  // Channel construction.
  const int u = 1 % d, v = 2 % d;
  worst = 0.0;
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n) {
      const State direct = tensor(bell_state(m, n, d, "3", "4"),
                                  bell_state(mod(u - m, d), mod(n - v, d), d, "5", "6"));
      worst = std::max(
          worst, (build_pure(DoubleBell{m, n, u, v}, d).v - direct.v).norm());
    }
  add_check(rows, "double_bell_product_form", d, worst, 1e-12);

  worst = 0.0;
  for (int c = 0; c < d; ++c) {
    Vec direct = Vec::Zero(ipow(d, 4));
    for (int j = 0; j < d; ++j) {
      const int jc = mod(j + c, d);
      direct[((static_cast<std::int64_t>(j) * d + jc) * d + j) * d + jc] =
          1.0 / std::sqrt(static_cast<double>(d));
    }
    worst = std::max(worst, (build_pure(Ghz{c}, d).v - direct).norm());
  }
  add_check(rows, "ghz_direct_form", d, worst, 1e-12);

  // Stabilizers.
  Rng crng(17);
  const GeneralPure gp{random_coefficient_table(d, crng), 0, 0};
  add_check(rows, "stabilizer_identity", d,
            (stabilizer_expectations(gp, d) - Mat::Constant(d, d, 1.0)).cwiseAbs().maxCoeff(),
            1e-10);

  Rng crng2(18);
  const GeneralPure gpv{random_coefficient_table(d, crng2), u, v};
  const Mat table = stabilizer_expectations(gpv, d);
  worst = 0.0;
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k)
      worst = std::max(worst, std::abs(table(j, k) - omega_pow(d, static_cast<long long>(j) * v -
                                                                      static_cast<long long>(k) * u)));
  add_check(rows, "stabilizer_phase_law", d, worst, 1e-10);

  worst = 0.0;
  if (d <= 3) {
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int jp = 0; jp < d; ++jp)
          for (int kp = 0; kp < d; ++kp) {
            const Mat lhs = stabilizer_matrix(j, k, d) * stabilizer_matrix(jp, kp, d);
            const Mat rhs = stabilizer_matrix(mod(j + jp, d), mod(k + kp, d), d);
            worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
          }
  } else {
    Rng srng(5);
    const Vec psi = haar_state(ipow(d, 4), srng);
    const State s(d, channel_labels(), psi);
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int jp = 0; jp < d; ++jp)
          for (int kp = 0; kp < d; ++kp) {
            const Vec lhs = apply_stabilizer(apply_stabilizer(s, jp, kp), j, k).v;
            const Vec rhs = apply_stabilizer(s, mod(j + jp, d), mod(k + kp, d)).v;
            worst = std::max(worst, (lhs - rhs).norm());
          }
  }
  add_check(rows, "stabilizer_group_law", d, worst, 1e-12);

  // Bound state.
  if (d <= 5) {
    add_check(rows, "bound_pair_rewrite", d, bound_symmetry_check(d), 1e-12);
    add_check(rows, "bound_twirl_exact", d,
              (build_bound_by_twirl(d, 0, 0) - bound_state(d)).cwiseAbs().maxCoeff(), 1e-12);
  }

  // Concentration.
  RicOptions opts;
  if (d <= 3) {
    opts.enumerate = true;
  } else {
    opts.enumerate = false;
    opts.samples = d == 5 ? 40 : 6;
    opts.seed = 3;
  }
  Rng irng(23);
  const Vec input = haar_state(d, irng);
  const std::vector<Transcript> ts =
      run_ric(input, 0.5, Ghz{1 % d}, parse_assignment("fig1"), d, opts);
  double min_fid = 2.0;
  int deduction_mismatch = 0;
  for (const Transcript& t : ts) {
    min_fid = std::min(min_fid, t.fidelity);
    const int mt = mod(t.u_second + t.u_prime - 0, d);
    const int nt = mod(t.v_second + t.v_prime - 0, d);
    if (mt != t.m_final || nt != t.n_final) ++deduction_mismatch;
  }
  add_check(rows, "concentration_ghz_fidelity", d, 1.0 - min_fid, d <= 3 ? 1e-10 : 1e-9);
  add_check(rows, "deduction_consistency", d, static_cast<double>(deduction_mismatch), 0.5);
  if (opts.enumerate) {
    double prob_sum = 0.0;
    for (const Transcript& t : ts) prob_sum += t.prob;
    add_check(rows, "branch_probability_sum", d, std::abs(prob_sum - 1.0), 1e-10);
  }

  if (d <= 3) {
    const CorrectionSearchReport rep =
        correction_search(Ghz{1 % d}, d, parse_assignment("fig1"), 4, 41);
    add_check(rows, "correction_uniqueness", d,
              rep.all_covered && rep.all_unique ? 0.0 : 1.0, 0.5);
  }
}

json run_verify(const std::vector<int>& dims) {
  std::vector<CheckRow> rows;
  for (int d : dims) verify_dimension(rows, d);
  json arr = json::array();
  bool all_pass = true;
  for (const CheckRow& r : rows) {
    arr.push_back(json{
        {"check", r.name}, {"d", r.d}, {"value", r.value}, {"tolerance", r.tol}, {"pass", r.pass}});
    all_pass = all_pass && r.pass;
  }
  return json{{"checks", std::move(arr)}, {"all_pass", all_pass}};
}

std::vector<int> parse_dims(const std::string& dims) {
  std::vector<int> out;
  std::stringstream ss(dims);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const int d = std::stoi(item);
    if (d != 2 && d != 3 && d != 5 && d != 7)
      throw std::invalid_argument("verify supports dimensions 2, 3, 5, 7");
    out.push_back(d);
  }
  if (out.empty()) throw std::invalid_argument("no dimensions given");
  return out;
}

std::string csv_for(const std::string& task, const ExperimentConfig& cfg, const json& rep) {
  int branches = 0;
  double min_fid = 0.0, mean_fid = 0.0;
  std::string assignment = cfg.assignment;
  if (task == "teleclone") {
    branches = static_cast<int>(rep.at("distribution").size());
    min_fid = rep.at("distribution_min_fidelity").get<double>();
    mean_fid = rep.at("distribution_mean_fidelity").get<double>();
    assignment = "-";
  } else if (task == "ric") {
    branches = rep.at("summary").at("branches").get<int>();
    min_fid = rep.at("summary").at("min_fidelity").get<double>();
    mean_fid = rep.at("summary").at("mean_fidelity").get<double>();
  } else if (task == "end_to_end") {
    branches = rep.at("overall").at("branches").get<int>();
    min_fid = rep.at("overall").at("min_fidelity").get<double>();
    mean_fid = rep.at("overall").at("mean_fidelity").get<double>();
  } else {
    throw std::invalid_argument("csv output supports teleclone, ric, end_to_end");
  }
  return csv_header() + "\n" +
         csv_row(task, cfg.dim, family_tag(cfg.channel), assignment, branches, min_fid, mean_fid,
                 cfg.input_seed) +
         "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic qudit simulator for remote concentration of quantum information"};
  int dim = 2;
  std::string task = "ric";
  std::string channel_file;
  std::string assignment = "fig1";
  double p = 0.5;
  std::uint64_t seed = 1;
  int samples = 0;
  bool enumerate_flag = false;
  std::string out;
  std::string dims = "2,3";

  app.add_option("--dim", dim, "qudit dimension, 2 to 7");
  app.add_option("--task", task, "teleclone|ric|end_to_end|analyze|search|verify");
  app.add_option("--channel-file", channel_file, "JSON file describing the channel");
  app.add_option("--assignment", assignment, "fig1|fig2|fig3|alt4|alt5|alt6 or a code like acb");
  app.add_option("--p", p, "weight of the first clone");
  app.add_option("--seed", seed, "seed for the input state and for sampling");
  app.add_option("--samples", samples, "sampled branches per run; 0 enumerates all");
  app.add_flag("--enumerate", enumerate_flag, "force full branch enumeration");
  app.add_option("--out", out, "output file (.json or .csv); stdout when omitted");
  app.add_option("--dims", dims, "comma-separated dimensions for task=verify");
  CLI11_PARSE(app, argc, argv);

  try {
    if (dim < 2 || dim > 7)
      throw std::invalid_argument("dimension must be between 2 and 7; larger systems are rejected");
    if (samples > 0 && enumerate_flag)
      throw std::invalid_argument("--samples and --enumerate are mutually exclusive");

    ExperimentConfig cfg;
    cfg.dim = dim;
    cfg.task = task;
    cfg.assignment = assignment;
    cfg.p = p;
    cfg.input_seed = seed;
    cfg.enumerate_all = samples == 0;
    cfg.samples = samples;
    cfg.sample_seed = seed;
    if (!channel_file.empty()) {
      std::ifstream in(channel_file);
      if (!in) throw std::invalid_argument("cannot open channel file: " + channel_file);
      cfg.channel = channel_from_json(json::parse(in));
    }
    validate(cfg.channel, dim);

    if (!out.empty() && out.find('/') == std::string::npos) {
      if (const char* dir = std::getenv("QRIC_OUT_DIR"); dir && *dir)
        out = std::string(dir) + "/" + out;
    }
    cfg.out = out;

    const auto t0 = std::chrono::steady_clock::now();
    json rep;
    if (task == "teleclone")
      rep = run_teleclone(cfg);
    else if (task == "ric")
      rep = run_ric_task(cfg);
    else if (task == "end_to_end")
      rep = run_end_to_end_task(cfg);
    else if (task == "analyze")
      rep = run_analyze(cfg);
    else if (task == "search")
      rep = run_search(cfg);
    else if (task == "verify")
      rep = run_verify(parse_dims(dims));
    else
      throw std::invalid_argument("unknown task: " + task);
    const auto t1 = std::chrono::steady_clock::now();

    std::string payload;
    if (!out.empty() && out.size() > 4 && out.substr(out.size() - 4) == ".csv") {
      payload = csv_for(task, cfg, rep);
    } else {
      json envelope;
      envelope["config"] = config_to_json(cfg);
      envelope["report"] = std::move(rep);
      envelope["wall_time_ms"] =
          std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(t1 - t0).count();
      payload = envelope.dump(2) + "\n";
    }

    if (out.empty()) {
      std::cout << payload;
    } else {
      std::ofstream of(out);
      if (!of) throw std::invalid_argument("cannot open output file: " + out);
      of << payload;
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", e.what()}}.dump(2) << "\n";
    return 1;
  }
}
