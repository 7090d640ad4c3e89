#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

#include "ddag/bounds.hpp"
#include "ddag/cpsd.hpp"
#include "ddag/errors.hpp"
#include "ddag/graph.hpp"
#include "ddag/harness.hpp"
#include "ddag/io.hpp"
#include "ddag/lds.hpp"
#include "ddag/reconstruct.hpp"
#include "ddag/rng.hpp"

using namespace ddag;

namespace {

enum ExitCode { kOk = 0, kConfig = 1, kNumerical = 2, kIo = 3 };

// Writes to `path`, or stdout when the path is empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  write_text_file(path, text);
}

struct NoiseArgs {
  std::string kind = "iid";
  double sigma_w = 0.5;
  double alpha = 0.5;

  void add(CLI::App* app) {
    app->add_option("--noise", kind, "Noise model: iid or ar1")->check(CLI::IsMember({"iid", "ar1"}));
    app->add_option("--sigma-w", sigma_w, "Innovation variance");
    app->add_option("--alpha", alpha, "AR(1) coefficient");
  }
  NoiseSpec spec() const {
    return noise_kind_from_string(kind) == NoiseKind::Ar1 ? NoiseSpec::ar1(sigma_w, alpha)
                                                          : NoiseSpec::iid(sigma_w);
  }
};

StartMode start_from_string(const std::string& s) {
  if (s == "stationary") return StartMode::Stationary;
  if (s == "burn_in") return StartMode::BurnIn;
  throw ConfigError("start must be stationary or burn_in");
}

ParentRule rule_from_string(const std::string& s) {
  if (s == "full_prefix") return ParentRule::FullPrefix;
  if (s == "optimal_set") return ParentRule::OptimalSet;
  throw ConfigError("parent rule must be full_prefix or optimal_set");
}

FrequencyPoint pick_omega(const std::optional<double>& omega, const std::optional<long>& index, int N) {
  if (omega && index) throw ConfigError("give either --omega or --omega-index, not both");
  if (omega) return FrequencyPoint(*omega);
  return FrequencyPoint::from_bin(index.value_or(17), N);
}

LdsModel load_model(const std::string& path) { return model_from_json(read_json_file(path)); }

std::string json_text(const Json& j) { return j.dump(2) + "\n"; }

int run(int argc, char** argv) {
  CLI::App app{"Structure recovery for linear dynamical systems from power spectra"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Draw a random DAG and LDS model");
  int gen_p = 10, gen_q = 2;
  std::uint64_t gen_seed = 1;
  std::string gen_graph, gen_out, gen_edges;
  NoiseArgs gen_noise;
  gen->add_option("--p", gen_p, "Number of nodes");
  gen->add_option("--q", gen_q, "Maximum in-degree");
  gen->add_option("--seed", gen_seed, "Random seed");
  gen->add_option("--graph", gen_graph, "Use this edge list instead of a random DAG");
  gen->add_option("--out", gen_out, "Model JSON (default stdout)");
  gen->add_option("--edges-out", gen_edges, "Also write the edge list here");
  gen_noise.add(gen);
  gen->callback([&] {
    Dag g = [&] {
      if (gen_graph.empty()) return random_dag(gen_p, gen_q, gen_seed);
      std::ifstream in(gen_graph);
      if (!in) throw IoError("cannot open " + gen_graph);
      return read_edge_list(in);
    }();
    const LdsModel m = build_model(g, gen_noise.spec(), derive_seed(gen_seed, {1}));
    emit(gen_out, json_text(model_to_json(m)));
    if (!gen_edges.empty()) {
      std::ostringstream os;
      write_edge_list(os, m.dag);
      write_text_file(gen_edges, os.str());
    }
  });

  // simulate
  auto* sim = app.add_subcommand("simulate", "Generate trajectories from a model");
  std::string sim_model, sim_out, sim_strategy = "rr", sim_start = "burn_in";
  int sim_n = 100, sim_N = 64;
  std::uint64_t sim_seed = 1;
  std::optional<long> sim_burn;
  sim->add_option("--model", sim_model, "Model JSON")->required();
  sim->add_option("--out", sim_out, "Output directory")->required();
  sim->add_option("--strategy", sim_strategy, "rr or continuous")->check(CLI::IsMember({"rr", "continuous"}));
  sim->add_option("--n", sim_n, "Number of trajectories");
  sim->add_option("--N", sim_N, "Samples per trajectory");
  sim->add_option("--seed", sim_seed, "Random seed");
  sim->add_option("--start", sim_start, "burn_in or stationary")->check(CLI::IsMember({"burn_in", "stationary"}));
  sim->add_option("--burn-in", sim_burn, "Burn-in steps (default max(10N, 1000))");
  sim->callback([&] {
    const LdsModel m = load_model(sim_model);
    SimulationOptions opt{start_from_string(sim_start), sim_burn};
    const auto ts = simulate(m, strategy_from_string(sim_strategy), sim_n, sim_N, sim_seed, opt);
    write_trajectories(sim_out, ts, m);
  });

  // estimate
  auto* est = app.add_subcommand("estimate", "Spectrogram PSDM estimate from trajectories");
  std::string est_manifest, est_out;
  std::optional<double> est_omega;
  std::optional<long> est_index;
  est->add_option("--manifest", est_manifest, "manifest.json written by simulate")->required();
  est->add_option("--omega", est_omega, "Frequency in radians");
  est->add_option("--omega-index", est_index, "DFT bin (default 17)");
  est->add_option("--out", est_out, "PSDM CSV (default stdout)");
  est->callback([&] {
    const auto ts = read_trajectories(est_manifest);
    const auto e = estimate_psdm(ts, pick_omega(est_omega, est_index, ts.N));
    std::ostringstream os;
    write_psdm_csv(os, e);
    emit(est_out, os.str());
  });

  // reconstruct
  auto* rec = app.add_subcommand("reconstruct", "Recover the DAG from a PSDM or trajectories");
  std::string rec_psdm, rec_manifest, rec_model, rec_out, rec_audit;
  std::string rec_rule = "full_prefix", rec_search = "exact";
  std::optional<double> rec_gamma, rec_omega;
  std::optional<long> rec_index;
  int rec_q = 2;
  bool rec_full_audit = false;
  auto* psdm_opt = rec->add_option("--psdm", rec_psdm, "PSDM CSV");
  auto* manifest_opt = rec->add_option("--manifest", rec_manifest, "Trajectory manifest");
  psdm_opt->excludes(manifest_opt);
  rec->add_option("--omega", rec_omega, "Frequency in radians (with --manifest)");
  rec->add_option("--omega-index", rec_index, "DFT bin (with --manifest, default 17)");
  rec->add_option("--q", rec_q, "Maximum in-degree");
  rec->add_option("--gamma", rec_gamma, "Parent threshold");
  rec->add_option("--model", rec_model, "Model JSON; gamma defaults to half its CPSD deficit");
  rec->add_option("--parent-rule", rec_rule, "full_prefix or optimal_set")
      ->check(CLI::IsMember({"full_prefix", "optimal_set"}));
  rec->add_option("--search", rec_search, "exact (|C| = q) or at_most (|C| <= q)")
      ->check(CLI::IsMember({"exact", "at_most"}));
  rec->add_flag("--full-audit", rec_full_audit, "Record every evaluated f value");
  rec->add_option("--out", rec_out, "Edge list (default stdout)");
  rec->add_option("--audit", rec_audit, "Audit JSON");
  rec->callback([&] {
    PsdmEstimate e;
    if (!rec_psdm.empty()) {
      if (rec_omega || rec_index) throw ConfigError("--omega/--omega-index apply only to --manifest");
      std::ifstream in(rec_psdm);
      if (!in) throw IoError("cannot open " + rec_psdm);
      e = read_psdm_csv(in);
    } else if (!rec_manifest.empty()) {
      const auto ts = read_trajectories(rec_manifest);
      e = estimate_psdm(ts, pick_omega(rec_omega, rec_index, ts.N));
    } else {
      throw ConfigError("reconstruct needs --psdm or --manifest");
    }
    ReconstructionParams params;
    params.q = rec_q;
    params.omega = e.omega;
    params.parent_rule = rule_from_string(rec_rule);
    params.search = rec_search == "at_most" ? SearchMode::AtMost : SearchMode::ExactSize;
    params.full_audit = rec_full_audit;
    if (rec_gamma) {
      params.gamma = *rec_gamma;
    } else if (!rec_model.empty()) {
      params.gamma = default_gamma(load_model(rec_model), e.omega);
    } else {
      throw ConfigError("reconstruct needs --gamma or --model");
    }
    const auto result = reconstruct(e.matrix, params);
    std::ostringstream os;
    write_edge_list(os, result.graph);
    emit(rec_out, os.str());
    if (!rec_audit.empty()) write_text_file(rec_audit, json_text(audit_to_json(result, params)));
  });

  // experiment
  auto* exp = app.add_subcommand("experiment", "Recovery rate over a grid of trajectory counts");
  std::string exp_config, exp_out;
  int exp_p = 0, exp_q = 0, exp_N = 0, exp_index = 0, exp_trials = 0, exp_threads = 0;
  std::uint64_t exp_seed = 0;
  double exp_gamma = 0.0;
  std::vector<int> exp_grid;
  std::vector<std::string> exp_noises, exp_strategies;
  std::string exp_rule, exp_start;
  bool exp_timing = false;
  exp->add_option("--config", exp_config, "JSON config; flags override its fields");
  exp->add_option("--out", exp_out, "Records CSV (default stdout)");
  auto* o_p = exp->add_option("--p", exp_p);
  auto* o_q = exp->add_option("--q", exp_q);
  auto* o_N = exp->add_option("--N", exp_N);
  auto* o_index = exp->add_option("--omega-index", exp_index);
  auto* o_trials = exp->add_option("--trials", exp_trials);
  auto* o_seed = exp->add_option("--seed", exp_seed);
  auto* o_threads = exp->add_option("--threads", exp_threads);
  auto* o_gamma = exp->add_option("--gamma", exp_gamma, "Fixed threshold instead of half the deficit");
  auto* o_grid = exp->add_option("--n-grid", exp_grid, "Ascending trajectory counts")->delimiter(',');
  auto* o_noise = exp->add_option("--noise", exp_noises, "iid and/or ar1 (sigma_w = alpha = 0.5)")
                      ->delimiter(',')
                      ->check(CLI::IsMember({"iid", "ar1"}));
  auto* o_strat = exp->add_option("--strategies", exp_strategies, "rr and/or continuous")
                      ->delimiter(',')
                      ->check(CLI::IsMember({"rr", "continuous"}));
  auto* o_rule = exp->add_option("--parent-rule", exp_rule)->check(CLI::IsMember({"full_prefix", "optimal_set"}));
  auto* o_start = exp->add_option("--start", exp_start)->check(CLI::IsMember({"stationary", "burn_in"}));
  exp->add_flag("--record-timing", exp_timing, "Fill wall_time_ms (output is then not reproducible)");
  exp->callback([&] {
    ExperimentConfig c;
    if (!exp_config.empty()) c = experiment_config_from_json(read_json_file(exp_config));
    if (o_p->count()) c.p = exp_p;
    if (o_q->count()) c.q = exp_q;
    if (o_N->count()) c.N = exp_N;
    if (o_index->count()) c.omega_index = exp_index;
    if (o_trials->count()) c.trials = exp_trials;
    if (o_seed->count()) c.seed = exp_seed;
    if (o_threads->count()) c.threads = exp_threads;
    if (o_gamma->count()) c.gamma_override = exp_gamma;
    if (o_grid->count()) c.n_grid = exp_grid;
    if (o_noise->count()) {
      c.noises.clear();
      for (const auto& k : exp_noises)
        c.noises.push_back(k == "ar1" ? NoiseSpec::ar1(0.5, 0.5) : NoiseSpec::iid(0.5));
    }
    if (o_strat->count()) {
      c.strategies.clear();
      for (const auto& s : exp_strategies) c.strategies.push_back(strategy_from_string(s));
    }
    if (o_rule->count()) c.parent_rule = rule_from_string(exp_rule);
    if (o_start->count()) c.start = start_from_string(exp_start);
    if (exp_timing) c.record_timing = true;
    std::ostringstream os;
    write_experiment_csv(os, run_experiment(c));
    emit(exp_out, os.str());
  });

  // tail
  auto* tail = app.add_subcommand("tail", "Empirical tail of the PSDM estimation error");
  TailConfig tc;
  NoiseArgs tail_noise;
  std::string tail_out, tail_start = "stationary";
  tail->add_option("--p", tc.p);
  tail->add_option("--q", tc.q);
  tail->add_option("--n", tc.n, "Trajectories per estimate");
  tail->add_option("--N", tc.N);
  tail->add_option("--trials", tc.trials, "Estimates per strategy (>= 100)");
  tail->add_option("--omega-index", tc.omega_index);
  tail->add_option("--seed", tc.seed);
  tail->add_option("--grid-points", tc.grid_points);
  tail->add_option("--threads", tc.threads);
  tail->add_option("--start", tail_start)->check(CLI::IsMember({"stationary", "burn_in"}));
  tail->add_option("--out", tail_out, "Tail CSV (default stdout)");
  tail_noise.add(tail);
  tail->callback([&] {
    tc.noise = tail_noise.spec();
    tc.start = start_from_string(tail_start);
    std::ostringstream os;
    write_tail_csv(os, tail_experiment(tc));
    emit(tail_out, os.str());
  });

  // bounds
  auto* bnd = app.add_subcommand("bounds", "Evaluate a sample-complexity bound as JSON");
  std::string b_kind, b_model, b_out;
  int b_p = 10, b_q = 2;
  long b_n = 10000;
  double b_beta = 0.5, b_M = 2.0, b_delta = 0.1, b_eps2 = 0.01, b_c = 1.0, b_rho = 2.0, b_eps1 = 0.1,
         b_t = 1.0;
  bnd->add_option("--kind", b_kind, "minimax_lower, upper, min_trajectory_length or tail")
      ->required()
      ->check(CLI::IsMember({"minimax_lower", "upper", "min_trajectory_length", "tail"}));
  bnd->add_option("--model", b_model, "Take p, q, beta, M, C and rho from a model JSON");
  auto* ob_p = bnd->add_option("--p", b_p);
  auto* ob_q = bnd->add_option("--q", b_q);
  auto* ob_beta = bnd->add_option("--beta", b_beta);
  auto* ob_M = bnd->add_option("--M", b_M);
  auto* ob_c = bnd->add_option("--c-decay", b_c);
  auto* ob_rho = bnd->add_option("--rho", b_rho);
  bnd->add_option("--delta", b_delta);
  bnd->add_option("--epsilon2", b_eps2);
  bnd->add_option("--epsilon1", b_eps1);
  bnd->add_option("--t", b_t);
  bnd->add_option("--n", b_n);
  bnd->add_option("--out", b_out, "JSON (default stdout)");
  bnd->callback([&] {
    if (!b_model.empty()) {
      const LdsModel m = load_model(b_model);
      if (!ob_p->count()) b_p = m.size();
      if (!ob_q->count()) b_q = m.dag.max_in_degree();
      if (!ob_beta->count()) b_beta = m.constants.beta;
      if (!ob_M->count()) b_M = m.constants.m_bound;
      if (!ob_c->count()) b_c = m.constants.c_decay;
      if (!ob_rho->count()) b_rho = m.constants.rho;
    }
    Json report{{"kind", b_kind}};
    if (b_kind == "minimax_lower") {
      report["inputs"] = {{"p", b_p}, {"q", b_q}, {"beta", b_beta}, {"M", b_M}, {"delta", b_delta}};
      report["value"] = minimax_lower_bound(b_p, b_q, b_beta, b_M, b_delta);
    } else if (b_kind == "upper") {
      report["inputs"] = {{"p", b_p}, {"q", b_q}, {"M", b_M}, {"epsilon2", b_eps2}, {"delta", b_delta}};
      report["value"] = recovery_upper_bound(b_p, b_q, b_M, b_eps2, b_delta);
    } else if (b_kind == "min_trajectory_length") {
      report["inputs"] = {{"C_decay", b_c}, {"rho", b_rho}, {"epsilon1", b_eps1}};
      report["value"] = min_trajectory_length(b_c, b_rho, b_eps1);
    } else {
      report["inputs"] = {{"t", b_t}, {"n", b_n}, {"M", b_M}, {"p", b_p}};
      report["value"] = psdm_tail_bound(b_t, b_n, b_M, b_p);
    }
    emit(b_out, json_text(report));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  }
}
