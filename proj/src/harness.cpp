#include "ddag/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <thread>

#include "ddag/bounds.hpp"
#include "ddag/cpsd.hpp"
#include "ddag/errors.hpp"

namespace ddag {

void parallel_for(int jobs, int threads, const std::function<void(int)>& fn) {
  if (jobs <= 0) return;
  int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, jobs);
  if (workers == 1) {
    for (int j = 0; j < jobs; ++j) fn(j);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int j = next++; j < jobs; j = next++) {
        try {
          fn(j);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

void ExperimentConfig::validate() const {
  if (p < 1) throw ConfigError("p must be >= 1");
  if (q < 0 || q > p - 1) throw ConfigError("q must satisfy 0 <= q <= p-1");
  if (N < 1) throw ConfigError("N must be >= 1");
  if (omega_index < 0 || omega_index >= N) throw ConfigError("omega_index must satisfy 0 <= omega_index < N");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (noises.empty()) throw ConfigError("at least one noise model is required");
  if (strategies.empty()) throw ConfigError("at least one sampling strategy is required");
  if (n_grid.empty()) throw ConfigError("n grid must be nonempty");
  for (std::size_t k = 0; k < n_grid.size(); ++k) {
    if (n_grid[k] < 1) throw ConfigError("n grid entries must be >= 1");
    if (k > 0 && n_grid[k] <= n_grid[k - 1]) throw ConfigError("n grid must be strictly ascending");
  }
  for (const auto& noise : noises) noise.validate();
  if (gamma_override && !(*gamma_override > 0.0)) throw ConfigError("gamma must be positive");
}

double default_gamma(const LdsModel& model, FrequencyPoint omega) {
  if (model.dag.edges().empty()) {
    // Nothing to separate; any positive threshold yields the empty graph on
    // a population PSDM.
    return 0.5 * model.sigma(omega);
  }
  const std::vector<FrequencyPoint> grid{omega};
  if (model.size() <= kMaxDeficitNodes) return 0.5 * cpsd_deficit(model, grid).delta;
  return 0.5 * deficit_lower_bound(model, grid);
}

std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& config) {
  config.validate();
  const FrequencyPoint omega = config.omega();
  const auto n_noise = config.noises.size();
  const auto n_strat = config.strategies.size();
  const auto n_cells_n = config.n_grid.size();
  const auto cells = n_noise * n_strat * n_cells_n;
  const auto trials = static_cast<std::size_t>(config.trials);

  struct Outcome {
    bool success = false;
    int shd = 0;
    double ms = 0.0;
  };
  std::vector<Outcome> outcomes(cells * trials);
  auto cell_index = [&](std::size_t noise, std::size_t strat, std::size_t nk) {
    return (noise * n_strat + strat) * n_cells_n + nk;
  };

  const int jobs = static_cast<int>(trials * n_noise);
  parallel_for(jobs, config.threads, [&](int job) {
    const auto trial = static_cast<std::size_t>(job) / n_noise;
    const auto noise_k = static_cast<std::size_t>(job) % n_noise;
    const Dag dag = random_dag(config.p, config.q, derive_seed(config.seed, {0, trial}));
    const LdsModel model = build_model(dag, config.noises[noise_k], derive_seed(config.seed, {1, trial}));
    ReconstructionParams params;
    params.q = config.q;
    params.omega = omega;
    params.parent_rule = config.parent_rule;
    params.gamma = config.gamma_override.value_or(default_gamma(model, omega));
    const Simulator sim(model);
    SimulationOptions sim_options;
    sim_options.start = config.start;

    for (std::size_t s = 0; s < n_strat; ++s) {
      for (std::size_t nk = 0; nk < n_cells_n; ++nk) {
        const auto cell = cell_index(noise_k, s, nk);
        const auto start = std::chrono::steady_clock::now();
        PsdmAccumulator acc(config.p, config.N, omega);
        sim.generate(config.strategies[s], config.n_grid[nk], config.N,
                     derive_seed(config.seed, {2, trial, cell}), sim_options,
                     [&](int, std::span<const double> traj) { acc.add(traj); });
        const auto est = acc.finish();
        const auto result = reconstruct(est.matrix, params);
        Outcome o;
        o.success = graph_equal(result.graph, dag);
        o.shd = structural_hamming(result.graph, dag);
        o.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        outcomes[cell * trials + trial] = o;
      }
    }
  });

  std::vector<ExperimentRecord> records;
  records.reserve(cells);
  for (std::size_t noise_k = 0; noise_k < n_noise; ++noise_k) {
    for (std::size_t s = 0; s < n_strat; ++s) {
      for (std::size_t nk = 0; nk < n_cells_n; ++nk) {
        const auto cell = cell_index(noise_k, s, nk);
        ExperimentRecord r;
        r.p = config.p;
        r.q = config.q;
        r.noise = config.noises[noise_k];
        r.strategy = config.strategies[s];
        r.N = config.N;
        r.omega_index = config.omega_index;
        r.n = config.n_grid[nk];
        r.trials = config.trials;
        double shd_sum = 0.0;
        double ms = 0.0;
        for (std::size_t t = 0; t < trials; ++t) {
          const auto& o = outcomes[cell * trials + t];
          r.success_count += o.success ? 1 : 0;
          shd_sum += o.shd;
          ms += o.ms;
        }
        r.empirical_recovery = static_cast<double>(r.success_count) / config.trials;
        r.mean_shd = shd_sum / config.trials;
        r.wall_time_ms = config.record_timing ? ms : 0.0;
        records.push_back(r);
      }
    }
  }
  return records;
}

void write_experiment_csv(std::ostream& os, const std::vector<ExperimentRecord>& records) {
  os << "p,q,noise,strategy,N,omega_index,n,trials,success_count,empirical_recovery,mean_shd,wall_time_ms\n";
  os << std::fixed;
  for (const auto& r : records) {
    os << r.p << ',' << r.q << ',' << to_string(r.noise.kind) << ',' << to_string(r.strategy) << ','
       << r.N << ',' << r.omega_index << ',' << r.n << ',' << r.trials << ',' << r.success_count << ','
       << std::setprecision(6) << r.empirical_recovery << ',' << r.mean_shd << ','
       << std::setprecision(3) << r.wall_time_ms << '\n';
  }
}

void TailConfig::validate() const {
  if (p < 1) throw ConfigError("p must be >= 1");
  if (q < 0 || q > p - 1) throw ConfigError("q must satisfy 0 <= q <= p-1");
  if (n < 1 || N < 1) throw ConfigError("n and N must be >= 1");
  if (trials < 100) throw ConfigError("tail experiment needs at least 100 trials");
  if (omega_index < 0 || omega_index >= N) throw ConfigError("omega_index must satisfy 0 <= omega_index < N");
  if (grid_points < 1) throw ConfigError("grid_points must be >= 1");
  noise.validate();
}

TailReport tail_experiment(const TailConfig& config) {
  config.validate();
  const FrequencyPoint omega = FrequencyPoint::from_bin(config.omega_index, config.N);
  const Dag dag = random_dag(config.p, config.q, derive_seed(config.seed, {0}));
  const LdsModel model = build_model(dag, config.noise, derive_seed(config.seed, {1}));
  const CMatrix expected = expected_psdm_finite_n(model, omega, config.N);
  const Simulator sim(model);
  SimulationOptions options;
  options.start = config.start;

  TailReport report;
  report.m_bound = model.constants.m_bound;
  const auto trials = static_cast<std::size_t>(config.trials);
  report.errors_rr.assign(trials, 0.0);
  report.errors_continuous.assign(trials, 0.0);

  parallel_for(static_cast<int>(2 * trials), config.threads, [&](int job) {
    const auto trial = static_cast<std::size_t>(job) / 2;
    const bool rr = job % 2 == 0;
    const auto strategy = rr ? SamplingStrategy::RestartRecord : SamplingStrategy::Continuous;
    PsdmAccumulator acc(config.p, config.N, omega);
    sim.generate(strategy, config.n, config.N, derive_seed(config.seed, {2, trial, rr ? 0u : 1u}),
                 options, [&](int, std::span<const double> traj) { acc.add(traj); });
    const double err = spectral_norm(CMatrix(acc.finish().matrix - expected));
    (rr ? report.errors_rr : report.errors_continuous)[trial] = err;
  });

  // Half of the t-grid resolves the observed error range, the other half
  // extends to where the bound falls below 1.
  const double m = report.m_bound;
  const double t_vacuous = std::sqrt(6.0 * config.p * 128.0 * m * m / config.n);
  const double observed =
      1.1 * std::max(*std::max_element(report.errors_rr.begin(), report.errors_rr.end()),
                     *std::max_element(report.errors_continuous.begin(), report.errors_continuous.end()));
  const double t_far = std::max(1.5 * t_vacuous, observed);
  const int near_points = (config.grid_points + 1) / 2;
  const int far_points = config.grid_points - near_points;
  std::vector<double> t_grid;
  for (int k = 1; k <= near_points; ++k) t_grid.push_back(observed * k / near_points);
  for (int k = 1; k <= far_points; ++k) t_grid.push_back(observed + (t_far - observed) * k / far_points);
  const double T = static_cast<double>(trials);
  auto tail = [&](const std::vector<double>& errs, double t) {
    return static_cast<double>(std::count_if(errs.begin(), errs.end(), [&](double e) { return e >= t; })) / T;
  };
  for (double t : t_grid) {
    TailRow row;
    row.t = t;
    row.empirical_rr = tail(report.errors_rr, row.t);
    row.empirical_continuous = tail(report.errors_continuous, row.t);
    row.bound = psdm_tail_bound(row.t, config.n, m, config.p);
    const double pooled = 0.5 * (row.empirical_rr + row.empirical_continuous);
    row.difference_se = std::sqrt(2.0 * pooled * (1.0 - pooled) / T);
    report.rows.push_back(row);
  }
  return report;
}

void write_tail_csv(std::ostream& os, const TailReport& report) {
  os << "t,empirical_rr,empirical_continuous,bound,difference_se\n";
  os << std::setprecision(10);
  for (const auto& r : report.rows) {
    os << r.t << ',' << r.empirical_rr << ',' << r.empirical_continuous << ',' << r.bound << ','
       << r.difference_se << '\n';
  }
}

}  // namespace ddag
