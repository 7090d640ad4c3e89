#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "ddag/lds.hpp"
#include "ddag/reconstruct.hpp"

namespace ddag {

struct ExperimentConfig {
  int p = 10;
  int q = 2;
  std::vector<NoiseSpec> noises{NoiseSpec::iid(0.5)};
  std::vector<SamplingStrategy> strategies{SamplingStrategy::RestartRecord,
                                           SamplingStrategy::Continuous};
  int N = 64;
  std::vector<int> n_grid{10, 30, 100, 300, 1000, 3000, 10000};
  int omega_index = 17;
  int trials = 50;
  std::uint64_t seed = 1;
  std::optional<double> gamma_override;
  ParentRule parent_rule = ParentRule::FullPrefix;
  StartMode start = StartMode::Stationary;
  /// Worker threads; 0 picks the hardware concurrency.
  int threads = 0;
  /// When false the wall_time_ms column is written as 0 so repeated runs
  /// produce identical bytes.
  bool record_timing = false;

  void validate() const;
  FrequencyPoint omega() const { return FrequencyPoint::from_bin(omega_index, N); }
};

struct ExperimentRecord {
  int p = 0;
  int q = 0;
  NoiseSpec noise;
  SamplingStrategy strategy = SamplingStrategy::RestartRecord;
  int N = 0;
  int omega_index = 0;
  int n = 0;
  int trials = 0;
  int success_count = 0;
  double empirical_recovery = 0.0;
  double mean_shd = 0.0;
  double wall_time_ms = 0.0;
};

/// Recovery threshold: Δ/2 with Δ the brute-force deficit at ω when
/// p ≤ 14, otherwise β²σ(ω)/2.
double default_gamma(const LdsModel& model, FrequencyPoint omega);

/// One cell per (noise, strategy, n). Trial t uses the same random network
/// in every cell; simulation streams are keyed by (trial, cell).
std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& config);

/// Columns: p,q,noise,strategy,N,omega_index,n,trials,success_count,
/// empirical_recovery,mean_shd,wall_time_ms
void write_experiment_csv(std::ostream& os, const std::vector<ExperimentRecord>& records);

struct TailConfig {
  int p = 3;
  int q = 2;
  NoiseSpec noise = NoiseSpec::iid(0.5);
  int n = 10000;
  int N = 64;
  int trials = 1000;
  int omega_index = 17;
  std::uint64_t seed = 7;
  int grid_points = 20;
  StartMode start = StartMode::Stationary;
  int threads = 0;

  void validate() const;
};

struct TailRow {
  double t = 0.0;
  double empirical_rr = 0.0;
  double empirical_continuous = 0.0;
  double bound = 0.0;
  /// Standard error of the difference of the two empirical tails.
  double difference_se = 0.0;
};

struct TailReport {
  double m_bound = 1.0;
  std::vector<double> errors_rr;          // ‖Φ̂ − Φ̃‖ per replicate
  std::vector<double> errors_continuous;
  std::vector<TailRow> rows;
};

TailReport tail_experiment(const TailConfig& config);

void write_tail_csv(std::ostream& os, const TailReport& report);

/// Runs fn(job) for job = 0..jobs−1 on a pool of worker threads.
void parallel_for(int jobs, int threads, const std::function<void(int)>& fn);

}  // namespace ddag
