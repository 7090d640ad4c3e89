#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ddag/graph.hpp"
#include "ddag/numeric.hpp"
#include "ddag/rng.hpp"

namespace ddag {

enum class NoiseKind { Iid, Ar1 };

/// Exogenous noise e(t), identical and independent across nodes.
///   Iid: e(t) = w(t)
///   Ar1: e(t) = α e(t−1) + w(t)
/// with w(t) ~ N(0, sigma_w·I).
struct NoiseSpec {
  NoiseKind kind = NoiseKind::Iid;
  double sigma_w = 0.5;
  double alpha = 0.0;

  static NoiseSpec iid(double sigma_w) { return {NoiseKind::Iid, sigma_w, 0.0}; }
  static NoiseSpec ar1(double sigma_w, double alpha) { return {NoiseKind::Ar1, sigma_w, alpha}; }

  void validate() const;

  /// σ(ω): sigma_w for Iid, sigma_w / |1 − α e^{−iω}|² for Ar1.
  double psd(FrequencyPoint omega) const;

  /// Var e(t) in steady state.
  double stationary_variance() const;
};

std::string to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(const std::string& s);

/// Model constants of the family the guarantees are stated for.
///   beta     smallest |B_ij| over edges (+inf for an edgeless graph)
///   m_bound  max over the ω grid of λ_max(Φ_x) and 1/λ_min(Φ_x), at least 1
///   c_decay, rho  fitted so that ‖R_x(k)‖ ≤ c_decay·rho^{−k} on every
///                 computed lag
struct ModelConstants {
  double beta = 0.0;
  double m_bound = 1.0;
  double c_decay = 0.0;
  double rho = 2.0;
};

/// x(t) = B x(t−1) + e(t), B(i,j) ≠ 0 exactly when j → i.
struct LdsModel {
  Dag dag;
  RMatrix B;
  NoiseSpec noise;
  ModelConstants constants;

  int size() const { return dag.size(); }
  double sigma(FrequencyPoint omega) const { return noise.psd(omega); }
};

/// Grid used for the eigenvalue bound M: ω_k = 2πk/points.
std::vector<FrequencyPoint> omega_grid(int points);
inline constexpr int kDefaultGridPoints = 64;

/// Draws Rademacher × Uniform(0.5, 1) weights on every edge and rescales B
/// by 1/(1.002‖B‖) (skipped when B = 0).
LdsModel build_model(const Dag& dag, const NoiseSpec& noise, std::uint64_t seed);

/// Wraps a caller-supplied coefficient matrix. Checks support(B) = edges and
/// ‖B‖ < 1, then computes the model constants.
LdsModel make_model(const Dag& dag, RMatrix B, const NoiseSpec& noise);

ModelConstants compute_constants(const Dag& dag, const RMatrix& B, const NoiseSpec& noise,
                                 std::span<const FrequencyPoint> grid);

/// Φ_x(ω) = (I − B e^{−iω})^{−1} σ(ω) (I − B e^{−iω})^{−*}.
CMatrix exact_psdm(const LdsModel& model, FrequencyPoint omega);

/// R_x(k) = E[x(k) x(0)ᵀ] for k = 0..max_lag.
std::vector<RMatrix> autocorr(const LdsModel& model, int max_lag);

/// Φ̃_x(ω) = (1/N) Σ_{|k|<N} (N − |k|) R_x(k) e^{−iωk}, the covariance of
/// an N-sample DFT.
CMatrix expected_psdm_finite_n(const LdsModel& model, FrequencyPoint omega, int N);

enum class SamplingStrategy { RestartRecord, Continuous };

std::string to_string(SamplingStrategy s);
SamplingStrategy strategy_from_string(const std::string& s);

/// How each independent realisation is started.
///   BurnIn      x = 0 with stationary e, then `burn_in` discarded steps
///   Stationary  first state drawn exactly from the stationary law
enum class StartMode { BurnIn, Stationary };

struct SimulationOptions {
  StartMode start = StartMode::BurnIn;
  /// Defaults to max(10·N, 1000) when unset.
  std::optional<long> burn_in;
};

long default_burn_in(int N);

/// n trajectories × N samples × p nodes, row-major by (trajectory, time).
struct TrajectorySet {
  SamplingStrategy strategy = SamplingStrategy::RestartRecord;
  StartMode start = StartMode::BurnIn;
  int n = 0;
  int N = 0;
  int p = 0;
  std::uint64_t seed = 0;
  long burn_in = 0;
  std::vector<double> data;

  std::span<const double> trajectory(int r) const;
  double at(int r, int t, int node) const;
};

/// Reusable generator for one model: caches the sparse parent structure
/// and the stationary covariance factor.
class Simulator {
 public:
  explicit Simulator(const LdsModel& model);

  /// Streams n trajectories of N samples to `sink(r, samples)` in order.
  /// `samples` is only valid during the call.
  void generate(SamplingStrategy strategy, int n, int N, std::uint64_t seed,
                const SimulationOptions& options,
                const std::function<void(int, std::span<const double>)>& sink) const;

  TrajectorySet simulate(SamplingStrategy strategy, int n, int N, std::uint64_t seed,
                         const SimulationOptions& options = {}) const;

  int size() const { return p_; }

 private:
  struct State;
  void start_state(State& s, Rng& rng, const SimulationOptions& options, int N) const;
  void step(State& s, Rng& rng) const;

  int p_;
  NoiseSpec noise_;
  std::vector<std::vector<std::pair<int, double>>> parents_;
  RMatrix stationary_factor_;  // square-root factor of R_z(0)
};

TrajectorySet simulate(const LdsModel& model, SamplingStrategy strategy, int n, int N,
                       std::uint64_t seed, const SimulationOptions& options = {});

}  // namespace ddag
