#pragma once

#include <span>
#include <vector>

#include "ddag/graph.hpp"
#include "ddag/lds.hpp"
#include "ddag/numeric.hpp"

namespace ddag {

/// Spectrogram estimate Φ̂(ω) = (1/n) Σ_r x^r(ω) x^r(ω)*.
struct PsdmEstimate {
  FrequencyPoint omega{0.0};
  CMatrix matrix;
  int n = 0;
  int N = 0;
};

/// Streaming form of estimate_psdm: feed trajectories one at a time.
class PsdmAccumulator {
 public:
  PsdmAccumulator(int p, int N, FrequencyPoint omega);

  void add(std::span<const double> trajectory);
  int count() const { return count_; }
  PsdmEstimate finish() const;

 private:
  int p_;
  int N_;
  FrequencyPoint omega_;
  std::vector<Complex> twiddles_;
  CMatrix sum_;
  int count_ = 0;
};

PsdmEstimate estimate_psdm(const TrajectorySet& traj, FrequencyPoint omega);

/// Conditional PSD f(i, C, ω) = Φ_ii − Φ_iC Φ_CC^{−1} Φ_Ci.
struct CpsdValue {
  NodeId node = 0;
  NodeSet cond;
  double omega = 0.0;
  double value = 0.0;
  bool ridge_applied = false;
  bool clamped = false;  // raw value was negative and was set to 0
};

/// Throws ConfigError if i ∈ C or the matrix is not Hermitian, and
/// NumericalError if Φ_CC cannot be factorised or the result carries an
/// imaginary part above 1e−9.
CpsdValue cpsd_f(const CMatrix& psdm, NodeId i, const NodeSet& cond, FrequencyPoint omega);

/// Evaluates f(·, C, ω) for one conditioning set and many target nodes with
/// a single factorisation of Φ_CC.
class ConditionedPsdm {
 public:
  ConditionedPsdm(const CMatrix& psdm, NodeSet cond);

  /// f(i, C). `i` must not belong to C.
  double operator()(NodeId i) const;
  bool ridge_applied() const { return ridge_applied_; }
  bool clamped(NodeId i) const;
  const NodeSet& cond() const { return cond_; }

 private:
  double raw(NodeId i) const;

  NodeSet cond_;
  RVector diag_;
  CMatrix cross_;   // Φ_·C (p × |C|)
  CMatrix solved_;  // Φ_CC^{−1} Φ_C,· (|C| × p)
  bool ridge_applied_ = false;
};

/// Minimiser of f(j, C, ω) − σ(ω) over the grid, nodes j with parents and
/// C ⊆ nd(j) missing at least one parent.
struct DeficitResult {
  double delta = 0.0;
  NodeId node = 0;
  NodeSet cond;
  double omega = 0.0;
};

struct DeficitOptions {
  /// Restrict C to ancestral sets.
  bool ancestral_only = false;
};

inline constexpr int kMaxDeficitNodes = 14;

/// Brute-force CPSD deficit on the population PSDM. Requires at least one
/// edge and p ≤ 14.
DeficitResult cpsd_deficit(const LdsModel& model, std::span<const FrequencyPoint> grid,
                           const DeficitOptions& options = {});

/// β² · min_ω σ(ω), a certified floor for the deficit over ancestral sets.
double deficit_lower_bound(const LdsModel& model, std::span<const FrequencyPoint> grid);

}  // namespace ddag
