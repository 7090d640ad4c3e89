#pragma once

namespace ddag {

/// Trajectory count below which every estimator errs with probability at
/// least δ:
///   (1 − 2δ) · max( ln p / (2β² + β⁴), q ln(p/q) / (M² − 1) ).
/// Requires q ≤ p/2, 0 < δ ≤ 1/2, M > 1, β > 0.
double minimax_lower_bound(int p, int q, double beta, double M, double delta);

/// Multiplier c₀ of the union bound on |f̂ − f| (three events).
inline constexpr double kUnionConstant = 3.0;

/// Sufficient trajectory count for exact recovery with probability 1 − δ:
///   10368 M⁶ (6(q+1) + q ln(p/q) + ln(c₀/δ)) / ε₂².
/// The leading constant is order-level only.
double recovery_upper_bound(int p, int q, double M, double epsilon2, double delta);

/// Smallest N with N > 2Cρ⁻¹ / ((1 − ρ⁻¹)² ε₁), reported as ⌈·⌉ + 1.
long min_trajectory_length(double c_decay, double rho, double epsilon1);

/// min(1, exp(−t² n / (128 M²) + 6p)), the tail bound on ‖Φ̂ − Φ̃‖.
double psdm_tail_bound(double t, long n, double M, int p);

}  // namespace ddag
