#include "ddag/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "ddag/errors.hpp"

namespace ddag {

namespace {
// q ln(p/q), extended continuously by 0 at q = 0.
double q_log_p_over_q(int p, int q) {
  if (q == 0) return 0.0;
  return q * std::log(static_cast<double>(p) / q);
}
}  // namespace

double minimax_lower_bound(int p, int q, double beta, double M, double delta) {
  if (p < 1 || q < 0) throw ConfigError("lower bound: need p >= 1 and q >= 0");
  if (2 * q > p) throw ConfigError("lower bound requires q <= p/2");
  if (!(delta > 0.0 && delta <= 0.5)) throw ConfigError("lower bound requires 0 < delta <= 1/2");
  if (!(M > 1.0)) throw ConfigError("lower bound requires M > 1");
  if (!(beta > 0.0)) throw ConfigError("lower bound requires beta > 0");
  const double b2 = beta * beta;
  const double edge_term = std::log(static_cast<double>(p)) / (2.0 * b2 + b2 * b2);
  const double degree_term = q_log_p_over_q(p, q) / (M * M - 1.0);
  return (1.0 - 2.0 * delta) * std::max(edge_term, degree_term);
}

double recovery_upper_bound(int p, int q, double M, double epsilon2, double delta) {
  if (p < 1 || q < 0 || q > p) throw ConfigError("upper bound: need p >= 1 and 0 <= q <= p");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("upper bound requires 0 < delta < 1");
  if (!(epsilon2 > 0.0)) throw ConfigError("upper bound requires epsilon2 > 0");
  if (!(M > 0.0)) throw ConfigError("upper bound requires M > 0");
  const double m6 = std::pow(M, 6);
  const double complexity = 6.0 * (q + 1) + q_log_p_over_q(p, q) + std::log(kUnionConstant / delta);
  return 10368.0 * m6 * complexity / (epsilon2 * epsilon2);
}

long min_trajectory_length(double c_decay, double rho, double epsilon1) {
  if (!(rho > 1.0)) throw ConfigError("trajectory length requires rho > 1");
  if (!(epsilon1 > 0.0)) throw ConfigError("trajectory length requires epsilon1 > 0");
  if (!(c_decay >= 0.0)) throw ConfigError("trajectory length requires C >= 0");
  const double r = 1.0 / rho;
  double x = 2.0 * c_decay * r / ((1.0 - r) * (1.0 - r) * epsilon1);
  // Snap values that are an integer up to rounding so ⌈·⌉ does not jump.
  const double nearest = std::round(x);
  if (std::abs(x - nearest) <= 1e-9 * std::max(1.0, std::abs(x))) x = nearest;
  return static_cast<long>(std::ceil(x)) + 1;
}

double psdm_tail_bound(double t, long n, double M, int p) {
  const double exponent = -t * t * static_cast<double>(n) / (128.0 * M * M) + 6.0 * p;
  if (exponent >= 0.0) return 1.0;
  return std::exp(exponent);
}

}  // namespace ddag
