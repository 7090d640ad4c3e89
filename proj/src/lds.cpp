#include "ddag/lds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>

#include "ddag/errors.hpp"

namespace ddag {

void NoiseSpec::validate() const {
  if (!(sigma_w > 0.0) || !std::isfinite(sigma_w)) {
    throw ConfigError("noise variance sigma_w must be positive");
  }
  if (kind == NoiseKind::Ar1 && !(alpha >= 0.0 && alpha < 1.0)) {
    throw ConfigError("AR(1) noise coefficient alpha must lie in [0, 1)");
  }
}

double NoiseSpec::psd(FrequencyPoint omega) const {
  if (kind == NoiseKind::Iid) return sigma_w;
  const Complex denom = 1.0 - alpha * std::polar(1.0, -omega.omega());
  return sigma_w / std::norm(denom);
}

double NoiseSpec::stationary_variance() const {
  if (kind == NoiseKind::Iid) return sigma_w;
  return sigma_w / (1.0 - alpha * alpha);
}

std::string to_string(NoiseKind kind) { return kind == NoiseKind::Iid ? "iid" : "ar1"; }

NoiseKind noise_kind_from_string(const std::string& s) {
  if (s == "iid" || s == "IID") return NoiseKind::Iid;
  if (s == "ar1" || s == "AR1") return NoiseKind::Ar1;
  throw ConfigError("unknown noise kind '" + s + "' (expected iid or ar1)");
}

std::string to_string(SamplingStrategy s) {
  return s == SamplingStrategy::RestartRecord ? "rr" : "continuous";
}

SamplingStrategy strategy_from_string(const std::string& s) {
  if (s == "rr" || s == "restart" || s == "RestartRecord") return SamplingStrategy::RestartRecord;
  if (s == "continuous" || s == "cont" || s == "Continuous") return SamplingStrategy::Continuous;
  throw ConfigError("unknown sampling strategy '" + s + "' (expected rr or continuous)");
}

std::vector<FrequencyPoint> omega_grid(int points) {
  if (points < 1) throw ConfigError("omega grid needs at least one point");
  std::vector<FrequencyPoint> grid;
  grid.reserve(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) grid.push_back(FrequencyPoint::from_bin(k, points));
  return grid;
}

namespace {

// State-space form z(t) = F z(t−1) + v(t) with Cov v = S. For Iid noise
// z = x; for Ar1 noise z = (x, e).
struct AugmentedSystem {
  RMatrix F;
  RMatrix S;
};

AugmentedSystem augmented(const RMatrix& B, const NoiseSpec& noise) {
  const auto p = B.rows();
  if (noise.kind == NoiseKind::Iid) {
    return {B, noise.sigma_w * RMatrix::Identity(p, p)};
  }
  AugmentedSystem sys{RMatrix::Zero(2 * p, 2 * p), RMatrix::Zero(2 * p, 2 * p)};
  sys.F.topLeftCorner(p, p) = B;
  sys.F.topRightCorner(p, p) = noise.alpha * RMatrix::Identity(p, p);
  sys.F.bottomRightCorner(p, p) = noise.alpha * RMatrix::Identity(p, p);
  const RMatrix block = noise.sigma_w * RMatrix::Identity(p, p);
  sys.S << block, block, block, block;
  return sys;
}

std::vector<RMatrix> autocorr_of(const RMatrix& B, const NoiseSpec& noise, int max_lag) {
  if (max_lag < 0) throw ConfigError("autocorr: max_lag must be >= 0");
  const auto p = B.rows();
  const auto sys = augmented(B, noise);
  RMatrix Rz = lyapunov_solve(sys.F, sys.S);
  std::vector<RMatrix> out;
  out.reserve(static_cast<std::size_t>(max_lag) + 1);
  for (int k = 0; k <= max_lag; ++k) {
    out.emplace_back(Rz.topLeftCorner(p, p));
    Rz = sys.F * Rz;
  }
  return out;
}

CMatrix psdm_of(const RMatrix& B, const NoiseSpec& noise, FrequencyPoint omega) {
  const auto p = B.rows();
  const CMatrix IminusH =
      CMatrix::Identity(p, p) - B.cast<Complex>() * std::polar(1.0, -omega.omega());
  Eigen::PartialPivLU<CMatrix> lu(IminusH);
  if (!(std::abs(lu.determinant()) > 1e-14)) {
    throw NumericalError("exact_psdm: I - H(omega) is singular");
  }
  const CMatrix T = lu.inverse();
  return hermitian_part(noise.psd(omega) * T * T.adjoint());
}

void check_model_shape(const Dag& dag, const RMatrix& B) {
  if (B.rows() != dag.size() || B.cols() != dag.size()) {
    throw ConfigError("coefficient matrix must be p x p");
  }
  for (int i = 0; i < dag.size(); ++i) {
    for (int j = 0; j < dag.size(); ++j) {
      if ((B(i, j) != 0.0) != dag.has_edge(j, i)) {
        throw ConfigError("support of B does not match the edge set at (" +
                          std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
      }
    }
  }
}

}  // namespace

ModelConstants compute_constants(const Dag& dag, const RMatrix& B, const NoiseSpec& noise,
                                 std::span<const FrequencyPoint> grid) {
  ModelConstants c;
  c.beta = std::numeric_limits<double>::infinity();
  for (const auto& e : dag.edges()) c.beta = std::min(c.beta, std::abs(B(e.to, e.from)));

  c.m_bound = 1.0;
  for (const auto& omega : grid) {
    const auto range = hermitian_eigen_range(psdm_of(B, noise, omega));
    if (!(range.min > 0.0)) throw NumericalError("PSDM is not positive definite");
    c.m_bound = std::max({c.m_bound, range.max, 1.0 / range.min});
  }

  // Decay fit: rho^{-1} is the largest successive norm ratio (floored at
  // 0.05), then c_decay is the smallest constant covering every lag.
  constexpr int kLags = 128;
  const auto R = autocorr_of(B, noise, kLags);
  std::vector<double> norms;
  norms.reserve(R.size());
  for (const auto& Rk : R) norms.push_back(spectral_norm(Rk));
  auto max_ratio = [&](int from) {
    double r = 0.0;
    for (int k = std::max(from, 1); k <= kLags; ++k) {
      if (norms[static_cast<std::size_t>(k - 1)] > 1e-12 * norms[0]) {
        r = std::max(r, norms[static_cast<std::size_t>(k)] / norms[static_cast<std::size_t>(k - 1)]);
      }
    }
    return r;
  };
  double inv_rho = max_ratio(1);
  if (inv_rho >= 1.0) inv_rho = max_ratio(kLags / 2);
  if (inv_rho >= 1.0) throw NumericalError("autocorrelation does not decay geometrically");
  inv_rho = std::max(inv_rho, 0.05);
  c.rho = 1.0 / inv_rho;
  c.c_decay = 0.0;
  for (int k = 0; k <= kLags; ++k) {
    c.c_decay = std::max(c.c_decay, norms[static_cast<std::size_t>(k)] * std::pow(c.rho, k));
  }
  return c;
}

LdsModel make_model(const Dag& dag, RMatrix B, const NoiseSpec& noise) {
  noise.validate();
  check_model_shape(dag, B);
  if (dag.edges().size() > 0 && !(spectral_norm(B) < 1.0)) {
    throw ConfigError("coefficient matrix must have spectral norm below 1");
  }
  const auto grid = omega_grid(kDefaultGridPoints);
  LdsModel m{dag, std::move(B), noise, {}};
  m.constants = compute_constants(m.dag, m.B, noise, grid);
  return m;
}

LdsModel build_model(const Dag& dag, const NoiseSpec& noise, std::uint64_t seed) {
  noise.validate();
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> magnitude(0.5, 1.0);
  std::bernoulli_distribution sign(0.5);
  RMatrix B = RMatrix::Zero(dag.size(), dag.size());
  for (const auto& e : dag.edges()) {
    const double w = magnitude(rng);
    B(e.to, e.from) = sign(rng) ? w : -w;
  }
  if (!dag.edges().empty()) {
    B /= 1.002 * spectral_norm(B);
  }
  return make_model(dag, std::move(B), noise);
}

CMatrix exact_psdm(const LdsModel& model, FrequencyPoint omega) {
  return psdm_of(model.B, model.noise, omega);
}

std::vector<RMatrix> autocorr(const LdsModel& model, int max_lag) {
  return autocorr_of(model.B, model.noise, max_lag);
}

CMatrix expected_psdm_finite_n(const LdsModel& model, FrequencyPoint omega, int N) {
  if (N < 1) throw ConfigError("expected_psdm_finite_n: N must be >= 1");
  const auto R = autocorr(model, N - 1);
  CMatrix out = R[0].cast<Complex>();
  for (int k = 1; k < N; ++k) {
    const double weight = static_cast<double>(N - k) / static_cast<double>(N);
    const Complex phase = std::polar(1.0, -std::fmod(omega.omega() * k, kTwoPi));
    const auto& Rk = R[static_cast<std::size_t>(k)];
    // R(−k) = R(k)ᵀ pairs with e^{+iωk}.
    out += weight * (phase * Rk.cast<Complex>() + std::conj(phase) * Rk.transpose().cast<Complex>());
  }
  return hermitian_part(out);
}

long default_burn_in(int N) { return std::max(10L * N, 1000L); }

std::span<const double> TrajectorySet::trajectory(int r) const {
  const auto len = static_cast<std::size_t>(N) * static_cast<std::size_t>(p);
  return std::span<const double>(data).subspan(static_cast<std::size_t>(r) * len, len);
}

double TrajectorySet::at(int r, int t, int node) const {
  return data[(static_cast<std::size_t>(r) * static_cast<std::size_t>(N) + static_cast<std::size_t>(t)) *
                  static_cast<std::size_t>(p) +
              static_cast<std::size_t>(node)];
}

struct Simulator::State {
  std::vector<double> x;
  std::vector<double> e;
  std::vector<double> next;
  std::normal_distribution<double> gauss{0.0, 1.0};
};

Simulator::Simulator(const LdsModel& model) : p_(model.size()), noise_(model.noise) {
  noise_.validate();
  parents_.resize(static_cast<std::size_t>(p_));
  for (const auto& e : model.dag.edges()) {
    parents_[static_cast<std::size_t>(e.to)].emplace_back(e.from, model.B(e.to, e.from));
  }
  const auto sys = augmented(model.B, noise_);
  const RMatrix Rz = lyapunov_solve(sys.F, sys.S);
  // The AR(1) augmented covariance is singular at source nodes (x_i = e_i),
  // so factor through the eigendecomposition instead of Cholesky.
  Eigen::SelfAdjointEigenSolver<RMatrix> eig(Rz);
  const RVector lambda = eig.eigenvalues();
  if (lambda.minCoeff() < -1e-9 * std::max(1.0, lambda.maxCoeff())) {
    throw NumericalError("stationary covariance is not positive semidefinite");
  }
  stationary_factor_ = eig.eigenvectors() * lambda.cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

void Simulator::start_state(State& s, Rng& rng, const SimulationOptions& options, int N) const {
  const auto p = static_cast<std::size_t>(p_);
  if (options.start == StartMode::Stationary) {
    const auto dim = stationary_factor_.rows();
    RVector u(dim);
    for (Eigen::Index k = 0; k < dim; ++k) u[k] = s.gauss(rng);
    const RVector z = stationary_factor_ * u;
    for (std::size_t i = 0; i < p; ++i) s.x[i] = z[static_cast<Eigen::Index>(i)];
    if (noise_.kind == NoiseKind::Ar1) {
      for (std::size_t i = 0; i < p; ++i) s.e[i] = z[static_cast<Eigen::Index>(p + i)];
    }
    return;
  }
  std::fill(s.x.begin(), s.x.end(), 0.0);
  const double sd = std::sqrt(noise_.stationary_variance());
  for (std::size_t i = 0; i < p; ++i) s.e[i] = sd * s.gauss(rng);
  const long burn = options.burn_in.value_or(default_burn_in(N));
  for (long t = 0; t < burn; ++t) step(s, rng);
}

void Simulator::step(State& s, Rng& rng) const {
  const double sd = std::sqrt(noise_.sigma_w);
  const bool ar1 = noise_.kind == NoiseKind::Ar1;
  for (std::size_t i = 0; i < static_cast<std::size_t>(p_); ++i) {
    const double w = sd * s.gauss(rng);
    s.e[i] = ar1 ? noise_.alpha * s.e[i] + w : w;
    double v = s.e[i];
    for (const auto& [j, b] : parents_[i]) v += b * s.x[static_cast<std::size_t>(j)];
    s.next[i] = v;
  }
  std::swap(s.x, s.next);
}

void Simulator::generate(SamplingStrategy strategy, int n, int N, std::uint64_t seed,
                         const SimulationOptions& options,
                         const std::function<void(int, std::span<const double>)>& sink) const {
  if (n < 1 || N < 1) throw ConfigError("simulate: n and N must be >= 1");
  const auto p = static_cast<std::size_t>(p_);
  Rng rng = make_rng(seed);
  State s;
  s.x.assign(p, 0.0);
  s.e.assign(p, 0.0);
  s.next.assign(p, 0.0);
  std::vector<double> buffer(p * static_cast<std::size_t>(N));

  // A stationary start already is the first recorded sample.
  const bool first_is_start = options.start == StartMode::Stationary;
  auto record = [&](bool fresh) {
    for (int t = 0; t < N; ++t) {
      if (!(fresh && first_is_start && t == 0)) step(s, rng);
      std::copy(s.x.begin(), s.x.end(), buffer.begin() + static_cast<std::ptrdiff_t>(t * p));
    }
  };

  if (strategy == SamplingStrategy::RestartRecord) {
    for (int r = 0; r < n; ++r) {
      start_state(s, rng, options, N);
      record(true);
      sink(r, buffer);
    }
  } else {
    start_state(s, rng, options, N);
    for (int r = 0; r < n; ++r) {
      record(r == 0);
      sink(r, buffer);
    }
  }
}

TrajectorySet Simulator::simulate(SamplingStrategy strategy, int n, int N, std::uint64_t seed,
                                  const SimulationOptions& options) const {
  TrajectorySet ts;
  ts.strategy = strategy;
  ts.start = options.start;
  ts.n = n;
  ts.N = N;
  ts.p = p_;
  ts.seed = seed;
  ts.burn_in = options.start == StartMode::BurnIn ? options.burn_in.value_or(default_burn_in(N)) : 0;
  const auto len = static_cast<std::size_t>(N) * static_cast<std::size_t>(p_);
  ts.data.resize(static_cast<std::size_t>(std::max(n, 0)) * len);
  generate(strategy, n, N, seed, options, [&](int r, std::span<const double> traj) {
    std::copy(traj.begin(), traj.end(), ts.data.begin() + static_cast<std::ptrdiff_t>(r * len));
  });
  return ts;
}

TrajectorySet simulate(const LdsModel& model, SamplingStrategy strategy, int n, int N,
                       std::uint64_t seed, const SimulationOptions& options) {
  return Simulator(model).simulate(strategy, n, N, seed, options);
}

}  // namespace ddag
