#include "ddag/cpsd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ddag/errors.hpp"

namespace ddag {

PsdmAccumulator::PsdmAccumulator(int p, int N, FrequencyPoint omega)
    : p_(p), N_(N), omega_(omega) {
  if (p < 1 || N < 1) throw ConfigError("PSDM estimator needs p >= 1 and N >= 1");
  twiddles_ = dft_twiddles(omega, N);
  sum_ = CMatrix::Zero(p, p);
}

void PsdmAccumulator::add(std::span<const double> trajectory) {
  const CVector x = dft_with_twiddles(trajectory, p_, twiddles_);
  sum_.selfadjointView<Eigen::Lower>().rankUpdate(x);
  ++count_;
}

PsdmEstimate PsdmAccumulator::finish() const {
  if (count_ < 1) throw ConfigError("PSDM estimate needs at least one trajectory");
  CMatrix m = sum_.selfadjointView<Eigen::Lower>();
  m /= static_cast<double>(count_);
  // Diagonal entries are sums of |x_i|², real by construction.
  m.diagonal() = m.diagonal().real().cast<Complex>();
  return {omega_, std::move(m), count_, N_};
}

PsdmEstimate estimate_psdm(const TrajectorySet& traj, FrequencyPoint omega) {
  if (traj.n < 1) throw ConfigError("PSDM estimate needs at least one trajectory");
  PsdmAccumulator acc(traj.p, traj.N, omega);
  for (int r = 0; r < traj.n; ++r) acc.add(traj.trajectory(r));
  return acc.finish();
}

namespace {

void check_psdm(const CMatrix& psdm) {
  if (psdm.rows() == 0 || psdm.rows() != psdm.cols()) {
    throw ConfigError("PSDM must be a nonempty square matrix");
  }
  if (!is_hermitian(psdm)) throw ConfigError("PSDM is not Hermitian");
}

void check_cond(const NodeSet& cond, int p) {
  for (std::size_t k = 0; k < cond.size(); ++k) {
    if (cond[k] < 0 || cond[k] >= p) throw ConfigError("conditioning node out of range");
    if (k > 0 && cond[k] <= cond[k - 1]) {
      throw ConfigError("conditioning set must be sorted and duplicate-free");
    }
  }
}

}  // namespace

ConditionedPsdm::ConditionedPsdm(const CMatrix& psdm, NodeSet cond) : cond_(std::move(cond)) {
  const auto p = psdm.rows();
  check_cond(cond_, static_cast<int>(p));
  diag_ = psdm.diagonal().real();
  const auto c = static_cast<Eigen::Index>(cond_.size());
  if (c == 0) return;
  CMatrix cc(c, c);
  cross_.resize(p, c);
  for (Eigen::Index a = 0; a < c; ++a) {
    for (Eigen::Index b = 0; b < c; ++b) cc(a, b) = psdm(cond_[a], cond_[b]);
    cross_.col(a) = psdm.col(cond_[a]);
  }
  auto solved = hermitian_solve(cc, CMatrix(cross_.adjoint()));
  solved_ = std::move(solved.X);
  ridge_applied_ = solved.ridge_applied;
}

double ConditionedPsdm::raw(NodeId i) const {
  if (i < 0 || i >= diag_.size()) throw ConfigError("node out of range");
  if (std::binary_search(cond_.begin(), cond_.end(), i)) {
    throw ConfigError("target node " + std::to_string(i + 1) + " belongs to the conditioning set");
  }
  if (cond_.empty()) return diag_[i];
  const Complex quad = cross_.row(i).transpose().cwiseProduct(solved_.col(i)).sum();
  if (std::abs(quad.imag()) > 1e-9 * std::max(1.0, diag_[i])) {
    throw NumericalError("conditional PSD has imaginary residue " + std::to_string(quad.imag()));
  }
  return diag_[i] - quad.real();
}

double ConditionedPsdm::operator()(NodeId i) const { return std::max(0.0, raw(i)); }

bool ConditionedPsdm::clamped(NodeId i) const { return raw(i) < 0.0; }

CpsdValue cpsd_f(const CMatrix& psdm, NodeId i, const NodeSet& cond, FrequencyPoint omega) {
  check_psdm(psdm);
  const ConditionedPsdm conditioned(psdm, cond);
  CpsdValue out;
  out.node = i;
  out.cond = cond;
  out.omega = omega.omega();
  out.value = conditioned(i);
  out.clamped = conditioned.clamped(i);
  out.ridge_applied = conditioned.ridge_applied();
  return out;
}

DeficitResult cpsd_deficit(const LdsModel& model, std::span<const FrequencyPoint> grid,
                           const DeficitOptions& options) {
  const Dag& g = model.dag;
  if (g.edges().empty()) throw ConfigError("deficit undefined: model has no edges");
  if (g.size() > kMaxDeficitNodes) {
    throw ConfigError("deficit brute force is limited to p <= " + std::to_string(kMaxDeficitNodes));
  }
  if (grid.empty()) throw ConfigError("deficit needs a nonempty frequency grid");

  DeficitResult best;
  best.delta = std::numeric_limits<double>::infinity();
  for (const auto& omega : grid) {
    const CMatrix phi = exact_psdm(model, omega);
    const double sigma = model.sigma(omega);
    for (NodeId j = 0; j < g.size(); ++j) {
      const NodeSet& pa = g.parents(j);
      if (pa.empty()) continue;
      const NodeSet nd = non_descendants(g, j);
      const auto subsets = std::size_t{1} << nd.size();
      for (std::size_t mask = 0; mask < subsets; ++mask) {
        NodeSet cond;
        for (std::size_t b = 0; b < nd.size(); ++b) {
          if (mask & (std::size_t{1} << b)) cond.push_back(nd[b]);
        }
        const bool covers = std::includes(cond.begin(), cond.end(), pa.begin(), pa.end());
        if (covers) continue;
        if (options.ancestral_only && !is_ancestral(g, cond)) continue;
        const double gap = ConditionedPsdm(phi, cond)(j) - sigma;
        if (gap < best.delta) best = {gap, j, cond, omega.omega()};
      }
    }
  }
  return best;
}

double deficit_lower_bound(const LdsModel& model, std::span<const FrequencyPoint> grid) {
  if (grid.empty()) throw ConfigError("deficit bound needs a nonempty frequency grid");
  double sigma_min = std::numeric_limits<double>::infinity();
  for (const auto& omega : grid) sigma_min = std::min(sigma_min, model.sigma(omega));
  return model.constants.beta * model.constants.beta * sigma_min;
}

}  // namespace ddag
