#include "ddag/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ddag/cpsd.hpp"
#include "ddag/errors.hpp"

namespace ddag {

namespace {

void validate(const CMatrix& psdm, const ReconstructionParams& params) {
  if (psdm.rows() == 0 || psdm.rows() != psdm.cols()) {
    throw ConfigError("PSDM must be a nonempty square matrix");
  }
  if (!is_hermitian(psdm)) throw ConfigError("PSDM is not Hermitian");
  const auto p = static_cast<int>(psdm.rows());
  if (params.q < 0 || params.q > p - 1) {
    throw ConfigError("q must satisfy 0 <= q <= p-1 (q=" + std::to_string(params.q) + ")");
  }
  if (!(params.gamma > 0.0)) throw ConfigError("gamma must be positive");
}

// Calls visit(C) for every k-subset of the sorted pool in lexicographic order.
template <typename Visit>
void for_each_combination(const NodeSet& pool, std::size_t k, Visit&& visit) {
  if (k > pool.size()) return;
  std::vector<std::size_t> idx(k);
  for (std::size_t a = 0; a < k; ++a) idx[a] = a;
  NodeSet subset(k);
  while (true) {
    for (std::size_t a = 0; a < k; ++a) subset[a] = pool[idx[a]];
    visit(subset);
    std::size_t a = k;
    while (a > 0 && idx[a - 1] == pool.size() - k + (a - 1)) --a;
    if (a == 0) return;
    ++idx[a - 1];
    for (std::size_t b = a; b < k; ++b) idx[b] = idx[b - 1] + 1;
  }
}

struct Candidate {
  double value = 0.0;
  NodeId node = -1;
  NodeSet cond;
};

bool better(const Candidate& c, const Candidate& best, double tol) {
  if (best.node < 0) return true;
  const double scale = std::max(std::abs(c.value), std::abs(best.value));
  if (c.value < best.value - tol * scale) return true;
  if (c.value > best.value + tol * scale) return false;
  if (c.node != best.node) return c.node < best.node;
  return c.cond < best.cond;
}

NodeSet sorted_prefix(const std::vector<NodeId>& order, std::size_t len) {
  NodeSet s(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(len));
  std::sort(s.begin(), s.end());
  return s;
}

}  // namespace

Ordering order_nodes(const CMatrix& psdm, const ReconstructionParams& params,
                     std::vector<FAuditEntry>* audit, bool* ridge) {
  validate(psdm, params);
  const auto p = static_cast<int>(psdm.rows());
  Ordering out;
  std::vector<char> placed(static_cast<std::size_t>(p), 0);

  for (int step = 0; step < p; ++step) {
    const NodeSet pool = sorted_prefix(out.order, out.order.size());
    const auto cap = std::min(pool.size(), static_cast<std::size_t>(params.q));
    const std::size_t smallest = params.search == SearchMode::ExactSize ? cap : 0;

    Candidate best;
    for (std::size_t k = smallest; k <= cap; ++k) {
      for_each_combination(pool, k, [&](const NodeSet& cond) {
        const ConditionedPsdm f(psdm, cond);
        if (ridge && f.ridge_applied()) *ridge = true;
        for (NodeId j = 0; j < p; ++j) {
          if (placed[static_cast<std::size_t>(j)]) continue;
          Candidate c{f(j), j, cond};
          if (audit && params.full_audit) audit->push_back({j, cond, c.value});
          if (better(c, best, params.tie_tolerance)) best = std::move(c);
        }
      });
    }
    placed[static_cast<std::size_t>(best.node)] = 1;
    if (audit && !params.full_audit) audit->push_back({best.node, best.cond, best.value});
    out.order.push_back(best.node);
    out.opt_sets.push_back(std::move(best.cond));
    out.opt_values.push_back(best.value);
  }
  return out;
}

Dag identify_parents(const CMatrix& psdm, const Ordering& ordering,
                     const ReconstructionParams& params, std::vector<ParentTest>* tests,
                     std::vector<FAuditEntry>* audit, bool* ridge) {
  validate(psdm, params);
  const auto p = static_cast<int>(psdm.rows());
  if (static_cast<int>(ordering.order.size()) != p ||
      ordering.opt_sets.size() != ordering.order.size()) {
    throw ConfigError("ordering does not match the PSDM dimension");
  }

  auto evaluate = [&](NodeId child, const NodeSet& cond) {
    const ConditionedPsdm f(psdm, cond);
    if (ridge && f.ridge_applied()) *ridge = true;
    const double v = f(child);
    if (audit) audit->push_back({child, cond, v});
    return v;
  };

  std::vector<Edge> edges;
  for (std::size_t pos = 1; pos < ordering.order.size(); ++pos) {
    const NodeId child = ordering.order[pos];
    const NodeSet cond = params.parent_rule == ParentRule::FullPrefix
                             ? sorted_prefix(ordering.order, pos)
                             : ordering.opt_sets[pos];
    if (cond.empty()) continue;
    const double base = evaluate(child, cond);

    std::vector<ParentTest> local;
    for (NodeId candidate : cond) {
      NodeSet reduced;
      std::copy_if(cond.begin(), cond.end(), std::back_inserter(reduced),
                   [&](NodeId v) { return v != candidate; });
      const double drop = std::abs(base - evaluate(child, reduced));
      local.push_back({child, candidate, drop, drop >= params.gamma});
    }
    if (params.parent_rule == ParentRule::FullPrefix) {
      std::vector<std::size_t> accepted;
      for (std::size_t k = 0; k < local.size(); ++k) {
        if (local[k].accepted) accepted.push_back(k);
      }
      if (accepted.size() > static_cast<std::size_t>(params.q)) {
        std::stable_sort(accepted.begin(), accepted.end(), [&](std::size_t a, std::size_t b) {
          return local[a].drop > local[b].drop;
        });
        for (std::size_t k = static_cast<std::size_t>(params.q); k < accepted.size(); ++k) {
          local[accepted[k]].accepted = false;
        }
      }
    }
    for (const auto& t : local) {
      if (t.accepted) edges.push_back({t.candidate, child});
      if (tests) tests->push_back(t);
    }
  }
  return Dag(p, std::move(edges), ordering.order);
}

ReconstructionResult reconstruct(const CMatrix& psdm, const ReconstructionParams& params) {
  ReconstructionResult out;
  const Ordering ordering = order_nodes(psdm, params, &out.f_values, &out.ridge_applied);
  out.graph = identify_parents(psdm, ordering, params, &out.parent_tests, &out.f_values,
                               &out.ridge_applied);
  out.order = ordering.order;
  out.opt_sets = ordering.opt_sets;
  return out;
}

}  // namespace ddag
