#pragma once

#include <vector>

#include "ddag/graph.hpp"
#include "ddag/numeric.hpp"

namespace ddag {

/// Candidate conditioning sets scanned at each ordering step.
///   ExactSize  |C| = min(|S|, q); sufficient because f is nonincreasing in C
///   AtMost     every |C| ≤ q
enum class SearchMode { ExactSize, AtMost };

/// Conditioning set used when testing parent candidates of S_i.
///   FullPrefix  C_i = {S_1, ..., S_{i−1}}
///   OptimalSet  C_i = the minimiser recorded while ordering
enum class ParentRule { FullPrefix, OptimalSet };

struct ReconstructionParams {
  int q = 0;
  double gamma = 0.0;
  FrequencyPoint omega{0.0};
  SearchMode search = SearchMode::ExactSize;
  ParentRule parent_rule = ParentRule::FullPrefix;
  /// Record every evaluated f̂ rather than only the selected ones.
  bool full_audit = false;
  /// Relative tolerance under which two f̂ values count as tied.
  double tie_tolerance = 1e-12;
};

struct FAuditEntry {
  NodeId node = 0;
  NodeSet cond;
  double value = 0.0;
};

struct ParentTest {
  NodeId child = 0;
  NodeId candidate = 0;
  double drop = 0.0;
  bool accepted = false;
};

struct Ordering {
  std::vector<NodeId> order;
  std::vector<NodeSet> opt_sets;  // opt_sets[k] belongs to order[k]
  std::vector<double> opt_values;
};

struct ReconstructionResult {
  std::vector<NodeId> order;
  std::vector<NodeSet> opt_sets;
  Dag graph;
  std::vector<FAuditEntry> f_values;
  std::vector<ParentTest> parent_tests;
  bool ridge_applied = false;
};

/// Greedy ordering: p times, pick the unplaced node j and C ⊆ S minimising
/// f̂(j, C, ω). Ties go to the smaller node id, then the lexicographically
/// smaller C.
Ordering order_nodes(const CMatrix& psdm, const ReconstructionParams& params,
                     std::vector<FAuditEntry>* audit = nullptr, bool* ridge = nullptr);

/// Keeps j as a parent of S_i when |f̂(S_i, C_i) − f̂(S_i, C_i ∖ j)| ≥ γ.
/// Under FullPrefix at most q candidates with the largest drops are kept.
Dag identify_parents(const CMatrix& psdm, const Ordering& ordering,
                     const ReconstructionParams& params,
                     std::vector<ParentTest>* tests = nullptr,
                     std::vector<FAuditEntry>* audit = nullptr, bool* ridge = nullptr);

ReconstructionResult reconstruct(const CMatrix& psdm, const ReconstructionParams& params);

}  // namespace ddag
