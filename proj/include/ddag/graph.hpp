#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace ddag {

/// Nodes are identified by position 0..p−1 in the API. Text formats and the
/// CLI use 1-based ids.
using NodeId = int;

/// Sorted, duplicate-free list of node ids.
using NodeSet = std::vector<NodeId>;

struct Edge {
  NodeId from = 0;
  NodeId to = 0;
  auto operator<=>(const Edge&) const = default;
};

/// Directed acyclic graph on p nodes together with a topological order.
/// Immutable after construction.
class Dag {
 public:
  Dag() = default;

  /// Builds the graph and derives the canonical topological order (Kahn's
  /// algorithm, smallest ready id first). Throws ConfigError on self loops,
  /// out-of-range ids or cycles.
  Dag(int p, std::vector<Edge> edges);

  /// Builds the graph with an explicit order, which must be a permutation of
  /// 0..p−1 in which every edge points forward.
  Dag(int p, std::vector<Edge> edges, std::vector<NodeId> order);

  int size() const { return p_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<NodeId>& order() const { return order_; }
  const NodeSet& parents(NodeId v) const { return parents_.at(v); }
  const NodeSet& children(NodeId v) const { return children_.at(v); }
  bool has_edge(NodeId from, NodeId to) const;
  std::size_t max_in_degree() const;

 private:
  void index_edges();

  int p_ = 0;
  std::vector<Edge> edges_;  // sorted
  std::vector<NodeId> order_;
  std::vector<NodeSet> parents_;
  std::vector<NodeSet> children_;
};

struct ParentSetQuery {
  NodeId node = 0;
  NodeSet parents;
  NodeSet ancestors;
  NodeSet descendants;
  NodeSet non_descendants;  // V \ (desc(node) ∪ {node})
};

ParentSetQuery structural_queries(const Dag& g, NodeId node);
NodeSet ancestors(const Dag& g, NodeId node);
NodeSet descendants(const Dag& g, NodeId node);
NodeSet non_descendants(const Dag& g, NodeId node);

/// Every member's parents lie inside the set.
bool is_ancestral(const Dag& g, const NodeSet& set);

/// Independent depth-first cycle check on a raw edge list.
bool is_acyclic(int p, const std::vector<Edge>& edges);

/// Edge sets equal (orders ignored). Throws ConfigError when sizes differ.
bool graph_equal(const Dag& a, const Dag& b);

/// Size of the symmetric difference of the directed edge sets.
int structural_hamming(const Dag& a, const Dag& b);

/// Random DAG: uniform permutation τ, then the j-th node of τ gets
/// min(q, j−1) parents drawn uniformly without replacement from the nodes
/// before it. Requires p ≥ 1 and 0 ≤ q ≤ p−1.
Dag random_dag(int p, int q, std::uint64_t seed);

/// Edge-list text format: header "p=<int>" then one "j i" line per edge
/// j → i with 1-based ids.
void write_edge_list(std::ostream& os, const Dag& g);
Dag read_edge_list(std::istream& is);

}  // namespace ddag
