#include "ddag/graph.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <queue>
#include <sstream>
#include <string>

#include "ddag/errors.hpp"
#include "ddag/rng.hpp"

namespace ddag {

namespace {

void check_edges(int p, const std::vector<Edge>& edges) {
  if (p < 1) throw ConfigError("graph must have at least one node");
  for (const auto& e : edges) {
    if (e.from < 0 || e.from >= p || e.to < 0 || e.to >= p) {
      throw ConfigError("edge endpoint out of range");
    }
    if (e.from == e.to) throw ConfigError("self loop on node " + std::to_string(e.from + 1));
  }
}

std::vector<Edge> normalized(std::vector<Edge> edges) {
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

NodeSet reach(const std::vector<NodeSet>& adj, NodeId start) {
  std::vector<char> seen(adj.size(), 0);
  std::vector<NodeId> stack{start};
  NodeSet out;
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    for (NodeId w : adj[static_cast<std::size_t>(v)]) {
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = 1;
        out.push_back(w);
        stack.push_back(w);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

Dag::Dag(int p, std::vector<Edge> edges) : p_(p), edges_(normalized(std::move(edges))) {
  check_edges(p_, edges_);
  index_edges();
  // Kahn's algorithm with the smallest ready id first.
  std::vector<std::size_t> indeg(static_cast<std::size_t>(p_));
  for (NodeId v = 0; v < p_; ++v) indeg[static_cast<std::size_t>(v)] = parents_[static_cast<std::size_t>(v)].size();
  std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
  for (NodeId v = 0; v < p_; ++v) {
    if (indeg[static_cast<std::size_t>(v)] == 0) ready.push(v);
  }
  while (!ready.empty()) {
    const NodeId v = ready.top();
    ready.pop();
    order_.push_back(v);
    for (NodeId w : children_[static_cast<std::size_t>(v)]) {
      if (--indeg[static_cast<std::size_t>(w)] == 0) ready.push(w);
    }
  }
  if (static_cast<int>(order_.size()) != p_) throw ConfigError("graph contains a cycle");
}

Dag::Dag(int p, std::vector<Edge> edges, std::vector<NodeId> order)
    : p_(p), edges_(normalized(std::move(edges))), order_(std::move(order)) {
  check_edges(p_, edges_);
  if (static_cast<int>(order_.size()) != p_) throw ConfigError("order is not a permutation");
  std::vector<int> pos(static_cast<std::size_t>(p_), -1);
  for (int k = 0; k < p_; ++k) {
    const NodeId v = order_[static_cast<std::size_t>(k)];
    if (v < 0 || v >= p_ || pos[static_cast<std::size_t>(v)] != -1) {
      throw ConfigError("order is not a permutation");
    }
    pos[static_cast<std::size_t>(v)] = k;
  }
  for (const auto& e : edges_) {
    if (pos[static_cast<std::size_t>(e.from)] >= pos[static_cast<std::size_t>(e.to)]) {
      throw ConfigError("order is not topological for edge " + std::to_string(e.from + 1) +
                        " -> " + std::to_string(e.to + 1));
    }
  }
  index_edges();
}

void Dag::index_edges() {
  parents_.assign(static_cast<std::size_t>(p_), {});
  children_.assign(static_cast<std::size_t>(p_), {});
  for (const auto& e : edges_) {
    parents_[static_cast<std::size_t>(e.to)].push_back(e.from);
    children_[static_cast<std::size_t>(e.from)].push_back(e.to);
  }
  for (auto& s : parents_) std::sort(s.begin(), s.end());
  for (auto& s : children_) std::sort(s.begin(), s.end());
}

bool Dag::has_edge(NodeId from, NodeId to) const {
  return std::binary_search(edges_.begin(), edges_.end(), Edge{from, to});
}

std::size_t Dag::max_in_degree() const {
  std::size_t m = 0;
  for (const auto& s : parents_) m = std::max(m, s.size());
  return m;
}

namespace {
void check_node(const Dag& g, NodeId node) {
  if (node < 0 || node >= g.size()) {
    throw ConfigError("node " + std::to_string(node + 1) + " out of range");
  }
}

std::vector<NodeSet> adjacency(const Dag& g, bool forward) {
  std::vector<NodeSet> adj(static_cast<std::size_t>(g.size()));
  for (NodeId v = 0; v < g.size(); ++v) {
    adj[static_cast<std::size_t>(v)] = forward ? g.children(v) : g.parents(v);
  }
  return adj;
}
}  // namespace

NodeSet ancestors(const Dag& g, NodeId node) {
  check_node(g, node);
  return reach(adjacency(g, false), node);
}

NodeSet descendants(const Dag& g, NodeId node) {
  check_node(g, node);
  return reach(adjacency(g, true), node);
}

NodeSet non_descendants(const Dag& g, NodeId node) {
  const NodeSet desc = descendants(g, node);
  NodeSet out;
  for (NodeId v = 0; v < g.size(); ++v) {
    if (v != node && !std::binary_search(desc.begin(), desc.end(), v)) out.push_back(v);
  }
  return out;
}

ParentSetQuery structural_queries(const Dag& g, NodeId node) {
  check_node(g, node);
  ParentSetQuery q;
  q.node = node;
  q.parents = g.parents(node);
  q.ancestors = ancestors(g, node);
  q.descendants = descendants(g, node);
  q.non_descendants = non_descendants(g, node);
  return q;
}

bool is_ancestral(const Dag& g, const NodeSet& set) {
  for (NodeId v : set) {
    check_node(g, v);
    for (NodeId u : g.parents(v)) {
      if (std::find(set.begin(), set.end(), u) == set.end()) return false;
    }
  }
  return true;
}

bool is_acyclic(int p, const std::vector<Edge>& edges) {
  std::vector<NodeSet> adj(static_cast<std::size_t>(p));
  for (const auto& e : edges) {
    if (e.from == e.to) return false;
    adj[static_cast<std::size_t>(e.from)].push_back(e.to);
  }
  // 0 = unvisited, 1 = on the current path, 2 = finished.
  std::vector<int> state(static_cast<std::size_t>(p), 0);
  std::vector<std::pair<NodeId, std::size_t>> stack;
  for (NodeId root = 0; root < p; ++root) {
    if (state[static_cast<std::size_t>(root)] != 0) continue;
    stack.emplace_back(root, 0);
    state[static_cast<std::size_t>(root)] = 1;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      const auto& out = adj[static_cast<std::size_t>(v)];
      if (next == out.size()) {
        state[static_cast<std::size_t>(v)] = 2;
        stack.pop_back();
        continue;
      }
      const NodeId w = out[next++];
      if (state[static_cast<std::size_t>(w)] == 1) return false;
      if (state[static_cast<std::size_t>(w)] == 0) {
        state[static_cast<std::size_t>(w)] = 1;
        stack.emplace_back(w, 0);
      }
    }
  }
  return true;
}

bool graph_equal(const Dag& a, const Dag& b) {
  if (a.size() != b.size()) throw ConfigError("graphs have different node counts");
  return a.edges() == b.edges();
}

int structural_hamming(const Dag& a, const Dag& b) {
  if (a.size() != b.size()) throw ConfigError("graphs have different node counts");
  std::vector<Edge> diff;
  std::set_symmetric_difference(a.edges().begin(), a.edges().end(), b.edges().begin(),
                                b.edges().end(), std::back_inserter(diff));
  return static_cast<int>(diff.size());
}

Dag random_dag(int p, int q, std::uint64_t seed) {
  if (p < 1) throw ConfigError("random_dag: p must be >= 1");
  if (q < 0 || q > p - 1) throw ConfigError("random_dag: q must satisfy 0 <= q <= p-1");
  Rng rng = make_rng(seed);
  std::vector<NodeId> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<Edge> edges;
  for (int j = 1; j < p; ++j) {
    const auto k = static_cast<std::size_t>(std::min(q, j));
    std::vector<NodeId> chosen;
    std::sample(order.begin(), order.begin() + j, std::back_inserter(chosen), k, rng);
    for (NodeId parent : chosen) edges.push_back({parent, order[static_cast<std::size_t>(j)]});
  }
  return Dag(p, std::move(edges), std::move(order));
}

void write_edge_list(std::ostream& os, const Dag& g) {
  os << "p=" << g.size() << '\n';
  for (const auto& e : g.edges()) os << e.from + 1 << ' ' << e.to + 1 << '\n';
}

Dag read_edge_list(std::istream& is) {
  std::string line;
  int p = -1;
  std::vector<Edge> edges;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (p < 0) {
      if (line.rfind("p=", 0) != 0) throw IoError("edge list: missing 'p=<int>' header");
      try {
        p = std::stoi(line.substr(2));
      } catch (const std::exception&) {
        throw IoError("edge list: malformed header '" + line + "'");
      }
      continue;
    }
    std::istringstream ls(line);
    int from = 0;
    int to = 0;
    if (!(ls >> from >> to)) throw IoError("edge list: malformed line '" + line + "'");
    edges.push_back({from - 1, to - 1});
  }
  if (p < 0) throw IoError("edge list: missing 'p=<int>' header");
  return Dag(p, std::move(edges));
}

}  // namespace ddag
