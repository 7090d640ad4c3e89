#pragma once

#include <vector>

#include "ddag/graph.hpp"
#include "ddag/lds.hpp"

namespace fixtures {

// Seven-node example (1-based): 1→2, 1→5, 2→3, 3→4, 4→7, 5→6, 6→7.
// Node 1 is an ancestor and node 7 a descendant of every other node;
// an(3) = {1,2}, desc(3) = {4,7}, nd(3) = {1,2,5,6}; {1,2,5} is ancestral and
// {2,5} is not.
inline ddag::Dag seven_node_example() {
  return ddag::Dag(7, {{0, 1}, {0, 4}, {1, 2}, {2, 3}, {3, 6}, {4, 5}, {5, 6}});
}

inline ddag::Dag chain(int p) {
  std::vector<ddag::Edge> edges;
  for (int i = 0; i + 1 < p; ++i) edges.push_back({i, i + 1});
  return ddag::Dag(p, edges);
}

/// 1 → 2 with weight b.
inline ddag::LdsModel two_node_chain(double b, const ddag::NoiseSpec& noise) {
  ddag::RMatrix B = ddag::RMatrix::Zero(2, 2);
  B(1, 0) = b;
  return ddag::make_model(chain(2), B, noise);
}

/// ddag::NodeSet from 1-based ids.
inline ddag::NodeSet ids(std::initializer_list<int> one_based) {
  ddag::NodeSet s;
  for (int v : one_based) s.push_back(v - 1);
  return s;
}

}  // namespace fixtures
