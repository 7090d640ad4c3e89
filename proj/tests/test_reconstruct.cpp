#include <doctest.h>

#include <random>

#include "ddag/cpsd.hpp"
#include "ddag/errors.hpp"
#include "ddag/lds.hpp"
#include "ddag/reconstruct.hpp"
#include "ddag/rng.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace ddag;

namespace {

ReconstructionParams params_for(const LdsModel& m, FrequencyPoint w, int q) {
  const std::vector<FrequencyPoint> grid{w};
  ReconstructionParams params;
  params.q = q;
  params.gamma = cpsd_deficit(m, grid).delta / 2;
  params.omega = w;
  return params;
}

bool is_topological(const Dag& g, const std::vector<NodeId>& order) {
  std::vector<int> pos(static_cast<std::size_t>(g.size()));
  for (std::size_t k = 0; k < order.size(); ++k) pos[static_cast<std::size_t>(order[k])] = static_cast<int>(k);
  for (const auto& e : g.edges())
    if (pos[static_cast<std::size_t>(e.from)] >= pos[static_cast<std::size_t>(e.to)]) return false;
  return true;
}

}  // namespace

TEST_CASE("reconstruct: single node") {
  CMatrix phi(1, 1);
  phi(0, 0) = 0.5;
  ReconstructionParams params;
  params.gamma = 0.1;
  const auto r = reconstruct(phi, params);
  CHECK(r.order == std::vector<NodeId>{0});
  CHECK(r.graph.edges().empty());
}

TEST_CASE("reconstruct: identity PSDM orders by node id and finds no edges") {
  ReconstructionParams params;
  params.q = 2;
  params.gamma = 0.01;
  const auto r = reconstruct(CMatrix::Identity(5, 5), params);
  CHECK(r.order == std::vector<NodeId>{0, 1, 2, 3, 4});
  CHECK(r.graph.edges().empty());
  for (const auto& t : r.parent_tests) CHECK_FALSE(t.accepted);
}

TEST_CASE("reconstruct: three-node chain from the population PSDM") {
  RMatrix B = RMatrix::Zero(3, 3);
  B(1, 0) = 0.6;
  B(2, 1) = -0.7;
  const LdsModel m = make_model(fixtures::chain(3), B, NoiseSpec::iid(0.5));
  const FrequencyPoint w(1.3);
  const auto r = reconstruct(exact_psdm(m, w), params_for(m, w, 1));
  CHECK(r.order == std::vector<NodeId>{0, 1, 2});
  CHECK(graph_equal(r.graph, m.dag));
}

TEST_CASE("reconstruct: seven-node example from the population PSDM") {
  const Dag g = fixtures::seven_node_example();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const LdsModel m = build_model(g, NoiseSpec::ar1(0.5, 0.5), seed);
    const auto w = FrequencyPoint::from_bin(17, 64);
    const auto r = reconstruct(exact_psdm(m, w), params_for(m, w, 2));
    CHECK(graph_equal(r.graph, g));
    CHECK(is_topological(g, r.order));
  }
}

TEST_CASE("reconstruct: random models, all search modes and parent rules agree") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto noise = seed % 2 ? NoiseSpec::ar1(0.5, 0.5) : NoiseSpec::iid(0.5);
    const LdsModel m = build_model(random_dag(10, 2, seed), noise, seed + 1000);
    const auto w = FrequencyPoint::from_bin(17, 64);
    const CMatrix phi = exact_psdm(m, w);
    auto params = params_for(m, w, 2);
    const auto exact = reconstruct(phi, params);
    CHECK(is_topological(m.dag, exact.order));
    CHECK(graph_equal(exact.graph, m.dag));
    CHECK(structural_hamming(exact.graph, m.dag) == 0);

    params.search = SearchMode::AtMost;
    const auto at_most = reconstruct(phi, params);
    CHECK(graph_equal(at_most.graph, m.dag));

    params.search = SearchMode::ExactSize;
    params.parent_rule = ParentRule::OptimalSet;
    CHECK(graph_equal(reconstruct(phi, params).graph, m.dag));
  }
}

TEST_CASE("reconstruct: small Hermitian perturbations do not change the answer") {
  Rng rng = make_rng(5);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const LdsModel m = build_model(random_dag(8, 2, seed), NoiseSpec::iid(0.5), seed + 40);
    const auto w = FrequencyPoint::from_bin(17, 64);
    const auto params = params_for(m, w, 2);
    const CMatrix A = oracle::random_complex(8, 8, rng);
    CMatrix E = A + A.adjoint();
    E *= 1e-3 * params.gamma / spectral_norm(E);
    const auto r = reconstruct(CMatrix(exact_psdm(m, w) + E), params);
    CHECK(graph_equal(r.graph, m.dag));
  }
}

TEST_CASE("reconstruct: a threshold above every drop yields the empty graph") {
  const LdsModel m = build_model(random_dag(6, 2, 3), NoiseSpec::iid(0.5), 4);
  const auto w = FrequencyPoint(0.7);
  const CMatrix phi = exact_psdm(m, w);
  auto params = params_for(m, w, 2);
  const auto r = reconstruct(phi, params);
  double max_drop = 0.0;
  for (const auto& t : r.parent_tests) max_drop = std::max(max_drop, t.drop);
  params.gamma = 2 * max_drop;
  const auto none = reconstruct(phi, params);
  CHECK(none.graph.edges().empty());
  CHECK(none.order == r.order);
}

TEST_CASE("reconstruct: never assigns more than q parents") {
  const LdsModel m = build_model(random_dag(7, 3, 8), NoiseSpec::iid(0.5), 9);
  const auto w = FrequencyPoint::from_bin(17, 64);
  // A handful of trajectories gives a noisy estimate; a tiny threshold
  // accepts almost every candidate.
  const auto ts = simulate(m, SamplingStrategy::RestartRecord, 12, 64, 10);
  const auto est = estimate_psdm(ts, w);
  for (int q = 0; q <= 3; ++q) {
    for (auto rule : {ParentRule::FullPrefix, ParentRule::OptimalSet}) {
      ReconstructionParams params;
      params.q = q;
      params.gamma = 1e-9;
      params.omega = w;
      params.parent_rule = rule;
      const auto r = reconstruct(est.matrix, params);
      CHECK(r.graph.max_in_degree() <= q);
      CHECK(is_topological(r.graph, r.order));
    }
  }
}

TEST_CASE("reconstruct: parent tests match the returned edges") {
  const LdsModel m = build_model(random_dag(6, 2, 13), NoiseSpec::iid(0.5), 14);
  const auto w = FrequencyPoint(2.0);
  const auto r = reconstruct(exact_psdm(m, w), params_for(m, w, 2));
  std::vector<Edge> accepted;
  for (const auto& t : r.parent_tests)
    if (t.accepted) accepted.push_back({t.candidate, t.child});
  std::sort(accepted.begin(), accepted.end());
  CHECK(accepted == r.graph.edges());
}

TEST_CASE("order_nodes: audit sizes for each search mode") {
  ReconstructionParams params;
  params.q = 2;
  params.gamma = 1.0;
  params.full_audit = true;
  std::vector<FAuditEntry> audit;
  const auto phi = CMatrix::Identity(4, 4);
  order_nodes(phi, params, &audit);
  // Steps see prefix sizes 0,1,2,3 with |C| = 0,1,2,2: 1*4 + 1*3 + 1*2 + 3*1.
  CHECK(audit.size() == 12);
  audit.clear();
  params.search = SearchMode::AtMost;
  order_nodes(phi, params, &audit);
  // All |C| <= 2: 1*4 + 2*3 + 4*2 + 7*1.
  CHECK(audit.size() == 25);
  audit.clear();
  params.full_audit = false;
  const auto ord = order_nodes(phi, params, &audit);
  CHECK(audit.size() == 4);
  CHECK(ord.opt_values == std::vector<double>{1.0, 1.0, 1.0, 1.0});
}

TEST_CASE("reconstruct: estimated PSDM recovers a strong chain") {
  RMatrix B = RMatrix::Zero(4, 4);
  B(1, 0) = 0.9;
  B(2, 1) = -0.9;
  B(3, 2) = 0.9;
  B /= 1.002 * spectral_norm(B);
  const LdsModel m = make_model(fixtures::chain(4), B, NoiseSpec::iid(0.5));
  const auto w = FrequencyPoint::from_bin(17, 64);
  const auto ts = simulate(m, SamplingStrategy::RestartRecord, 3000, 64, 15,
                           SimulationOptions{StartMode::Stationary, {}});
  const auto r = reconstruct(estimate_psdm(ts, w).matrix, params_for(m, w, 1));
  CHECK(graph_equal(r.graph, m.dag));
}

TEST_CASE("reconstruct: argument validation") {
  ReconstructionParams params;
  params.gamma = 0.1;
  params.q = 3;
  CHECK_THROWS_AS(reconstruct(CMatrix::Identity(3, 3), params), ConfigError);
  params.q = -1;
  CHECK_THROWS_AS(reconstruct(CMatrix::Identity(3, 3), params), ConfigError);
  params.q = 1;
  params.gamma = 0.0;
  CHECK_THROWS_AS(reconstruct(CMatrix::Identity(3, 3), params), ConfigError);
  params.gamma = 0.1;
  CMatrix bad = CMatrix::Identity(3, 3);
  bad(0, 2) = 0.3;
  CHECK_THROWS_AS(reconstruct(bad, params), ConfigError);
  CHECK_THROWS_AS(reconstruct(CMatrix(0, 0), params), ConfigError);
}
