#include <doctest.h>

#include <atomic>
#include <sstream>
#include <stdexcept>
#include <string>

#include "ddag/bounds.hpp"
#include "ddag/errors.hpp"
#include "ddag/harness.hpp"

using namespace ddag;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.p = 5;
  c.q = 2;
  c.noises = {NoiseSpec::iid(0.5), NoiseSpec::ar1(0.5, 0.5)};
  c.N = 32;
  c.omega_index = 9;
  c.n_grid = {5, 400};
  c.trials = 6;
  c.seed = 3;
  c.threads = 2;
  return c;
}

std::string csv(const std::vector<ExperimentRecord>& records) {
  std::ostringstream os;
  write_experiment_csv(os, records);
  return os.str();
}

}  // namespace

TEST_CASE("parallel_for: visits every job once and propagates exceptions") {
  std::vector<std::atomic<int>> hits(100);
  parallel_for(100, 3, [&](int j) { hits[static_cast<std::size_t>(j)]++; });
  for (const auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(10, 2, [](int j) {
                    if (j == 7) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
  parallel_for(0, 2, [](int) { FAIL("no jobs expected"); });
}

TEST_CASE("run_experiment: a single node is always recovered") {
  ExperimentConfig c;
  c.p = 1;
  c.q = 0;
  c.n_grid = {1, 10};
  c.trials = 5;
  c.threads = 1;
  const auto records = run_experiment(c);
  CHECK(records.size() == 4);
  for (const auto& r : records) {
    CHECK(r.empirical_recovery == 1.0);
    CHECK(r.success_count == 5);
    CHECK(r.mean_shd == 0.0);
  }
}

TEST_CASE("run_experiment: one record per cell in a fixed order") {
  const auto c = small_config();
  const auto records = run_experiment(c);
  REQUIRE(records.size() == 2 * 2 * 2);
  std::size_t k = 0;
  for (const auto& noise : c.noises) {
    for (auto strategy : c.strategies) {
      for (int n : c.n_grid) {
        const auto& r = records[k++];
        CHECK(r.noise.kind == noise.kind);
        CHECK(r.strategy == strategy);
        CHECK(r.n == n);
        CHECK(r.trials == c.trials);
        CHECK(r.empirical_recovery >= 0.0);
        CHECK(r.empirical_recovery <= 1.0);
        CHECK(r.empirical_recovery == doctest::Approx(double(r.success_count) / r.trials));
        CHECK(r.wall_time_ms == 0.0);
      }
    }
  }
}

TEST_CASE("run_experiment: identical CSV bytes for a repeated seed, regardless of threads") {
  auto c = small_config();
  const std::string a = csv(run_experiment(c));
  const std::string b = csv(run_experiment(c));
  CHECK(a == b);
  c.threads = 1;
  CHECK(csv(run_experiment(c)) == a);
  c.seed = 4;
  CHECK(csv(run_experiment(c)) != a);
  CHECK(a.rfind("p,q,noise,strategy,N,omega_index,n,trials,success_count,empirical_recovery,mean_shd,wall_time_ms\n", 0) == 0);
}

TEST_CASE("run_experiment: recovery improves from tiny to large n") {
  const auto records = run_experiment(small_config());
  for (std::size_t k = 0; k < records.size(); k += 2) {
    CHECK(records[k + 1].success_count >= records[k].success_count);
    CHECK(records[k + 1].mean_shd <= records[k].mean_shd);
  }
}

TEST_CASE("ExperimentConfig: validation") {
  auto c = small_config();
  c.q = 5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small_config();
  c.n_grid = {10, 10};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small_config();
  c.omega_index = 32;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small_config();
  c.gamma_override = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small_config();
  c.noises.clear();
  CHECK_THROWS_AS(run_experiment(c), ConfigError);
}

TEST_CASE("default_gamma: half the deficit at the experiment frequency") {
  RMatrix B = RMatrix::Zero(2, 2);
  B(1, 0) = 0.8;
  const LdsModel m = make_model(Dag(2, {{0, 1}}), B, NoiseSpec::iid(0.5));
  CHECK(default_gamma(m, FrequencyPoint(1.0)) == doctest::Approx(0.5 * 0.64 / 2));
  const LdsModel empty = build_model(Dag(3, {}), NoiseSpec::ar1(0.5, 0.5), 1);
  const FrequencyPoint w(0.4);
  CHECK(default_gamma(empty, w) == doctest::Approx(empty.noise.psd(w) / 2));
}

TEST_CASE("tail_experiment: bound column, ordering of t and dominance") {
  TailConfig c;
  c.n = 2000;
  c.N = 16;
  c.omega_index = 3;
  c.trials = 100;
  c.threads = 2;
  const auto report = tail_experiment(c);
  CHECK(report.errors_rr.size() == 100);
  CHECK(report.errors_continuous.size() == 100);
  REQUIRE(report.rows.size() == 20);
  for (std::size_t k = 0; k < report.rows.size(); ++k) {
    const auto& row = report.rows[k];
    if (k > 0) CHECK(row.t > report.rows[k - 1].t);
    CHECK(row.bound == doctest::Approx(psdm_tail_bound(row.t, c.n, report.m_bound, c.p)));
    CHECK(row.bound <= 1.0);
    CHECK(row.empirical_rr <= row.bound);
    CHECK(row.empirical_continuous <= row.bound);
    CHECK(row.difference_se >= 0.0);
  }
  // The grid reaches the non-vacuous region.
  CHECK(report.rows.back().bound < 1.0);
  CHECK(report.rows.front().bound == 1.0);

  std::ostringstream a, b;
  write_tail_csv(a, report);
  write_tail_csv(b, tail_experiment(c));
  CHECK(a.str() == b.str());
  c.trials = 99;
  CHECK_THROWS_AS(tail_experiment(c), ConfigError);
}
