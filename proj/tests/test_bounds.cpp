#include <doctest.h>

#include <cmath>

#include "ddag/bounds.hpp"
#include "ddag/errors.hpp"
#include "ddag/lds.hpp"

using namespace ddag;

TEST_CASE("minimax_lower_bound: worked value and edge cases") {
  // max(ln 10 / (2·0.25 + 0.0625), 2 ln 5 / (4 − 1)) · (1 − 0.2)
  const double edge = std::log(10.0) / 0.5625;
  const double degree = 2.0 * std::log(5.0) / 3.0;
  const double ref = 0.8 * (edge > degree ? edge : degree);
  CHECK(std::abs(minimax_lower_bound(10, 2, 0.5, 2.0, 0.1) - ref) <= 1e-9);
  CHECK(ref == doctest::Approx(3.2748).epsilon(1e-4));
  CHECK(minimax_lower_bound(10, 2, 0.5, 2.0, 0.5) == 0.0);
  CHECK(minimax_lower_bound(100, 2, 0.5, 2.0, 0.1) > minimax_lower_bound(10, 2, 0.5, 2.0, 0.1));
  // With a tiny β the edge term dominates; with M close to 1 the degree term does.
  CHECK(minimax_lower_bound(10, 2, 5.0, 1.01, 0.1) ==
        doctest::Approx(0.8 * 2.0 * std::log(5.0) / (1.01 * 1.01 - 1.0)));
  CHECK(minimax_lower_bound(10, 0, 0.5, 2.0, 0.1) == doctest::Approx(0.8 * edge));
}

TEST_CASE("minimax_lower_bound: rejects inputs outside its hypotheses") {
  CHECK_THROWS_AS(minimax_lower_bound(10, 6, 0.5, 2.0, 0.1), ConfigError);
  CHECK_THROWS_AS(minimax_lower_bound(10, 2, 0.5, 1.0, 0.1), ConfigError);
  CHECK_THROWS_AS(minimax_lower_bound(10, 2, 0.0, 2.0, 0.1), ConfigError);
  CHECK_THROWS_AS(minimax_lower_bound(10, 2, 0.5, 2.0, 0.0), ConfigError);
  CHECK_THROWS_AS(minimax_lower_bound(10, 2, 0.5, 2.0, 0.6), ConfigError);
}

TEST_CASE("recovery_upper_bound: homogeneity in M and epsilon2") {
  const double base = recovery_upper_bound(10, 2, 1.5, 0.01, 0.1);
  CHECK(recovery_upper_bound(10, 2, 3.0, 0.01, 0.1) / base == doctest::Approx(64.0).epsilon(1e-14));
  CHECK(recovery_upper_bound(10, 2, 1.5, 0.005, 0.1) / base == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("recovery_upper_bound: matches a second evaluation") {
  const double M = 1.5;
  const double eps = 0.03 / 8;
  const double ref = 10368.0 * M * M * M * M * M * M *
                     (18.0 + 2.0 * std::log(5.0) + std::log(30.0)) / (eps * eps);
  const double got = recovery_upper_bound(10, 2, M, eps, 0.1);
  CHECK(std::isfinite(got));
  CHECK(got > 0.0);
  CHECK(got == doctest::Approx(ref).epsilon(1e-12));
  CHECK_THROWS_AS(recovery_upper_bound(10, 2, M, 0.0, 0.1), ConfigError);
  CHECK_THROWS_AS(recovery_upper_bound(10, 2, M, eps, 1.0), ConfigError);
}

TEST_CASE("min_trajectory_length: worked value and scaling") {
  CHECK(min_trajectory_length(1.0, 2.0, 0.1) == 41);
  // 2·3·0.25 / (0.5625·0.01) = 266.67 → 267 + 1
  CHECK(min_trajectory_length(3.0, 4.0, 0.01) == 268);
  // Doubling ε₁ halves the pre-ceiling value: 40 → 20.
  CHECK(min_trajectory_length(1.0, 2.0, 0.2) == 21);
  CHECK_THROWS_AS(min_trajectory_length(1.0, 1.0, 0.1), ConfigError);
  CHECK_THROWS_AS(min_trajectory_length(1.0, 2.0, 0.0), ConfigError);
}

TEST_CASE("min_trajectory_length: the returned N meets the finite-N accuracy") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    for (const auto& noise : {NoiseSpec::iid(0.5), NoiseSpec::ar1(0.5, 0.5)}) {
      const LdsModel m = build_model(random_dag(10, 2, seed), noise, seed + 20);
      const double eps1 = 0.1;
      const long N = min_trajectory_length(m.constants.c_decay, m.constants.rho, eps1);
      const auto w = FrequencyPoint::from_bin(17, 64);
      const CMatrix gap = expected_psdm_finite_n(m, w, static_cast<int>(N)) - exact_psdm(m, w);
      CHECK(spectral_norm(gap) < eps1);
    }
  }
}

TEST_CASE("psdm_tail_bound: clipped at one in the vacuous region") {
  CHECK(psdm_tail_bound(0.0, 10000, 2.0, 3) == 1.0);
  CHECK(psdm_tail_bound(0.5, 10000, 2.0, 3) == 1.0);
  const double t = 2.0;
  CHECK(psdm_tail_bound(t, 10000, 2.0, 3) ==
        doctest::Approx(std::exp(-t * t * 10000 / 512.0 + 18.0)));
  CHECK(psdm_tail_bound(3.0, 10000, 2.0, 3) < psdm_tail_bound(2.0, 10000, 2.0, 3));
}
