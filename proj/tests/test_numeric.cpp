#include <doctest.h>

#include <random>
#include <vector>

#include "ddag/errors.hpp"
#include "ddag/numeric.hpp"
#include "oracles.hpp"

using namespace ddag;

TEST_CASE("dft_at: constant signal at omega = 0 gives sqrt(N) * c") {
  const int N = 50;
  const int p = 2;
  std::vector<double> x;
  for (int k = 0; k < N; ++k) {
    x.push_back(1.5);
    x.push_back(-2.0);
  }
  const CVector y = dft_at(x, p, FrequencyPoint(0.0));
  CHECK(std::abs(y[0] - Complex(std::sqrt(50.0) * 1.5)) < 1e-12);
  CHECK(std::abs(y[1] - Complex(std::sqrt(50.0) * -2.0)) < 1e-12);
}

TEST_CASE("dft_at: single sample is returned exactly") {
  const std::vector<double> x{0.25, -3.0, 7.5};
  for (double w : {0.0, 1.0, 4.0, 6.2}) {
    const CVector y = dft_at(x, 3, FrequencyPoint(w));
    for (int i = 0; i < 3; ++i) CHECK(y[i] == Complex(x[static_cast<std::size_t>(i)], 0.0));
  }
}

TEST_CASE("dft_at: matches direct summation oracle") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  const int p = 3;
  std::vector<double> x(64 * p);
  for (auto& v : x) v = g(rng);
  const auto omega = FrequencyPoint::from_bin(17, 64);
  const CVector y = dft_at(x, p, omega);
  const CVector ref = oracle::naive_dft(x, p, omega.omega());
  CHECK((y - ref).norm() <= 1e-12 * ref.norm());
}

TEST_CASE("dft_at: linear in the signal") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g;
  const int p = 2;
  std::vector<double> x(40 * p), y(40 * p), z(40 * p);
  for (auto& v : x) v = g(rng);
  for (auto& v : y) v = g(rng);
  const double a = 1.7;
  const double b = -0.4;
  for (std::size_t k = 0; k < z.size(); ++k) z[k] = a * x[k] + b * y[k];
  const FrequencyPoint w(2.3);
  const CVector lhs = dft_at(z, p, w);
  const CVector rhs = a * dft_at(x, p, w) + b * dft_at(y, p, w);
  CHECK((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
}

TEST_CASE("dft_at: empty trajectory is an error") {
  std::vector<double> empty;
  CHECK_THROWS_WITH_AS(dft_at(empty, 2, FrequencyPoint(0.0)), "empty trajectory", ConfigError);
}

TEST_CASE("FrequencyPoint rejects values outside [0, 2pi)") {
  CHECK_THROWS_AS(FrequencyPoint{-0.1}, ConfigError);
  CHECK_THROWS_AS(FrequencyPoint{kTwoPi}, ConfigError);
  CHECK(FrequencyPoint::from_bin(17, 64).omega() == doctest::Approx(kTwoPi * 17 / 64));
}

TEST_CASE("hermitian_solve: identity and scalar matrices") {
  CVector b(3);
  b << Complex(1, 2), Complex(-3, 0.5), Complex(0, -1);
  const auto r1 = hermitian_solve(CMatrix::Identity(3, 3), b);
  CHECK((r1.x - b).norm() < 1e-15);
  CHECK_FALSE(r1.ridge_applied);

  const auto r2 = hermitian_solve(CMatrix(2.0 * CMatrix::Identity(3, 3)), CVector(CVector::Ones(3)));
  for (int i = 0; i < 3; ++i) CHECK(std::abs(r2.x[i] - Complex(0.5)) < 1e-15);
}

TEST_CASE("hermitian_solve: residual on random PD matrices") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    const CMatrix A = oracle::random_hermitian_pd(5, rng);
    const CVector b = oracle::random_complex(5, 1, rng);
    const auto r = hermitian_solve(A, b);
    CHECK((A * r.x - b).norm() <= 1e-9 * b.norm());
    // solve ∘ multiply is the identity
    const CVector y = oracle::random_complex(5, 1, rng);
    const auto back = hermitian_solve(A, CVector(A * y));
    CHECK((back.x - y).norm() <= 1e-8 * y.norm());
  }
}

TEST_CASE("hermitian_solve: singular matrix gets a ridge and a flag") {
  CVector v(3);
  v << 1.0, Complex(0, 1), 2.0;
  const CMatrix A = v * v.adjoint();  // rank one
  const auto r = hermitian_solve(A, v);
  CHECK(r.ridge_applied);
  CHECK(r.x.allFinite());
}

TEST_CASE("hermitian_solve: rejects non-Hermitian input") {
  CMatrix A = CMatrix::Identity(2, 2);
  A(0, 1) = Complex(0.3, 0.0);
  CHECK_THROWS_AS(hermitian_solve(A, CVector(CVector::Ones(2))), ConfigError);
}

TEST_CASE("hermitian_solve: negative definite input is beyond rescue") {
  CMatrix A = CMatrix::Identity(2, 2);
  A(1, 1) = -5.0;
  CHECK_THROWS_AS(hermitian_solve(A, CVector(CVector::Ones(2))), NumericalError);
}

TEST_CASE("spectral_norm: identity and diagonal") {
  CHECK(spectral_norm(CMatrix(CMatrix::Identity(4, 4))) == doctest::Approx(1.0).epsilon(1e-12));
  CMatrix D = CMatrix::Zero(2, 2);
  D(0, 0) = 3.0;
  D(1, 1) = -2.0;
  CHECK(spectral_norm(D) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("spectral_norm: power iteration oracle and unitary invariance") {
  std::mt19937_64 rng(9);
  for (int rep = 0; rep < 20; ++rep) {
    const CMatrix A = oracle::random_complex(6, 6, rng);
    const double s = spectral_norm(A);
    CHECK(s == doctest::Approx(oracle::power_iteration_norm(A)).epsilon(1e-6));
    const CMatrix U = oracle::random_unitary(6, rng);
    const CMatrix V = oracle::random_unitary(6, rng);
    CHECK(std::abs(spectral_norm(CMatrix(U * A * V)) - s) <= 1e-8 * s);
  }
}

TEST_CASE("lyapunov_solve: closed forms") {
  const RMatrix F0 = RMatrix::Zero(3, 3);
  const RMatrix S = RMatrix::Identity(3, 3) * 2.0;
  CHECK((lyapunov_solve(F0, S) - S).cwiseAbs().maxCoeff() == 0.0);

  RMatrix f(1, 1), s(1, 1);
  f << 0.5;
  s << 1.0;
  CHECK(lyapunov_solve(f, s)(0, 0) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("lyapunov_solve: nilpotent F matches the truncated series") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int p : {2, 4, 7}) {
    RMatrix F = RMatrix::Zero(p, p);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < i; ++j) F(i, j) = 0.4 * g(rng);
    const RMatrix S = RMatrix::Identity(p, p);
    const RMatrix X = lyapunov_solve(F, S);
    const RMatrix ref = oracle::nilpotent_lyapunov(F, S, p);
    CHECK((X - ref).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + ref.cwiseAbs().maxCoeff()));
    CHECK((X - F * X * F.transpose() - S).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + S.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("lyapunov_solve: residual invariant on a contractive dense F") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  RMatrix F(5, 5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) F(i, j) = g(rng);
  F *= 0.9 / spectral_norm(F);
  RMatrix A(5, 5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) A(i, j) = g(rng);
  const RMatrix S = A * A.transpose();
  const RMatrix X = lyapunov_solve(F, S);
  CHECK((X - F * X * F.transpose() - S).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + S.cwiseAbs().maxCoeff()));
  CHECK((X - X.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("lyapunov_solve: unstable system is reported") {
  RMatrix f(1, 1), s(1, 1);
  f << 1.5;
  s << 1.0;
  CHECK_THROWS_WITH_AS(lyapunov_solve(f, s), "unstable system", NumericalError);
}
