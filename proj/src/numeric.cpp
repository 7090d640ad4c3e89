#include "ddag/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ddag/errors.hpp"

namespace ddag {

FrequencyPoint::FrequencyPoint(double omega) : omega_(omega) {
  if (!(omega >= 0.0 && omega < kTwoPi)) {
    throw ConfigError("frequency must lie in [0, 2pi), got " +
                      std::to_string(omega));
  }
}

FrequencyPoint FrequencyPoint::from_bin(long index, long N) {
  if (N < 1 || index < 0 || index >= N) {
    throw ConfigError("DFT bin index must satisfy 0 <= index < N");
  }
  return FrequencyPoint(kTwoPi * static_cast<double>(index) /
                        static_cast<double>(N));
}

bool is_hermitian(const CMatrix& A) {
  if (A.rows() != A.cols()) return false;
  const double scale = 1.0 + (A.size() ? A.cwiseAbs().maxCoeff() : 0.0);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = i; j < A.cols(); ++j) {
      worst = std::max(worst, std::abs(A(i, j) - std::conj(A(j, i))));
    }
  }
  return worst <= 1e-10 * scale;
}

CMatrix hermitian_part(const CMatrix& A) {
  return 0.5 * (A + A.adjoint());
}

std::vector<Complex> dft_twiddles(FrequencyPoint omega, int N) {
  std::vector<Complex> tw(static_cast<std::size_t>(std::max(N, 0)));
  for (int k = 0; k < N; ++k) {
    // Reduce the phase before evaluating so long sequences keep accuracy.
    const double phase = std::fmod(omega.omega() * k, kTwoPi);
    tw[static_cast<std::size_t>(k)] = std::polar(1.0, -phase);
  }
  return tw;
}

CVector dft_with_twiddles(std::span<const double> samples, int p,
                          std::span<const Complex> twiddles) {
  const auto N = twiddles.size();
  if (N == 0) throw ConfigError("empty trajectory");
  if (p < 1 || samples.size() != N * static_cast<std::size_t>(p)) {
    throw ConfigError("sample buffer does not match N x p");
  }
  CVector out = CVector::Zero(p);
  const double* row = samples.data();
  for (std::size_t k = 0; k < N; ++k, row += p) {
    const Complex w = twiddles[k];
    for (int i = 0; i < p; ++i) out[i] += row[i] * w;
  }
  out /= std::sqrt(static_cast<double>(N));
  return out;
}

CVector dft_at(std::span<const double> samples, int p, FrequencyPoint omega) {
  if (samples.empty()) throw ConfigError("empty trajectory");
  if (p < 1 || samples.size() % static_cast<std::size_t>(p) != 0) {
    throw ConfigError("sample buffer is not a whole number of p-vectors");
  }
  const int N = static_cast<int>(samples.size() / static_cast<std::size_t>(p));
  const auto tw = dft_twiddles(omega, N);
  return dft_with_twiddles(samples, p, tw);
}

namespace {

// In-place Cholesky A = L L*; returns false when a pivot drops below
// `min_pivot`. Only the lower triangle of A is read.
bool cholesky(const CMatrix& A, double min_pivot, CMatrix& L) {
  const Eigen::Index n = A.rows();
  L = CMatrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    double pivot = A(k, k).real();
    for (Eigen::Index m = 0; m < k; ++m) pivot -= std::norm(L(k, m));
    if (!(pivot >= min_pivot) || pivot <= 0.0) return false;
    const double lkk = std::sqrt(pivot);
    L(k, k) = lkk;
    for (Eigen::Index i = k + 1; i < n; ++i) {
      Complex s = A(i, k);
      for (Eigen::Index m = 0; m < k; ++m) s -= L(i, m) * std::conj(L(k, m));
      L(i, k) = s / lkk;
    }
  }
  return true;
}

CMatrix cholesky_solve(const CMatrix& L, const CMatrix& B) {
  const auto Lv = L.triangularView<Eigen::Lower>();
  CMatrix Y = Lv.solve(B);
  return Lv.adjoint().solve(Y);
}

}  // namespace

SolveManyResult hermitian_solve(const CMatrix& A, const CMatrix& B) {
  if (A.rows() == 0 || A.rows() != A.cols()) {
    throw ConfigError("hermitian_solve: matrix must be square and nonempty");
  }
  if (B.rows() != A.rows()) {
    throw ConfigError("hermitian_solve: right-hand side is not conformable");
  }
  if (!is_hermitian(A)) {
    throw ConfigError("hermitian_solve: matrix is not Hermitian");
  }
  const double dim = static_cast<double>(A.rows());
  const double mean_diag = A.diagonal().real().sum() / dim;
  if (!(mean_diag > 0.0) || !std::isfinite(mean_diag)) {
    throw NumericalError("hermitian_solve: trace is not positive");
  }

  SolveManyResult out;
  CMatrix L;
  if (cholesky(A, 1e-12 * mean_diag, L)) {
    out.X = cholesky_solve(L, B);
    return out;
  }
  CMatrix ridged = A;
  ridged.diagonal().array() += 1e-10 * mean_diag;
  if (!cholesky(ridged, 0.0, L)) {
    throw NumericalError(
        "hermitian_solve: matrix is singular beyond ridge rescue (dim " +
        std::to_string(A.rows()) + ", mean diagonal " +
        std::to_string(mean_diag) + ")");
  }
  out.X = cholesky_solve(L, B);
  out.ridge_applied = true;
  return out;
}

SolveResult hermitian_solve(const CMatrix& A, const CVector& b) {
  auto many = hermitian_solve(A, CMatrix(b));
  return {many.X.col(0), many.ridge_applied};
}

double spectral_norm(const CMatrix& A) {
  if (A.size() == 0) throw ConfigError("spectral_norm: empty matrix");
  Eigen::JacobiSVD<CMatrix> svd(A);
  return svd.singularValues()(0);
}

double spectral_norm(const RMatrix& A) {
  if (A.size() == 0) throw ConfigError("spectral_norm: empty matrix");
  Eigen::JacobiSVD<RMatrix> svd(A);
  return svd.singularValues()(0);
}

EigenRange hermitian_eigen_range(const CMatrix& A) {
  if (A.size() == 0 || A.rows() != A.cols()) {
    throw ConfigError("hermitian_eigen_range: matrix must be square");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(A),
                                            Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw NumericalError("hermitian_eigen_range: eigensolver failed");
  }
  const auto& ev = es.eigenvalues();
  return {ev.minCoeff(), ev.maxCoeff()};
}

RMatrix lyapunov_solve(const RMatrix& F, const RMatrix& S) {
  if (F.rows() != F.cols() || S.rows() != S.cols() || F.rows() != S.rows()) {
    throw ConfigError("lyapunov_solve: F and S must be square and equal size");
  }
  constexpr long kMaxIterations = 1'000'000;
  RMatrix X = S;
  const RMatrix Ft = F.transpose();
  for (long it = 0; it < kMaxIterations; ++it) {
    RMatrix next = F * X * Ft + S;
    const double step = (next - X).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, next.cwiseAbs().maxCoeff());
    X = std::move(next);
    if (!std::isfinite(step)) break;
    if (step <= 1e-12 * scale) return 0.5 * (X + X.transpose());
  }
  throw NumericalError("unstable system");
}

}  // namespace ddag
