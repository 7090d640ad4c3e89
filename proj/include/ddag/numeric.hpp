#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace ddag {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Angular frequency in [0, 2π). Values outside the range are rejected.
class FrequencyPoint {
 public:
  explicit FrequencyPoint(double omega);

  /// ω = 2π·index/N, the `index`-th DFT bin of an N-point transform.
  static FrequencyPoint from_bin(long index, long N);

  double omega() const { return omega_; }

 private:
  double omega_;
};

/// True when max |A(i,j) − conj(A(j,i))| ≤ 1e−10·(1 + max |A(i,j)|).
bool is_hermitian(const CMatrix& A);

/// Replaces A by (A + A*)/2. Used to strip rounding asymmetry.
CMatrix hermitian_part(const CMatrix& A);

/// Single-frequency DFT of a multichannel real sequence,
///   (1/√N) Σ_k x(k) e^{−iωk}.
/// `samples` holds N consecutive p-vectors, row-major (sample k occupies
/// entries [k·p, (k+1)·p)).
CVector dft_at(std::span<const double> samples, int p, FrequencyPoint omega);

/// Same as dft_at, with the twiddle factors e^{−iωk} precomputed by the
/// caller; `twiddles.size()` gives N.
CVector dft_with_twiddles(std::span<const double> samples, int p,
                          std::span<const Complex> twiddles);

/// Twiddle table e^{−iωk}, k = 0..N−1.
std::vector<Complex> dft_twiddles(FrequencyPoint omega, int N);

struct SolveResult {
  CVector x;
  bool ridge_applied = false;
};

/// Hermitian positive-definite solve via Cholesky. When the smallest pivot
/// falls below 1e−12·trace(A)/dim the factorisation is retried on
/// A + λI with λ = 1e−10·trace(A)/dim and `ridge_applied` is set.
/// Throws ConfigError for non-Hermitian input and NumericalError when the
/// ridge does not rescue the factorisation.
SolveResult hermitian_solve(const CMatrix& A, const CVector& b);

/// Multiple right-hand sides; same contract as the vector overload.
struct SolveManyResult {
  CMatrix X;
  bool ridge_applied = false;
};
SolveManyResult hermitian_solve(const CMatrix& A, const CMatrix& B);

/// Largest singular value.
double spectral_norm(const CMatrix& A);
double spectral_norm(const RMatrix& A);

/// Extreme eigenvalues of a Hermitian matrix.
struct EigenRange {
  double min = 0.0;
  double max = 0.0;
};
EigenRange hermitian_eigen_range(const CMatrix& A);

/// Solves X = F X Fᵀ + S by fixed-point iteration. Stops once successive
/// iterates agree to 1e−12 in max-abs; throws NumericalError
/// ("unstable system") after 10⁶ iterations or on divergence.
RMatrix lyapunov_solve(const RMatrix& F, const RMatrix& S);

}  // namespace ddag
