#pragma once

#include <complex>
#include <string_view>

#include <Eigen/Dense>

#include "cebound/errors.hpp"

namespace cebound {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Tolerances shared by every module. Relative ones scale with (1 + ||H||).
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kPsdTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kSupportTol = 1e-12;
inline constexpr double kSupportMassTol = 1e-10;
inline constexpr double kBlockDiagonalTol = 1e-12;

/// Eigenvalues in ascending order with the matching unitary of column eigenvectors.
struct SpectralDecomposition {
  RealVector eigenvalues;
  ComplexMatrix eigenvectors;

  [[nodiscard]] ComplexMatrix reconstruct() const;
};

/// max_ij |H_ij - conj(H_ji)|.
[[nodiscard]] double hermiticity_defect(const ComplexMatrix& h);
[[nodiscard]] bool is_hermitian(const ComplexMatrix& h);
/// Throws ValidationError naming `what` unless `h` is square and self-adjoint
/// within kHermitianTol * (1 + max|H|).
void require_hermitian(const ComplexMatrix& h, std::string_view what);

/// Hermitian eigendecomposition. The input is symmetrized before solving so
/// the result depends only on (H + H*)/2; identical input gives identical output.
[[nodiscard]] SpectralDecomposition eigh(const ComplexMatrix& h);

[[nodiscard]] double lambda_min(const ComplexMatrix& h);

/// V f(diag(lambda)) V*.
template <typename F>
[[nodiscard]] ComplexMatrix apply_spectral(const SpectralDecomposition& s, F&& f) {
  RealVector fx(s.eigenvalues.size());
  for (Index i = 0; i < fx.size(); ++i) fx(i) = f(s.eigenvalues(i));
  return s.eigenvectors * fx.asDiagonal() * s.eigenvectors.adjoint();
}

[[nodiscard]] ComplexMatrix direct_sum(const ComplexMatrix& top, const ComplexMatrix& bottom);

/// Sum of singular values.
[[nodiscard]] double trace_norm(const ComplexMatrix& m);

/// x log x with the convention 0 log 0 = 0.
[[nodiscard]] double xlogx(double x);

/// A validated density matrix: Hermitian, PSD and unit trace within 1e-12.
class DensityMatrix {
public:
  explicit DensityMatrix(ComplexMatrix m);

  [[nodiscard]] const ComplexMatrix& matrix() const noexcept { return m_; }
  [[nodiscard]] Index dim() const noexcept { return m_.rows(); }

private:
  ComplexMatrix m_;
};

/// A density matrix split as [[A, B], [B*, C]] along P (+) Q.
class BlockState {
public:
  /// Validates shapes, Hermiticity of A and C, positivity and unit trace of the
  /// assembled matrix. Throws ValidationError naming the violated invariant.
  BlockState(ComplexMatrix a, ComplexMatrix b, ComplexMatrix c);

  [[nodiscard]] Index dim_p() const noexcept { return a_.rows(); }
  [[nodiscard]] Index dim_q() const noexcept { return c_.rows(); }
  [[nodiscard]] Index dim() const noexcept { return dim_p() + dim_q(); }

  [[nodiscard]] const ComplexMatrix& a() const noexcept { return a_; }
  [[nodiscard]] const ComplexMatrix& b() const noexcept { return b_; }
  [[nodiscard]] const ComplexMatrix& c() const noexcept { return c_; }

  [[nodiscard]] ComplexMatrix assemble() const;
  [[nodiscard]] DensityMatrix density() const;
  /// M = A (+) C.
  [[nodiscard]] ComplexMatrix pinched_matrix() const;
  /// Y = rho - M = [[0, B], [B*, 0]].
  [[nodiscard]] ComplexMatrix coherence_direction() const;

private:
  ComplexMatrix a_;
  ComplexMatrix b_;
  ComplexMatrix c_;
};

/// Exact leading / off-diagonal / trailing blocks. Requires 1 <= dim_p < dim.
[[nodiscard]] BlockState block_decompose(const DensityMatrix& rho, Index dim_p);

/// A (+) C with the off-diagonal blocks exactly zero.
[[nodiscard]] DensityMatrix pinch(const BlockState& state);

/// Umegaki relative entropy Tr[rho (log rho - log sigma)] in nats for
/// arbitrary PSD arguments (no trace normalization). Returns +infinity when
/// rho carries more than kSupportMassTol weight on a numerically null
/// eigendirection of sigma.
[[nodiscard]] double relative_entropy_psd(const ComplexMatrix& rho, const ComplexMatrix& sigma);

/// Density-matrix relative entropy. Throws DomainError on dimension mismatch.
[[nodiscard]] double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma);

/// D(rho || Pi rho), the relative entropy of coherence.
[[nodiscard]] double coherence_entropy(const BlockState& state);

/// D(rho||sigma) - D(rho||Pi rho) - D(Pi rho||sigma) for block-diagonal sigma.
/// Returns 0 when both sides are +infinity and +infinity when only the left is.
[[nodiscard]] double pythagorean_residual(const BlockState& state, const DensityMatrix& sigma);

} // namespace cebound
