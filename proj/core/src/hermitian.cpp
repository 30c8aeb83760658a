#include "cebound/hermitian.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace cebound {

namespace {

double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

void require_finite(const ComplexMatrix& m, std::string_view what) {
  for (Index i = 0; i < m.size(); ++i) {
    const Complex z = m.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw ValidationError(std::string(what) + ": entries must be finite");
    }
  }
}

// Validates a full density matrix; shared by DensityMatrix and BlockState.
void validate_density(const ComplexMatrix& m, std::string_view what) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw ValidationError(std::string(what) + ": matrix must be square and non-empty");
  }
  require_finite(m, what);
  require_hermitian(m, what);
  const double lmin = lambda_min(m);
  if (lmin < -kPsdTol) {
    throw ValidationError(std::string(what) + ": not positive semidefinite (lambda_min = " +
                          std::to_string(lmin) + ")");
  }
  const double tr = m.trace().real();
  if (std::abs(tr - 1.0) > kTraceTol) {
    throw ValidationError(std::string(what) + ": trace must be 1 (trace = " +
                          std::to_string(tr) + ")");
  }
}

} // namespace

ComplexMatrix SpectralDecomposition::reconstruct() const {
  return eigenvectors * eigenvalues.cast<Complex>().asDiagonal() * eigenvectors.adjoint();
}

double hermiticity_defect(const ComplexMatrix& h) {
  if (h.rows() != h.cols()) return std::numeric_limits<double>::infinity();
  return max_abs(h - h.adjoint());
}

bool is_hermitian(const ComplexMatrix& h) {
  return h.rows() == h.cols() && hermiticity_defect(h) <= kHermitianTol * (1.0 + max_abs(h));
}

void require_hermitian(const ComplexMatrix& h, std::string_view what) {
  if (h.rows() != h.cols()) throw ValidationError(std::string(what) + ": matrix must be square");
  if (!is_hermitian(h)) {
    throw ValidationError(std::string(what) + ": not Hermitian (defect = " +
                          std::to_string(hermiticity_defect(h)) + ")");
  }
}

SpectralDecomposition eigh(const ComplexMatrix& h) {
  require_hermitian(h, "eigh input");
  const ComplexMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success) throw NumericError("eigh: eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

double lambda_min(const ComplexMatrix& h) {
  const ComplexMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericError("lambda_min: eigensolver did not converge");
  return solver.eigenvalues()(0);
}

ComplexMatrix direct_sum(const ComplexMatrix& top, const ComplexMatrix& bottom) {
  ComplexMatrix out = ComplexMatrix::Zero(top.rows() + bottom.rows(), top.cols() + bottom.cols());
  out.topLeftCorner(top.rows(), top.cols()) = top;
  out.bottomRightCorner(bottom.rows(), bottom.cols()) = bottom;
  return out;
}

double trace_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues().sum();
}

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

DensityMatrix::DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {
  validate_density(m_, "density matrix");
}

BlockState::BlockState(ComplexMatrix a, ComplexMatrix b, ComplexMatrix c)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)) {
  if (a_.rows() < 1 || c_.rows() < 1) throw ValidationError("block state: dim_p and dim_q must be >= 1");
  if (a_.rows() != a_.cols()) throw ValidationError("block state: A must be square");
  if (c_.rows() != c_.cols()) throw ValidationError("block state: C must be square");
  if (b_.rows() != a_.rows() || b_.cols() != c_.rows()) {
    throw ValidationError("block state: B must be dim_p x dim_q");
  }
  require_finite(b_, "block state B");
  require_hermitian(a_, "block state A");
  require_hermitian(c_, "block state C");
  validate_density(assemble(), "block state");
}

ComplexMatrix BlockState::assemble() const {
  ComplexMatrix rho(dim(), dim());
  rho.topLeftCorner(dim_p(), dim_p()) = a_;
  rho.topRightCorner(dim_p(), dim_q()) = b_;
  rho.bottomLeftCorner(dim_q(), dim_p()) = b_.adjoint();
  rho.bottomRightCorner(dim_q(), dim_q()) = c_;
  return rho;
}

DensityMatrix BlockState::density() const { return DensityMatrix(assemble()); }

ComplexMatrix BlockState::pinched_matrix() const { return direct_sum(a_, c_); }

ComplexMatrix BlockState::coherence_direction() const {
  ComplexMatrix y = ComplexMatrix::Zero(dim(), dim());
  y.topRightCorner(dim_p(), dim_q()) = b_;
  y.bottomLeftCorner(dim_q(), dim_p()) = b_.adjoint();
  return y;
}

BlockState block_decompose(const DensityMatrix& rho, Index dim_p) {
  const Index d = rho.dim();
  if (dim_p < 1 || dim_p >= d) {
    throw DomainError("block_decompose: dim_p must satisfy 1 <= dim_p < " + std::to_string(d));
  }
  const Index dim_q = d - dim_p;
  const ComplexMatrix& m = rho.matrix();
  // The bottom-left block is taken as the adjoint of B; for an exactly
  // Hermitian input this is bit-identical to the stored entries.
  ComplexMatrix a = m.topLeftCorner(dim_p, dim_p);
  ComplexMatrix b = m.topRightCorner(dim_p, dim_q);
  ComplexMatrix c = m.bottomRightCorner(dim_q, dim_q);
  return BlockState(std::move(a), std::move(b), std::move(c));
}

DensityMatrix pinch(const BlockState& state) { return DensityMatrix(state.pinched_matrix()); }

double relative_entropy_psd(const ComplexMatrix& rho, const ComplexMatrix& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) {
    throw DomainError("relative_entropy: dimension mismatch");
  }
  const SpectralDecomposition er = eigh(rho);
  const SpectralDecomposition es = eigh(sigma);

  const double rho_scale = 1.0 + er.eigenvalues.cwiseAbs().maxCoeff();
  double neg_entropy = 0.0;
  for (Index i = 0; i < er.eigenvalues.size(); ++i) {
    const double l = er.eigenvalues(i);
    if (l > kSupportTol * rho_scale) neg_entropy += xlogx(l);
  }

  const double sigma_scale = 1.0 + es.eigenvalues.cwiseAbs().maxCoeff();
  double cross = 0.0;
  for (Index k = 0; k < es.eigenvalues.size(); ++k) {
    const auto w = es.eigenvectors.col(k);
    const double mass = w.dot(rho * w).real();
    const double mu = es.eigenvalues(k);
    if (mu <= kSupportTol * sigma_scale) {
      if (mass > kSupportMassTol) return std::numeric_limits<double>::infinity();
      continue;
    }
    cross += mass * std::log(mu);
  }
  return neg_entropy - cross;
}

double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw DomainError("relative_entropy: dimension mismatch");
  return relative_entropy_psd(rho.matrix(), sigma.matrix());
}

double coherence_entropy(const BlockState& state) {
  return relative_entropy_psd(state.assemble(), state.pinched_matrix());
}

double pythagorean_residual(const BlockState& state, const DensityMatrix& sigma) {
  if (sigma.dim() != state.dim()) throw DomainError("pythagorean_residual: dimension mismatch");
  const double off = sigma.matrix().topRightCorner(state.dim_p(), state.dim_q()).norm();
  if (off > kBlockDiagonalTol) {
    throw DomainError("pythagorean_residual: sigma is not block-diagonal (off-block norm " +
                      std::to_string(off) + ")");
  }
  const ComplexMatrix rho = state.assemble();
  const ComplexMatrix m = state.pinched_matrix();
  const double lhs = relative_entropy_psd(rho, sigma.matrix());
  const double rhs = relative_entropy_psd(rho, m) + relative_entropy_psd(m, sigma.matrix());
  if (std::isinf(lhs) && std::isinf(rhs)) return 0.0;
  return lhs - rhs;
}

} // namespace cebound
