#include "cebound/random_state.hpp"

#include <cmath>
#include <string>

namespace cebound {

namespace {

constexpr int kBoundaryBisectionSteps = 60;

BlockState boundary_state(Index dim_p, Index dim_q, const BoundaryEnsemble& e, std::mt19937_64& rng) {
  if (e.a0 < 0.0 || e.eps_q < 0.0) throw InfeasibleError("boundary ensemble: a0 and eps_q must be >= 0");
  const double slack = 1.0 - e.eps_q - static_cast<double>(dim_p) * e.a0;
  if (slack < 0.0) {
    throw InfeasibleError("boundary ensemble: dim_p * a0 + eps_q > 1 (dim_p = " + std::to_string(dim_p) +
                          ", a0 = " + std::to_string(e.a0) + ", eps_q = " + std::to_string(e.eps_q) + ")");
  }
  const ComplexMatrix rho0 = random_density(dim_p + dim_q, rng);
  const ComplexMatrix a_hat = rho0.topLeftCorner(dim_p, dim_p) / rho0.topLeftCorner(dim_p, dim_p).trace().real();
  const ComplexMatrix c_hat =
      rho0.bottomRightCorner(dim_q, dim_q) / rho0.bottomRightCorner(dim_q, dim_q).trace().real();
  ComplexMatrix b_hat = rho0.topRightCorner(dim_p, dim_q);
  b_hat /= b_hat.norm();

  const ComplexMatrix a = e.a0 * ComplexMatrix::Identity(dim_p, dim_p) + slack * a_hat;
  const ComplexMatrix c = e.eps_q * c_hat;

  auto assembled = [&](double s) {
    ComplexMatrix rho(dim_p + dim_q, dim_p + dim_q);
    rho << a, s * b_hat, s * b_hat.adjoint(), c;
    return rho;
  };
  // ||B||_F^2 <= Tr A Tr C <= 1/4, so s = 1 is never feasible for unit ||b_hat||.
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < kBoundaryBisectionSteps; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (lambda_min(assembled(mid)) >= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return BlockState(a, lo * b_hat, c);
}

} // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(seed) ^ (index * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
}

ComplexMatrix ginibre(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  ComplexMatrix g(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re, im);
    }
  }
  return g;
}

ComplexMatrix random_unitary(Index dim, std::mt19937_64& rng) {
  const ComplexMatrix g = ginibre(dim, dim, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(dim, dim);
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < dim; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

ComplexMatrix random_density(Index dim, std::mt19937_64& rng) {
  const ComplexMatrix g = ginibre(dim, dim, rng);
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

BlockState random_block_state(Index dim_p, Index dim_q, std::uint64_t seed, const Ensemble& ensemble) {
  if (dim_p < 1 || dim_q < 1) throw DomainError("random_block_state: dims must be >= 1");
  std::mt19937_64 rng(seed);
  if (const auto* boundary = std::get_if<BoundaryEnsemble>(&ensemble)) {
    return boundary_state(dim_p, dim_q, *boundary, rng);
  }
  const ComplexMatrix rho = random_density(dim_p + dim_q, rng);
  return BlockState(rho.topLeftCorner(dim_p, dim_p), rho.topRightCorner(dim_p, dim_q),
                    rho.bottomRightCorner(dim_q, dim_q));
}

} // namespace cebound
