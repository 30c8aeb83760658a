#pragma once

// Shared generators and independent oracles for unit and acceptance tests.

#include <cmath>
#include <cstdint>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "cebound/cebound.hpp"

namespace cebound::testing {

/// Binary entropy in nats.
inline double binary_entropy(double q) { return -q * std::log(q) - (1.0 - q) * std::log1p(-q); }

/// log(a/c)/(a-c) in long double, no series branch.
inline double direct_kernel(double a, double c) {
  if (a == c) return 1.0 / a;
  const long double la = a;
  const long double lc = c;
  return static_cast<double>(std::log(la / lc) / (la - lc));
}

/// Relative entropy via the Schur-Parlett matrix logarithm; full-rank inputs only.
inline double relative_entropy_oracle(const ComplexMatrix& rho, const ComplexMatrix& sigma) {
  const ComplexMatrix lr = rho.log();
  const ComplexMatrix ls = sigma.log();
  return (rho * (lr - ls)).trace().real();
}

/// Relative entropy of the explicit 2x2 pair [[a, sqrt x], [sqrt x, eps]] vs diag(a, eps),
/// from the closed-form eigenvalues.
inline double phi_oracle(double a, double eps, double x) {
  const long double la = a, le = eps, lx = x;
  const long double d = std::sqrt((la - le) * (la - le) + 4.0L * lx);
  const long double lp = (la + le + d) / 2.0L;
  const long double lm = (la * le - lx) / lp;
  auto xl = [](long double t) { return t > 0.0L ? t * std::log(t) : 0.0L; };
  return static_cast<double>(xl(lp) + xl(lm) - xl(la) - xl(le));
}

inline BlockState rho_q(double q) { return two_level_pure_state(q); }

/// Random positive definite matrix with unit trace scaled by `scale` and eigenvalues floored.
inline ComplexMatrix random_pd(Index dim, std::mt19937_64& rng, double scale = 1.0) {
  ComplexMatrix m = random_density(dim, rng);
  m.diagonal().array() += 0.05;
  return scale * m / m.trace().real();
}

inline std::uint64_t seed_for(std::uint64_t base, std::uint64_t i) { return derive_seed(base, i); }

/// Boundary-ensemble parameters used across sweeps: a0 in [0.2, 0.8] / (d_P + 1)
/// and eps_q in a0 [0.01, 0.5].
inline BoundaryEnsemble boundary_params(Index dim_p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double a0 = (0.2 + 0.6 * u(rng)) / static_cast<double>(dim_p + 1);
  const double eps_q = a0 * (0.01 + 0.49 * u(rng));
  return {a0, eps_q};
}

/// Random Hermitian matrix with iid Gaussian entries.
inline ComplexMatrix random_hermitian(Index dim, std::mt19937_64& rng) {
  const ComplexMatrix g = ginibre(dim, dim, rng);
  return 0.5 * (g + g.adjoint());
}

} // namespace cebound::testing
