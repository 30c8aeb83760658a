#pragma once

namespace cebound {

/// Diagonal (a, eps) and squared coherence x of the 2x2 block
/// [[a, sqrt(x)], [sqrt(x), eps]]; positivity requires 0 <= x <= a eps.
struct TwoLevelParams {
  double a = 0.0;
  double eps = 0.0;
  double x = 0.0;
};

/// Phi(a, eps, x): relative entropy of the 2x2 block against its diagonal,
///   lambda_+ log lambda_+ + lambda_- log lambda_- - a log a - eps log eps,
/// lambda_+- = (a + eps +- sqrt((a - eps)^2 + 4x)) / 2, with 0 log 0 = 0.
///
/// Evaluated without cancellation: lambda_- is formed as (a eps - x)/lambda_+
/// and the small-x regime is summed through log1p, so the result keeps full
/// relative precision as x -> 0. Throws DomainError for negative inputs or
/// x > a eps + 1e-14; x within that slack is clamped to a eps.
[[nodiscard]] double phi(const TwoLevelParams& p);

/// d Phi / dx = log(lambda_+/lambda_-) / (lambda_+ - lambda_-) = L(lambda_+, lambda_-).
/// Requires a, eps > 0 and 0 <= x <= a eps. Returns +infinity at x = a eps.
[[nodiscard]] double phi_dx(const TwoLevelParams& p);

/// d^2 Phi / dx^2 = 4 (sinh(2u)/2 - u) / D^3 with u = log(lambda_+/lambda_-)/2
/// and D = lambda_+ - lambda_-. Uses a three-term series in u below u = 1e-4.
/// Requires a, eps > 0 and 0 <= x <= a eps. Returns +infinity at x = a eps.
[[nodiscard]] double phi_dxx(const TwoLevelParams& p);

struct PhiChain {
  double phi = 0.0;
  double x_kernel = 0.0; ///< x L(a, eps)
  double x_log = 0.0;    ///< x log(a / eps)
  bool ok = false;       ///< phi >= x L - 1e-12 and x L >= x log(a/eps) - 1e-12
};

/// Checks Phi >= x L(a, eps) >= x log(a/eps). The chain needs 0 < eps < a <= 1
/// (it fails e.g. at a = 10, eps = 0.01), so anything else is a DomainError.
[[nodiscard]] PhiChain phi_chain_check(const TwoLevelParams& p);

} // namespace cebound
