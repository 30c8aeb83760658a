#pragma once

#include <optional>
#include <ostream>
#include <vector>

#include "cebound/hermitian.hpp"

namespace cebound {

/// Uniform dephasing rho_t = M + exp(-gamma t) Y with M = A (+) C and
/// Y = rho - M.
struct OrbitConfig {
  BlockState state;
  double gamma = 1.0;
  double t_max = 1.0;
  int steps = 100;
};

/// Requires gamma > 0, t_max > 0, steps >= 1, A and C positive definite
/// (lambda_min > 1e-12) and M - Y positive semidefinite within 1e-12.
/// Throws DomainError naming the violated condition.
void validate_orbit(const OrbitConfig& cfg);

/// M + exp(-gamma t) Y for t >= 0.
[[nodiscard]] DensityMatrix orbit_state(const OrbitConfig& cfg, double t);

/// D(rho_t || M); the reference M is the same for every t.
[[nodiscard]] double orbit_entropy(const OrbitConfig& cfg, double t);

struct EntropyProduction {
  double rate = 0.0;     ///< -dD/dt from the trace formula
  double fd_rate = 0.0;  ///< finite-difference estimate
  bool fd_one_sided = false;
  double bound = 0.0;    ///< 2 gamma exp(-2 gamma t) Tr[B* Omega^{-1}(B)]
  double margin = 0.0;   ///< rate - bound
};

/// Analytic rate gamma alpha Tr[Y (log(M + alpha Y) - log M)] with
/// alpha = exp(-gamma t) (+infinity when rho_t is singular), together with
/// a central difference of step h = min(1e-6, 1e-3/gamma), shortened to
/// 1e-3 lambda_min(rho_t) / (gamma alpha ||Y||) (at least 1e-11) near the PSD
/// boundary; the difference is one-sided forward when the backward point
/// leaves the PSD cone.
[[nodiscard]] EntropyProduction entropy_production(const OrbitConfig& cfg, double t);

/// 2 gamma exp(-2 gamma t) ||B||_F^2 log(lambda_min(A) / Tr C) when
/// lambda_min(A) > 0 and Tr C <= lambda_min(A)/2; absent otherwise.
[[nodiscard]] std::optional<double> log_enhanced_bound(const OrbitConfig& cfg, double t);

/// Margin tolerance for numerically differentiated rates: 1e-6 (1 + |rate|).
[[nodiscard]] double rate_tolerance(double rate);

struct OrbitRow {
  double t = 0.0;
  double entropy = 0.0;
  double rate = 0.0;
  double fd_rate = 0.0;
  double bkm_bound = 0.0;
  std::optional<double> log_bound;
  double margin = 0.0;
};

/// Rows at t_k = k t_max / steps for k = 0..steps. Requires steps >= 2.
[[nodiscard]] std::vector<OrbitRow> orbit_trace(const OrbitConfig& cfg);

/// Index of the first row whose margin is below -rate_tolerance(rate) or whose
/// entropy exceeds the previous row's by more than 1e-12.
[[nodiscard]] std::optional<std::size_t> first_failing_row(const std::vector<OrbitRow>& rows);

/// Header `t,entropy,rate,bkm_bound,log_bound,margin`, values with 17
/// significant digits, empty log_bound when absent.
void write_orbit_csv(std::ostream& os, const std::vector<OrbitRow>& rows);

} // namespace cebound
