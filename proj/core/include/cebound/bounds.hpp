#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cebound/hermitian.hpp"

namespace cebound {

/// Singular A or C falls outside the operator bound's hypotheses. With
/// `regularize` set, bounds are evaluated on (1 - delta) rho + (delta/d) I and
/// the result is flagged as regularized.
struct BoundOptions {
  bool regularize = false;
  double delta = 1e-10;
};

/// Tr[B* Omega^{-1}_{A,C}(B)], a lower bound on D(rho || Pi rho).
/// B = 0 gives 0 for any blocks; otherwise singular A or C throws
/// PositivityError unless regularization is enabled.
[[nodiscard]] double operator_bound(const BlockState& state, const BoundOptions& options = {});

/// ||B||_F^2 log(lambda_min(A) / Tr C); present only when lambda_min(A) > 0,
/// Tr C > 0 and Tr C <= lambda_min(A) / 2.
[[nodiscard]] std::optional<double> log_boundary_bound(const BlockState& state);

/// 2 ||B||_1^2 (Pinsker with ||rho - Pi rho||_1 = 2 ||B||_1).
[[nodiscard]] double pinsker_bound(const BlockState& state);

/// | ||rho - Pi rho||_1 - 2 ||B||_1 |.
[[nodiscard]] double trace_norm_identity_residual(const BlockState& state);

/// Uhlmann fidelity Tr sqrt(sqrt(sigma) rho sqrt(sigma)) for PSD inputs.
[[nodiscard]] double fidelity(const ComplexMatrix& rho, const ComplexMatrix& sigma);

/// -2 log F(rho, Pi rho).
[[nodiscard]] double fidelity_bound(const BlockState& state);

struct BoundParameters {
  double a0 = 0.0;           ///< lambda_min(A)
  double eps_q = 0.0;        ///< Tr C
  double frob_sq = 0.0;      ///< ||B||_F^2
  double trace_norm_b = 0.0; ///< ||B||_1
  Index rank_b = 0;
};

/// Compares log(a0/eps_q) with 2 ||B||_1^2 / ||B||_F^2. The logarithmic bound
/// beats Pinsker exactly when the first is at least the second, which is
/// guaranteed once eps_q <= a0 exp(-2 rank B).
struct PinskerDiagnostic {
  std::optional<double> log_ratio;
  std::optional<double> pinsker_ratio;
  bool exponential_regime = false; ///< eps_q <= a0 exp(-2 rank B)
  bool log_dominates = false;
};

struct BoundReport {
  double entropy = 0.0;
  double bkm_bound = 0.0;
  std::optional<double> log_bound;
  double pinsker_bound = 0.0;
  double fidelity_bound = 0.0;
  bool coarse_applicable = false;
  bool regularized = false;
  std::map<std::string, double> margins; ///< entropy - bound, plus bkm - log when present
  BoundParameters params;
  PinskerDiagnostic pinsker_diagnostic;

  [[nodiscard]] double min_margin() const;
};

[[nodiscard]] BoundReport bound_report(const BlockState& state, const BoundOptions& options = {});

/// The pure two-level witness rho_q = [[1-q, sqrt(q(1-q))], [sqrt(q(1-q)), q]].
struct SharpnessPoint {
  double q = 0.0;
  BlockState state;
  double entropy = 0.0;   ///< D(rho_q || Pi rho_q), equal to the binary entropy h(q)
  double bkm = 0.0;       ///< q (1-q) L(1-q, q)
  double ratio_bkm = 0.0; ///< entropy / bkm
  double ratio_log = 0.0; ///< entropy / (q (1-q) log((1-q)/q))
};

/// Requires 0 < q < 1/2.
[[nodiscard]] SharpnessPoint sharpness_family(double q);

[[nodiscard]] BlockState two_level_pure_state(double q);

/// Operator-scalar separation witness: A = diag(a1, m), C = (eps),
/// B = (sqrt(a1 eps / 2), 0)^T with eta = 1/(K+1), m = eps^(1-eta),
/// a1 = 1 - m - eps.
struct SeparationPoint {
  double k = 0.0;
  double eps = 0.0;
  double eta = 0.0;
  double m = 0.0;
  double a1 = 0.0;
  BlockState state;
  double ratio = 0.0; ///< bkm_form / (||B||_F^2 log(lambda_min(A) / Tr C))
};

/// Requires K > 1 and 0 < eps < 1/4; throws InfeasibleError when a1 <= m.
[[nodiscard]] SeparationPoint separation_family(double k, double eps);

/// Largest eps in {1e-2, 1e-3, ..., 1e-12} whose separation ratio reaches K.
/// Throws NotFoundError (with the scanned table in the message) otherwise.
[[nodiscard]] double find_separation_eps(double k);

} // namespace cebound
