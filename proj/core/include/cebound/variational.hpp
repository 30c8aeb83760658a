#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "cebound/hermitian.hpp"
#include "cebound/two_level.hpp"

namespace cebound {

/// A finite Kraus family mapping dim_in x dim_in to dim_out x dim_out.
struct KrausChannel {
  Index dim_in = 0;
  Index dim_out = 0;
  std::vector<ComplexMatrix> kraus; ///< each dim_out x dim_in

  /// sum_k K rho K*.
  [[nodiscard]] ComplexMatrix apply(const ComplexMatrix& rho) const;
  /// ||sum_k K* K - I_in||_F.
  [[nodiscard]] double completeness_defect() const;
};

inline constexpr double kSingularValueCutoff = 1e-12;

/// One coherent channel of the SVD pinching: the 2x2 block
/// [[a_pin, s], [s, c_pin]] on the singular pair (u_j, v_j).
struct PinchedChannel {
  double a_pin = 0.0;
  double c_pin = 0.0;
  double s = 0.0;
};

struct PinchedData {
  std::vector<PinchedChannel> channels;
  RealVector kernel_a;   ///< eigenvalues of A compressed to ker B*
  RealVector kernel_c;   ///< eigenvalues of C compressed to ker B
  KrausChannel channel;  ///< {P_j (+) Q_j} together with R_P and R_Q
  ComplexMatrix pinched; ///< channel applied to rho
  double pinched_entropy = 0.0; ///< D(rho_pin || Pi rho_pin)
  double phi_sum = 0.0;         ///< sum_j Phi(a_pin, c_pin, s^2)
};

/// Builds the SVD pinching channel from a full SVD of B, keeping singular
/// values above kSingularValueCutoff as coherent channels.
[[nodiscard]] PinchedData svd_pinch(const BlockState& state);

/// Phases theta with |sum_j exp(i theta_j) l_j| = target and theta_0 = 0,
/// returned in [0, 2 pi). The target must lie in
/// [max(0, 2 l_max - sum l), sum l] up to 1e-12 (1 + sum l); otherwise
/// RangeError.
[[nodiscard]] std::vector<double> polygon_phases(const std::vector<double>& lengths, double target);

/// |sum_j exp(i theta_j) l_j|.
[[nodiscard]] double polygon_modulus(const std::vector<double>& lengths, const std::vector<double>& theta);

struct MergeSpec {
  std::vector<TwoLevelParams> blocks; ///< (a_j, eps_j, x_j)
  double eps_rem = 0.0;
  double a0 = 0.0;
};

/// Input basis: (p_j, q_j) at indices (2j, 2j + 1), then q_rem at 2n.
/// Output basis: p, q, then one spectator s_j per block.
struct MergeResult {
  KrausChannel channel;
  TwoLevelParams merged;   ///< (A, E, X)
  double left_entropy = 0.0;  ///< sum_j Phi(a_j, eps_j, x_j)
  double right_entropy = 0.0; ///< Phi(A, E, X)
  double channel_entropy = 0.0; ///< D(E(M) || E(D)) computed from the matrices
  double t = 0.0;                ///< solution of sum_j a_j r_j(t)^2 = A
  double weight_residual = 0.0;  ///< |sum_j a_j r_j^2 - A|
  std::vector<double> r;
  std::vector<Complex> alpha;
  double active_block_error = 0.0; ///< max-abs distance of the active block to (A, sqrt X; sqrt X, E)
  ComplexMatrix input;   ///< M, the direct sum of the input blocks
  ComplexMatrix output;  ///< E(M)
};

/// Explicit CPTP merge of coherent 2x2 blocks into one. Validation: a0 > 0,
/// a_j >= a0, 0 <= x_j <= a_j eps_j (+1e-14) so eps_j = 0 forces x_j = 0,
/// and X <= A E (+1e-12). Throws DomainError otherwise.
[[nodiscard]] MergeResult merge_channel(const MergeSpec& spec);

/// Theorem parameters: floor a0, leakage eps, coherence c, dimensions.
struct VariationalParams {
  double a0 = 0.0;
  double eps = 0.0;
  double c = 0.0;
  Index dim_p = 1;
  Index dim_q = 1;

  /// a* = 1 - eps - (d_P - 1) a0.
  [[nodiscard]] double a_star() const;
};

/// Throws InfeasibleError naming the violated constraint.
void require_feasible(const VariationalParams& p);

struct OptimizerResult {
  BlockState state;
  double value = 0.0;    ///< Phi(a*, eps, c)
  double entropy = 0.0;  ///< D(rho* || Pi rho*)
  double a_star = 0.0;
};

/// rho* = [[a*, sqrt c], [sqrt c, eps]] on (p_1, q_1), a0 on the remaining P
/// directions and zero on the remaining Q directions.
[[nodiscard]] OptimizerResult optimizer(const VariationalParams& p);

/// Equality family: the optimizer with coherence sqrt(c) e^{i phase}, rotated
/// by independent Haar unitaries on P and Q when `rotation_seed` is given.
[[nodiscard]] BlockState equality_state(const VariationalParams& p, double phase,
                                        std::optional<std::uint64_t> rotation_seed = std::nullopt);

/// Random strict-interior state with lambda_min(A) >= a0, Tr C = eps and
/// ||B||_F^2 = c. A = a0 I + (1 - eps - d_P a0) A_hat and C = eps C_hat with
/// A_hat, C_hat Ginibre densities; B = s A^{1/2} K C^{1/2} with K a Haar
/// partial isometry and s chosen to hit c. Draws with s > 1 are rejected;
/// SamplingError after 10^4 attempts.
[[nodiscard]] BlockState sample_feasible_state(const VariationalParams& p, std::mt19937_64& rng);

struct VariationalCheck {
  double min_found = 0.0;   ///< min over optimizer and samples
  double min_sampled = 0.0; ///< min over samples only (+inf when trials = 0)
  double bound = 0.0;       ///< Phi(a*, eps, c)
  double gap = 0.0;         ///< min_found - bound
  double optimizer_gap = 0.0; ///< |D(rho*) - bound|
  int trials = 0;
};

/// Sample i is drawn from derive_seed(seed, i).
[[nodiscard]] VariationalCheck variational_check(const VariationalParams& p, int trials, std::uint64_t seed);

/// The three-step reduction D >= sum Phi(pinched) >= Phi(A, E, X) >= Phi(a*, eps, c).
struct PipelineChain {
  double entropy = 0.0;
  double pinched_sum = 0.0;
  double merged = 0.0;
  double variational = 0.0;
  double a0 = 0.0;
  double a_star = 0.0;
  double eps = 0.0;
  double c = 0.0;
  double completeness = 0.0; ///< worst Kraus completeness defect of the two channels
  double decomposition_residual = 0.0; ///< |D(rho_pin || Pi rho_pin) - sum Phi|

  [[nodiscard]] double min_step() const;
};

/// Uses `floor` as a0 when given (it must not exceed lambda_min(A)),
/// otherwise lambda_min(A). Needs a positive floor.
[[nodiscard]] PipelineChain pipeline_chain(const BlockState& state, std::optional<double> floor = std::nullopt);

struct ModulusRow {
  double eps_q = 0.0;
  double phi = 0.0;
  double phi_per_coherence = 0.0;
  std::optional<double> scaling_ratio;  ///< Phi / (tau eps_q log(a*/eps_q))
  std::optional<double> cost_ratio;     ///< (Phi / c) a* / log(a*/eps_q)
};

/// Rows for c(eps_q) = tau a* eps_q. Requires a* in (0, 1], tau in (0, 1] and
/// every eps_q > 0; the ratios are absent where log(a*/eps_q) <= 0.
[[nodiscard]] std::vector<ModulusRow> modulus_curve(double a_star, double tau, const std::vector<double>& eps_grid);

} // namespace cebound
