#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "cebound/hermitian.hpp"

namespace cebound {

/// L(a, c) = log(a/c) / (a - c), L(a, a) = 1/a: the reciprocal logarithmic
/// mean and the scalar kernel of the BKM metric.
///
/// Exactly symmetric in its arguments. Near the diagonal
/// (|a - c| <= 1e-8 (a + c)) it switches to the even series
/// (2/(a+c)) (1 + z^2/3 + z^4/5 + z^6/7) with z = (a - c)/(a + c).
/// Throws DomainError for nonpositive arguments.
[[nodiscard]] double log_mean_kernel(double a, double c);

/// Omega^{-1}_{A,C}(B) = int_0^inf (A + r)^{-1} B (C + r)^{-1} dr, evaluated in
/// the eigenbases of A and C. Throws PositivityError unless A, C > 1e-12.
[[nodiscard]] ComplexMatrix bkm_apply(const ComplexMatrix& a, const ComplexMatrix& c, const ComplexMatrix& b);

/// Tr[B* Omega^{-1}_{A,C}(B)] = sum_{alpha,beta} |<e_alpha, B f_beta>|^2 L(a_alpha, c_beta).
[[nodiscard]] double bkm_form(const ComplexMatrix& a, const ComplexMatrix& c, const ComplexMatrix& b);

struct ChannelWeights {
  Eigen::MatrixXd weights; ///< w(alpha, beta) = |<e_alpha, B f_beta>|^2 / ||B||_F^2
  RealVector a_eigen;
  RealVector c_eigen;
  double frob_sq = 0.0;

  /// ||B||_F^2 sum w L(a_alpha, c_beta); reproduces bkm_form.
  [[nodiscard]] double reconstruct_form() const;
};

/// Coherence channel weights. B = 0 yields all-zero weights and frob_sq = 0.
[[nodiscard]] ChannelWeights channel_weights(const ComplexMatrix& a, const ComplexMatrix& c,
                                             const ComplexMatrix& b);

/// Quadrature evaluation of Tr[B* Omega^{-1}(B)] straight from the resolvent
/// integral, independent of any eigendecomposition. Substitutes r = t/(1-t) and
/// refines composite Gauss-Legendre panels level by level until a level
/// changes the total by less than tol (1 + |total|). Throws NumericError after
/// 24 levels.
[[nodiscard]] double bkm_quadrature(const ComplexMatrix& a, const ComplexMatrix& c, const ComplexMatrix& b,
                                    double tol = 1e-12);

/// H_N(Y, Y) = int_0^inf Tr[Y (N + r)^{-1} Y (N + r)^{-1}] dr, evaluated spectrally.
[[nodiscard]] double bkm_hessian(const ComplexMatrix& n, const ComplexMatrix& y);

/// Symmetric normalized operator-monotone functions with f(1) = 1.
enum class MonotoneMetric { bkm, arithmetic, geometric, harmonic };

inline constexpr MonotoneMetric kAllMonotoneMetrics[] = {MonotoneMetric::bkm, MonotoneMetric::arithmetic,
                                                         MonotoneMetric::geometric, MonotoneMetric::harmonic};

[[nodiscard]] std::string_view to_string(MonotoneMetric m);

/// f(x) for x > 0.
[[nodiscard]] double monotone_function(MonotoneMetric m, double x);

/// Petz metric g^f_N(Y, Y) = sum_ij |Y~_ij|^2 / (nu_j f(nu_i / nu_j)).
[[nodiscard]] double petz_form(const ComplexMatrix& n, const ComplexMatrix& y, MonotoneMetric m);

struct MidpointResult {
  std::vector<double> margins;       ///< g_{M+tY}(Y,Y) - g_M(Y,Y) per grid point
  double max_symmetry_residual = 0.0; ///< max_t |g_{M+tY}(Y,Y) - g_{M-tY}(Y,Y)|

  [[nodiscard]] double min_margin() const;
};

/// Midpoint comparison for the BKM Hessian along the block-sign symmetric path
/// M +/- tY, M = A (+) C, Y = [[0, B], [B*, 0]].
/// Requires A, C > 0, M +/- Y PSD within 1e-12 and every t in [0, 1).
[[nodiscard]] MidpointResult midpoint_margin(const ComplexMatrix& a, const ComplexMatrix& c, const ComplexMatrix& b,
                                             std::span<const double> t_grid);
[[nodiscard]] MidpointResult midpoint_margin(const BlockState& state, std::span<const double> t_grid);

/// Same comparison for a Petz metric.
[[nodiscard]] MidpointResult petz_midpoint_margin(const ComplexMatrix& a, const ComplexMatrix& c,
                                                  const ComplexMatrix& b, std::span<const double> t_grid,
                                                  MonotoneMetric m);
[[nodiscard]] MidpointResult petz_midpoint_margin(const BlockState& state, std::span<const double> t_grid,
                                                  MonotoneMetric m);

/// n evenly spaced points from 0 to t_max inclusive.
[[nodiscard]] std::vector<double> uniform_grid(double t_max, int n);

} // namespace cebound
