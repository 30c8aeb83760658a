#include "cebound/bkm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

namespace cebound {

namespace {

constexpr double kNearDiagonal = 1e-8;
constexpr double kStrictPositivity = 1e-12;
constexpr int kMaxQuadratureLevels = 24;

void require_positive_definite(const ComplexMatrix& m, std::string_view what) {
  require_hermitian(m, what);
  const double lmin = lambda_min(m);
  if (!(lmin > kStrictPositivity)) {
    throw PositivityError(std::string(what) + " must be positive definite (lambda_min = " +
                          std::to_string(lmin) + ")");
  }
}

void require_blocks(const ComplexMatrix& a, const ComplexMatrix& c, const ComplexMatrix& b) {
  if (b.rows() != a.rows() || b.cols() != c.rows()) {
    throw DomainError("BKM blocks: B must be dim(A) x dim(C)");
  }
  require_positive_definite(a, "block A");
  require_positive_definite(c, "block C");
}

// |<e_alpha, B f_beta>|^2 in the eigenbases of A and C.
struct RotatedCoherence {
  SpectralDecomposition ea;
  SpectralDecomposition ec;
  ComplexMatrix b_tilde;
};

RotatedCoherence rotate(const ComplexMatrix& a, const ComplexMatrix& c, const ComplexMatrix& b) {
  require_blocks(a, c, b);
  RotatedCoherence r{eigh(a), eigh(c), {}};
  r.b_tilde = r.ea.eigenvectors.adjoint() * b * r.ec.eigenvectors;
  return r;
}

void require_grid(std::span<const double> t_grid) {
  for (double t : t_grid) {
    if (!(t >= 0.0 && t < 1.0)) throw DomainError("midpoint grid: every t must lie in [0, 1)");
  }
}

template <typename Form>
MidpointResult midpoint_impl(const ComplexMatrix& a, const ComplexMatrix& c, const ComplexMatrix& b,
                             std::span<const double> t_grid, Form&& form) {
  if (b.rows() != a.rows() || b.cols() != c.rows()) throw DomainError("midpoint: B must be dim(A) x dim(C)");
  require_hermitian(a, "midpoint block A");
  require_hermitian(c, "midpoint block C");
  if (!(lambda_min(a) > kStrictPositivity) || !(lambda_min(c) > kStrictPositivity)) {
    throw DomainError("midpoint: M = A (+) C must be positive definite");
  }
  require_grid(t_grid);

  const ComplexMatrix m = direct_sum(a, c);
  ComplexMatrix y = ComplexMatrix::Zero(m.rows(), m.cols());
  y.topRightCorner(b.rows(), b.cols()) = b;
  y.bottomLeftCorner(b.cols(), b.rows()) = b.adjoint();
  if (lambda_min(m + y) < -kPsdTol || lambda_min(m - y) < -kPsdTol) {
    throw DomainError("midpoint: M +/- Y must be positive semidefinite");
  }

  const double base = form(m, y);
  MidpointResult out;
  out.margins.reserve(t_grid.size());
  for (double t : t_grid) {
    const double plus = form(m + t * y, y);
    const double minus = form(m - t * y, y);
    out.margins.push_back(plus - base);
    out.max_symmetry_residual = std::max(out.max_symmetry_residual, std::abs(plus - minus));
  }
  return out;
}

} // namespace

double log_mean_kernel(double a, double c) {
  if (!(a > 0.0) || !(c > 0.0)) {
    throw DomainError("log_mean_kernel: arguments must be positive (a = " + std::to_string(a) +
                      ", c = " + std::to_string(c) + ")");
  }
  // Order the arguments so the result is bitwise symmetric.
  const double hi = std::max(a, c);
  const double lo = std::min(a, c);
  const double sum = hi + lo;
  const double diff = hi - lo;
  if (diff <= kNearDiagonal * sum) {
    const double z2 = (diff / sum) * (diff / sum);
    return (2.0 / sum) * (1.0 + z2 * (1.0 / 3.0 + z2 * (1.0 / 5.0 + z2 / 7.0)));
  }
  // Near the diagonal log(hi/lo) = 2 atanh(z); far from it atanh is ill-conditioned.
  if (hi <= 3.0 * lo) return 2.0 * std::atanh(diff / sum) / diff;
  return std::log(hi / lo) / diff;
}

ComplexMatrix bkm_apply(const ComplexMatrix& a, const ComplexMatrix& c, const ComplexMatrix& b) {
  const RotatedCoherence r = rotate(a, c, b);
  ComplexMatrix x = r.b_tilde;
  for (Index j = 0; j < x.cols(); ++j) {
    for (Index i = 0; i < x.rows(); ++i) {
      x(i, j) *= log_mean_kernel(r.ea.eigenvalues(i), r.ec.eigenvalues(j));
    }
  }
  return r.ea.eigenvectors * x * r.ec.eigenvectors.adjoint();
}

double bkm_form(const ComplexMatrix& a, const ComplexMatrix& c, const ComplexMatrix& b) {
  const RotatedCoherence r = rotate(a, c, b);
  double total = 0.0;
  for (Index j = 0; j < r.b_tilde.cols(); ++j) {
    for (Index i = 0; i < r.b_tilde.rows(); ++i) {
      total += std::norm(r.b_tilde(i, j)) * log_mean_kernel(r.ea.eigenvalues(i), r.ec.eigenvalues(j));
    }
  }
  return total;
}

double ChannelWeights::reconstruct_form() const {
  double acc = 0.0;
  for (Index j = 0; j < weights.cols(); ++j) {
    for (Index i = 0; i < weights.rows(); ++i) {
      if (weights(i, j) != 0.0) acc += weights(i, j) * log_mean_kernel(a_eigen(i), c_eigen(j));
    }
  }
  return frob_sq * acc;
}

ChannelWeights channel_weights(const ComplexMatrix& a, const ComplexMatrix& c, const ComplexMatrix& b) {
  const RotatedCoherence r = rotate(a, c, b);
  ChannelWeights w;
  w.a_eigen = r.ea.eigenvalues;
  w.c_eigen = r.ec.eigenvalues;
  w.frob_sq = b.squaredNorm();
  w.weights = Eigen::MatrixXd::Zero(b.rows(), b.cols());
  if (w.frob_sq == 0.0) return w;
  w.weights = r.b_tilde.cwiseAbs2() / w.frob_sq;
  return w;
}

double bkm_quadrature(const ComplexMatrix& a, const ComplexMatrix& c, const ComplexMatrix& b, double tol) {
  require_blocks(a, c, b);
  if (!(tol > 0.0)) throw DomainError("bkm_quadrature: tol must be positive");
  const Index dp = a.rows();
  const Index dq = c.rows();
  const ComplexMatrix ip = ComplexMatrix::Identity(dp, dp);
  const ComplexMatrix iq = ComplexMatrix::Identity(dq, dq);
  const ComplexMatrix b_adj = b.adjoint();

  // Integrand after r = t / (1 - t), dr = dt / (1 - t)^2.
  auto integrand = [&](double t) {
    const double s = 1.0 - t;
    const double r = t / s;
    const ComplexMatrix x = (a + r * ip).partialPivLu().solve(b);
    const ComplexMatrix z = (c + r * iq).partialPivLu().solve(b_adj * x);
    return z.trace().real() / (s * s);
  };
  using Rule = boost::math::quadrature::gauss<double, 15>;

  struct Panel {
    double lo;
    double hi;
    double value;
  };
  std::vector<Panel> active{{0.0, 1.0, Rule::integrate(integrand, 0.0, 1.0)}};
  double accepted = 0.0;
  for (int level = 0; level <= kMaxQuadratureLevels; ++level) {
    std::vector<Panel> refined;
    refined.reserve(2 * active.size());
    double estimate = accepted;
    for (const Panel& p : active) {
      const double mid = 0.5 * (p.lo + p.hi);
      Panel left{p.lo, mid, Rule::integrate(integrand, p.lo, mid)};
      Panel right{mid, p.hi, Rule::integrate(integrand, mid, p.hi)};
      estimate += left.value + right.value;
      refined.push_back(left);
      refined.push_back(right);
    }
    std::vector<Panel> next;
    for (std::size_t k = 0; k < active.size(); ++k) {
      const Panel& coarse = active[k];
      const Panel& left = refined[2 * k];
      const Panel& right = refined[2 * k + 1];
      const double fine = left.value + right.value;
      const double width = coarse.hi - coarse.lo;
      if (std::abs(fine - coarse.value) <= tol * (1.0 + std::abs(estimate)) * width) {
        accepted += fine;
      } else {
        next.push_back(left);
        next.push_back(right);
      }
    }
    if (next.empty()) return accepted;
    active = std::move(next);
  }
  throw NumericError("bkm_quadrature: no convergence after " + std::to_string(kMaxQuadratureLevels) +
                     " refinement levels");
}

double bkm_hessian(const ComplexMatrix& n, const ComplexMatrix& y) {
  if (y.rows() != n.rows() || y.cols() != n.cols()) throw DomainError("bkm_hessian: dimension mismatch");
  require_positive_definite(n, "base point N");
  require_hermitian(y, "direction Y");
  const SpectralDecomposition en = eigh(n);
  const ComplexMatrix yt = en.eigenvectors.adjoint() * y * en.eigenvectors;
  double total = 0.0;
  for (Index j = 0; j < yt.cols(); ++j) {
    for (Index i = 0; i < yt.rows(); ++i) {
      const double w = std::norm(yt(i, j));
      if (w != 0.0) total += w * log_mean_kernel(en.eigenvalues(i), en.eigenvalues(j));
    }
  }
  return total;
}

std::string_view to_string(MonotoneMetric m) {
  switch (m) {
    case MonotoneMetric::bkm: return "bkm";
    case MonotoneMetric::arithmetic: return "arithmetic";
    case MonotoneMetric::geometric: return "geometric";
    case MonotoneMetric::harmonic: return "harmonic";
  }
  return "unknown";
}

double monotone_function(MonotoneMetric m, double x) {
  if (!(x > 0.0)) throw DomainError("monotone_function: x must be positive");
  switch (m) {
    case MonotoneMetric::bkm: return 1.0 / log_mean_kernel(x, 1.0);
    case MonotoneMetric::arithmetic: return 0.5 * (1.0 + x);
    case MonotoneMetric::geometric: return std::sqrt(x);
    case MonotoneMetric::harmonic: return 2.0 * x / (1.0 + x);
  }
  throw DomainError("monotone_function: unknown metric");
}

double petz_form(const ComplexMatrix& n, const ComplexMatrix& y, MonotoneMetric m) {
  if (y.rows() != n.rows() || y.cols() != n.cols()) throw DomainError("metric form: dimension mismatch");
  require_positive_definite(n, "base point N");
  require_hermitian(y, "direction Y");
  const SpectralDecomposition en = eigh(n);
  const ComplexMatrix yt = en.eigenvectors.adjoint() * y * en.eigenvectors;
  const RealVector& nu = en.eigenvalues;
  double total = 0.0;
  for (Index j = 0; j < yt.cols(); ++j) {
    for (Index i = 0; i < yt.rows(); ++i) {
      const double w = std::norm(yt(i, j));
      if (w == 0.0) continue;
      total += w / (nu(j) * monotone_function(m, nu(i) / nu(j)));
    }
  }
  return total;
}

double MidpointResult::min_margin() const {
  return margins.empty() ? 0.0 : *std::min_element(margins.begin(), margins.end());
}

MidpointResult midpoint_margin(const ComplexMatrix& a, const ComplexMatrix& c, const ComplexMatrix& b,
                               std::span<const double> t_grid) {
  return midpoint_impl(a, c, b, t_grid,
                       [](const ComplexMatrix& n, const ComplexMatrix& y) { return bkm_hessian(n, y); });
}

MidpointResult midpoint_margin(const BlockState& state, std::span<const double> t_grid) {
  return midpoint_margin(state.a(), state.c(), state.b(), t_grid);
}

MidpointResult petz_midpoint_margin(const ComplexMatrix& a, const ComplexMatrix& c, const ComplexMatrix& b,
                                    std::span<const double> t_grid, MonotoneMetric m) {
  return midpoint_impl(a, c, b, t_grid,
                       [m](const ComplexMatrix& n, const ComplexMatrix& y) { return petz_form(n, y, m); });
}

MidpointResult petz_midpoint_margin(const BlockState& state, std::span<const double> t_grid, MonotoneMetric m) {
  return petz_midpoint_margin(state.a(), state.c(), state.b(), t_grid, m);
}

std::vector<double> uniform_grid(double t_max, int n) {
  if (n < 1) throw DomainError("uniform_grid: need at least one point");
  std::vector<double> grid(static_cast<std::size_t>(n));
  if (n == 1) {
    grid[0] = 0.0;
    return grid;
  }
  for (int k = 0; k < n; ++k) grid[static_cast<std::size_t>(k)] = t_max * k / (n - 1);
  return grid;
}

} // namespace cebound
