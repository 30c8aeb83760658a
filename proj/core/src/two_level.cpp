#include "cebound/two_level.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cebound/bkm.hpp"
#include "cebound/errors.hpp"

namespace cebound {

namespace {

constexpr double kCoherenceSlack = 1e-14;
constexpr double kSeriesU = 0.5;
constexpr double kChainSlack = 1e-12;

std::string describe(const TwoLevelParams& p) {
  return "(a = " + std::to_string(p.a) + ", eps = " + std::to_string(p.eps) + ", x = " + std::to_string(p.x) + ")";
}

// Validates and clamps x into [0, a eps].
TwoLevelParams checked(const TwoLevelParams& p) {
  if (!std::isfinite(p.a) || !std::isfinite(p.eps) || !std::isfinite(p.x)) {
    throw DomainError("two-level parameters must be finite " + describe(p));
  }
  if (p.a < 0.0 || p.eps < 0.0 || p.x < 0.0) throw DomainError("two-level parameters must be >= 0 " + describe(p));
  const double cap = p.a * p.eps;
  if (p.x > cap + kCoherenceSlack) throw DomainError("two-level block not PSD: x > a eps " + describe(p));
  return {p.a, p.eps, std::min(p.x, cap)};
}

TwoLevelParams checked_interior(const TwoLevelParams& p) {
  TwoLevelParams q = checked(p);
  if (!(q.a > 0.0) || !(q.eps > 0.0)) throw DomainError("derivatives need a, eps > 0 " + describe(p));
  return q;
}

struct Eigenpair {
  double hi;    // max(a, eps)
  double lo;    // min(a, eps)
  double disc;  // lambda_+ - lambda_-
  double shift; // lambda_+ - hi
  double plus;
  double minus;
};

Eigenpair eigenvalues(const TwoLevelParams& p) {
  Eigenpair e{};
  e.hi = std::max(p.a, p.eps);
  e.lo = std::min(p.a, p.eps);
  const double gap = e.hi - e.lo;
  e.disc = std::sqrt(gap * gap + 4.0 * p.x);
  e.shift = e.disc + gap > 0.0 ? 2.0 * p.x / (e.disc + gap) : 0.0;
  e.plus = e.hi + e.shift;
  // lambda_+ lambda_- = a eps - x exactly.
  e.minus = e.plus > 0.0 ? std::max(0.0, p.a * p.eps - p.x) / e.plus : 0.0;
  return e;
}

} // namespace

double phi(const TwoLevelParams& p) {
  const TwoLevelParams q = checked(p);
  if (q.x == 0.0) return 0.0;
  const Eigenpair e = eigenvalues(q);
  const double d = e.shift;
  if (d <= 0.5 * e.lo) {
    return e.hi * std::log1p(d / e.hi) + e.lo * std::log1p(-d / e.lo) + d * std::log(e.plus / e.minus);
  }
  return e.hi * std::log1p(d / e.hi) + d * std::log(e.plus) + xlogx(e.minus) - xlogx(e.lo);
}

double phi_dx(const TwoLevelParams& p) {
  const TwoLevelParams q = checked_interior(p);
  const Eigenpair e = eigenvalues(q);
  if (!(e.minus > 0.0)) return std::numeric_limits<double>::infinity();
  return log_mean_kernel(e.plus, e.minus);
}

double phi_dxx(const TwoLevelParams& p) {
  const TwoLevelParams q = checked_interior(p);
  const Eigenpair e = eigenvalues(q);
  if (!(e.minus > 0.0)) return std::numeric_limits<double>::infinity();
  // phi_dxx = (sinh(2u)/2 - u) / (2 g^3 sinh(u)^3) with plus/minus = exp(2u), g^2 = plus minus.
  const double u = 0.5 * std::log(e.plus / e.minus);
  const double g = std::sqrt(e.plus * e.minus);
  const double s = std::sinh(u);
  if (u < kSeriesU) {
    // sinh(2u)/2 - u = sum_{k >= 1} (2u)^{2k+1} / (2 (2k+1)!).
    const double w2 = 4.0 * u * u;
    double term = u * w2 / 6.0;
    double num = term;
    for (int k = 1; k < 30 && term > 1e-18 * num; ++k) {
      term *= w2 / static_cast<double>((2 * k + 2) * (2 * k + 3));
      num += term;
    }
    return num / (s * s * s) / (2.0 * g * g * g);
  }
  return (0.5 * std::sinh(2.0 * u) - u) / (s * s * s) / (2.0 * g * g * g);
}

PhiChain phi_chain_check(const TwoLevelParams& p) {
  if (!(p.eps > 0.0 && p.eps < p.a && p.a <= 1.0)) {
    throw DomainError("phi chain requires 0 < eps < a <= 1 " + describe(p));
  }
  const TwoLevelParams q = checked(p);
  PhiChain out;
  out.phi = phi(q);
  out.x_kernel = q.x * log_mean_kernel(q.a, q.eps);
  out.x_log = q.x * std::log(q.a / q.eps);
  out.ok = out.phi >= out.x_kernel - kChainSlack && out.x_kernel >= out.x_log - kChainSlack;
  return out;
}

} // namespace cebound
