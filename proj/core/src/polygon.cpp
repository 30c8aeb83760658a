#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "cebound/errors.hpp"
#include "cebound/variational.hpp"

namespace cebound {

namespace {

// Angle between two sides l1, l2 > 0 such that |l1 + exp(i psi) l2| = target.
// Half-angle factorisation keeps full precision near both psi = 0 and psi = pi.
double closing_angle(double l1, double l2, double target) {
  const double diff = std::abs(l1 - l2);
  const double sum = l1 + l2;
  const double denom = 4.0 * l1 * l2;
  const double cos2 = std::clamp((target - diff) * (target + diff) / denom, 0.0, 1.0);
  const double sin2 = std::clamp((sum - target) * (sum + target) / denom, 0.0, 1.0);
  return 2.0 * std::atan2(std::sqrt(sin2), std::sqrt(cos2));
}

// Unit phases for lengths[order[from..]] summing to modulus `target`.
// Sides are processed largest first: the rest is recursively closed to the
// modulus rho nearest |l1 - target| within its own feasible interval, then
// rotated rigidly to meet l1 at the law-of-cosines angle.
void solve(const std::vector<double>& lengths, const std::vector<std::size_t>& order, std::size_t from,
           double target, std::vector<Complex>& phases) {
  const std::size_t k = order.size() - from;
  if (k == 0) return;
  phases[order[from]] = 1.0;
  if (k == 1) return;
  const double l1 = lengths[order[from]];
  double rest_sum = 0.0;
  for (std::size_t i = from + 1; i < order.size(); ++i) rest_sum += lengths[order[i]];
  const double rest_max = lengths[order[from + 1]];
  const double rest_lo = std::max(0.0, 2.0 * rest_max - rest_sum);
  const double rho = std::clamp(std::abs(l1 - target), rest_lo, rest_sum);
  solve(lengths, order, from + 1, rho, phases);

  Complex w = 0.0;
  for (std::size_t i = from + 1; i < order.size(); ++i) w += phases[order[i]] * lengths[order[i]];
  const double wm = std::abs(w);
  if (!(l1 > 0.0) || !(wm > 0.0)) return;
  const double psi = closing_angle(l1, wm, target);
  const Complex rot = std::polar(1.0, psi) * std::conj(w) / wm;
  for (std::size_t i = from + 1; i < order.size(); ++i) phases[order[i]] *= rot;
}

} // namespace

std::vector<double> polygon_phases(const std::vector<double>& lengths, double target) {
  for (double l : lengths) {
    if (!std::isfinite(l) || l < 0.0) throw DomainError("polygon lengths must be finite and nonnegative");
  }
  if (!std::isfinite(target)) throw DomainError("polygon target must be finite");
  const double total = std::accumulate(lengths.begin(), lengths.end(), 0.0);
  const double lmax = lengths.empty() ? 0.0 : *std::max_element(lengths.begin(), lengths.end());
  const double lo = std::max(0.0, 2.0 * lmax - total);
  const double slack = 1e-12 * (1.0 + total);
  if (target < lo - slack || target > total + slack) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "polygon target " << target << " outside achievable interval [" << lo << ", " << total << "]";
    throw RangeError(msg.str());
  }
  const double t = std::clamp(target, lo, total);

  std::vector<std::size_t> order(lengths.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return lengths[i] > lengths[j]; });
  std::vector<Complex> phases(lengths.size(), Complex(1.0, 0.0));
  solve(lengths, order, 0, t, phases);

  std::vector<double> theta(lengths.size(), 0.0);
  if (lengths.empty()) return theta;
  const Complex ref = std::conj(phases[0]);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t j = 0; j < lengths.size(); ++j) {
    double a = std::arg(phases[j] * ref);
    if (a < 0.0) a += two_pi;
    if (a >= two_pi) a -= two_pi;
    theta[j] = a;
  }
  theta[0] = 0.0;
  return theta;
}

double polygon_modulus(const std::vector<double>& lengths, const std::vector<double>& theta) {
  if (lengths.size() != theta.size()) throw DomainError("polygon_modulus: size mismatch");
  Complex s = 0.0;
  for (std::size_t j = 0; j < lengths.size(); ++j) s += std::polar(lengths[j], theta[j]);
  return std::abs(s);
}

} // namespace cebound
