#include "cebound/dephasing.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "cebound/bkm.hpp"
#include "cebound/errors.hpp"

namespace cebound {

namespace {

constexpr double kPositiveBlock = 1e-12;
constexpr double kMonotoneSlack = 1e-12;
constexpr double kMinFdStep = 1e-11;

ComplexMatrix orbit_matrix(const BlockState& s, double alpha) {
  return s.pinched_matrix() + alpha * s.coherence_direction();
}

double entropy_at_alpha(const BlockState& s, double alpha) {
  return relative_entropy_psd(orbit_matrix(s, alpha), s.pinched_matrix());
}

// d/d alpha of D(M + alpha Y || M) = Tr[Y (log(M + alpha Y) - log M)].
double entropy_slope(const BlockState& s, double alpha) {
  const ComplexMatrix y = s.coherence_direction();
  if (y.squaredNorm() == 0.0) return 0.0;
  const ComplexMatrix rho = orbit_matrix(s, alpha);
  const SpectralDecomposition er = eigh(rho);
  const double support = kSupportTol * (1.0 + er.eigenvalues.cwiseAbs().maxCoeff());
  if (er.eigenvalues(0) <= support) return std::numeric_limits<double>::infinity();
  const ComplexMatrix log_rho = apply_spectral(er, [](double l) { return std::log(l); });
  const ComplexMatrix log_m = apply_spectral(eigh(s.pinched_matrix()), [](double l) { return std::log(l); });
  return (y * (log_rho - log_m)).trace().real();
}

// min(1e-6, 1e-3/gamma), shortened near the PSD boundary to
// 1e-3 lambda_min(rho_t) / (gamma alpha ||Y||) but not below 1e-11.
double fd_step(const BlockState& s, double gamma, double alpha) {
  const double base = std::min(1e-6, 1e-3 / gamma);
  const SpectralDecomposition ey = eigh(s.coherence_direction());
  const double y_norm = ey.eigenvalues.cwiseAbs().maxCoeff();
  if (y_norm == 0.0) return base;
  const double lmin = lambda_min(orbit_matrix(s, alpha));
  if (!(lmin > 0.0)) return base;
  return std::max(kMinFdStep, std::min(base, 1e-3 * lmin / (gamma * alpha * y_norm)));
}

void check_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("orbit time must be finite and >= 0");
}

} // namespace

void validate_orbit(const OrbitConfig& cfg) {
  if (!(cfg.gamma > 0.0) || !std::isfinite(cfg.gamma)) throw DomainError("orbit: gamma must be positive");
  if (!(cfg.t_max > 0.0) || !std::isfinite(cfg.t_max)) throw DomainError("orbit: t_max must be positive");
  if (cfg.steps < 1) throw DomainError("orbit: steps must be >= 1");
  if (!(lambda_min(cfg.state.a()) > kPositiveBlock)) throw DomainError("orbit: A must be positive definite");
  if (!(lambda_min(cfg.state.c()) > kPositiveBlock)) throw DomainError("orbit: C must be positive definite");
  if (lambda_min(orbit_matrix(cfg.state, -1.0)) < -kPsdTol) throw DomainError("orbit: M - Y must be PSD");
}

DensityMatrix orbit_state(const OrbitConfig& cfg, double t) {
  check_time(t);
  return DensityMatrix(orbit_matrix(cfg.state, std::exp(-cfg.gamma * t)));
}

double orbit_entropy(const OrbitConfig& cfg, double t) {
  check_time(t);
  return entropy_at_alpha(cfg.state, std::exp(-cfg.gamma * t));
}

EntropyProduction entropy_production(const OrbitConfig& cfg, double t) {
  check_time(t);
  const BlockState& s = cfg.state;
  const double g = cfg.gamma;
  const double alpha = std::exp(-g * t);
  EntropyProduction out;
  out.rate = g * alpha * entropy_slope(s, alpha);

  const double h = fd_step(s, g, alpha);
  const double ahead = entropy_at_alpha(s, std::exp(-g * (t + h)));
  const double alpha_back = std::exp(-g * (t - h));
  const bool back_ok = t - h >= 0.0 || lambda_min(orbit_matrix(s, alpha_back)) > 0.0;
  if (back_ok) {
    out.fd_rate = (entropy_at_alpha(s, alpha_back) - ahead) / (2.0 * h);
  } else {
    out.fd_one_sided = true;
    out.fd_rate = (entropy_at_alpha(s, alpha) - ahead) / h;
  }

  const double form = s.b().squaredNorm() == 0.0 ? 0.0 : bkm_form(s.a(), s.c(), s.b());
  out.bound = 2.0 * g * std::exp(-2.0 * g * t) * form;
  out.margin = out.rate - out.bound;
  return out;
}

std::optional<double> log_enhanced_bound(const OrbitConfig& cfg, double t) {
  check_time(t);
  const double a0 = lambda_min(cfg.state.a());
  const double eps_q = cfg.state.c().trace().real();
  if (!(a0 > 0.0) || !(eps_q > 0.0) || eps_q > 0.5 * a0) return std::nullopt;
  const double g = cfg.gamma;
  return 2.0 * g * std::exp(-2.0 * g * t) * cfg.state.b().squaredNorm() * std::log(a0 / eps_q);
}

double rate_tolerance(double rate) { return 1e-6 * (1.0 + std::abs(rate)); }

std::vector<OrbitRow> orbit_trace(const OrbitConfig& cfg) {
  validate_orbit(cfg);
  if (cfg.steps < 2) throw DomainError("orbit_trace: steps must be >= 2");
  std::vector<OrbitRow> rows;
  rows.reserve(static_cast<std::size_t>(cfg.steps) + 1);
  for (int k = 0; k <= cfg.steps; ++k) {
    OrbitRow row;
    row.t = cfg.t_max * static_cast<double>(k) / static_cast<double>(cfg.steps);
    row.entropy = orbit_entropy(cfg, row.t);
    const EntropyProduction ep = entropy_production(cfg, row.t);
    row.rate = ep.rate;
    row.fd_rate = ep.fd_rate;
    row.bkm_bound = ep.bound;
    row.log_bound = log_enhanced_bound(cfg, row.t);
    row.margin = ep.margin;
    rows.push_back(row);
  }
  return rows;
}

std::optional<std::size_t> first_failing_row(const std::vector<OrbitRow>& rows) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const OrbitRow& r = rows[i];
    if (std::isnan(r.margin) || r.margin < -rate_tolerance(r.rate)) return i;
    if (i > 0 && r.entropy > rows[i - 1].entropy + kMonotoneSlack) return i;
  }
  return std::nullopt;
}

void write_orbit_csv(std::ostream& os, const std::vector<OrbitRow>& rows) {
  auto num = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  os << "t,entropy,rate,bkm_bound,log_bound,margin\n";
  for (const OrbitRow& r : rows) {
    os << num(r.t) << ',' << num(r.entropy) << ',' << num(r.rate) << ',' << num(r.bkm_bound) << ','
       << (r.log_bound ? num(*r.log_bound) : std::string()) << ',' << num(r.margin) << '\n';
  }
}

} // namespace cebound
