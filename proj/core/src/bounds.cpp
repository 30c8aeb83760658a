#include "cebound/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cebound/bkm.hpp"

namespace cebound {

namespace {

constexpr double kSingularBlock = 1e-12;
constexpr double kRankCutoff = 1e-12;
constexpr double kFidelityClip = 1e-14;

bool has_singular_block(const BlockState& s) {
  return !(lambda_min(s.a()) > kSingularBlock) || !(lambda_min(s.c()) > kSingularBlock);
}

BlockState regularized(const BlockState& s, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("regularization delta must lie in (0, 1)");
  const auto d = static_cast<double>(s.dim());
  ComplexMatrix rho = (1.0 - delta) * s.assemble();
  rho.diagonal().array() += delta / d;
  return block_decompose(DensityMatrix(rho), s.dim_p());
}

// The state the bounds are evaluated on, plus whether it was regularized.
std::pair<BlockState, bool> effective_state(const BlockState& s, const BoundOptions& options) {
  if (s.b().squaredNorm() == 0.0 || !has_singular_block(s)) return {s, false};
  if (!options.regularize) {
    throw PositivityError("operator bound needs A, C > 0; the state has a singular diagonal block "
                          "(enable regularization to evaluate on (1-delta) rho + delta I/d)");
  }
  return {regularized(s, options.delta), true};
}

Index numerical_rank(const ComplexMatrix& b) {
  if (b.size() == 0) return 0;
  Eigen::JacobiSVD<ComplexMatrix> svd(b);
  return (svd.singularValues().array() > kRankCutoff).count();
}

} // namespace

double operator_bound(const BlockState& state, const BoundOptions& options) {
  if (state.b().squaredNorm() == 0.0) return 0.0;
  const auto [s, reg] = effective_state(state, options);
  return bkm_form(s.a(), s.c(), s.b());
}

std::optional<double> log_boundary_bound(const BlockState& state) {
  const double a0 = lambda_min(state.a());
  const double eps_q = state.c().trace().real();
  if (!(a0 > 0.0) || !(eps_q > 0.0) || eps_q > 0.5 * a0) return std::nullopt;
  return state.b().squaredNorm() * std::log(a0 / eps_q);
}

double pinsker_bound(const BlockState& state) {
  const double tn = trace_norm(state.b());
  return 2.0 * tn * tn;
}

double trace_norm_identity_residual(const BlockState& state) {
  return std::abs(trace_norm(state.coherence_direction()) - 2.0 * trace_norm(state.b()));
}

double fidelity(const ComplexMatrix& rho, const ComplexMatrix& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) throw DomainError("fidelity: dimension mismatch");
  const SpectralDecomposition es = eigh(sigma);
  const ComplexMatrix sqrt_sigma = apply_spectral(es, [](double l) { return std::sqrt(std::max(l, 0.0)); });
  const ComplexMatrix inner = sqrt_sigma * rho * sqrt_sigma;
  const SpectralDecomposition ei = eigh(0.5 * (inner + inner.adjoint()));
  // Rounding-level eigenvalues count as zero.
  const double floor = kFidelityClip * std::max(ei.eigenvalues.cwiseAbs().maxCoeff(), 0.0);
  double f = 0.0;
  for (Index i = 0; i < ei.eigenvalues.size(); ++i) {
    if (ei.eigenvalues(i) > floor) f += std::sqrt(ei.eigenvalues(i));
  }
  return f;
}

double fidelity_bound(const BlockState& state) {
  return -2.0 * std::log(fidelity(state.assemble(), state.pinched_matrix()));
}

double BoundReport::min_margin() const {
  double out = std::numeric_limits<double>::infinity();
  for (const auto& [name, value] : margins) out = std::min(out, value);
  return out;
}

BoundReport bound_report(const BlockState& state, const BoundOptions& options) {
  const auto [s, reg] = effective_state(state, options);
  BoundReport r;
  r.regularized = reg;
  r.entropy = coherence_entropy(s);
  r.bkm_bound = operator_bound(s);
  r.log_bound = log_boundary_bound(s);
  r.coarse_applicable = r.log_bound.has_value();
  r.pinsker_bound = pinsker_bound(s);
  r.fidelity_bound = fidelity_bound(s);

  r.params.a0 = lambda_min(s.a());
  r.params.eps_q = s.c().trace().real();
  r.params.frob_sq = s.b().squaredNorm();
  r.params.trace_norm_b = trace_norm(s.b());
  r.params.rank_b = numerical_rank(s.b());

  r.margins["bkm"] = r.entropy - r.bkm_bound;
  r.margins["pinsker"] = r.entropy - r.pinsker_bound;
  r.margins["fidelity"] = r.entropy - r.fidelity_bound;
  if (r.log_bound) {
    r.margins["log"] = r.entropy - *r.log_bound;
    r.margins["bkm_over_log"] = r.bkm_bound - *r.log_bound;
  }

  PinskerDiagnostic& diag = r.pinsker_diagnostic;
  if (r.params.a0 > 0.0 && r.params.eps_q > 0.0) diag.log_ratio = std::log(r.params.a0 / r.params.eps_q);
  if (r.params.frob_sq > 0.0) {
    diag.pinsker_ratio = 2.0 * r.params.trace_norm_b * r.params.trace_norm_b / r.params.frob_sq;
  }
  if (diag.log_ratio && r.params.rank_b > 0) {
    diag.exponential_regime =
        r.params.eps_q <= r.params.a0 * std::exp(-2.0 * static_cast<double>(r.params.rank_b));
  }
  diag.log_dominates = diag.log_ratio && diag.pinsker_ratio && *diag.log_ratio >= *diag.pinsker_ratio;
  return r;
}

BlockState two_level_pure_state(double q) {
  const double coh = std::sqrt(q * (1.0 - q));
  ComplexMatrix a(1, 1), b(1, 1), c(1, 1);
  a(0, 0) = 1.0 - q;
  b(0, 0) = coh;
  c(0, 0) = q;
  return BlockState(a, b, c);
}

SharpnessPoint sharpness_family(double q) {
  if (!(q > 0.0 && q < 0.5)) throw DomainError("sharpness_family: q must lie in (0, 1/2)");
  BlockState state = two_level_pure_state(q);
  const double entropy = coherence_entropy(state);
  const double bkm = bkm_form(state.a(), state.c(), state.b());
  const double scalar = q * (1.0 - q) * std::log((1.0 - q) / q);
  return SharpnessPoint{q, std::move(state), entropy, bkm, entropy / bkm, entropy / scalar};
}

SeparationPoint separation_family(double k, double eps) {
  if (!(k > 1.0)) throw DomainError("separation_family: K must exceed 1");
  if (!(eps > 0.0 && eps < 0.25)) throw DomainError("separation_family: eps must lie in (0, 1/4)");
  const double eta = 1.0 / (k + 1.0);
  const double m = std::pow(eps, 1.0 - eta);
  const double a1 = 1.0 - m - eps;
  if (!(a1 > m)) {
    throw InfeasibleError("separation_family: need a1 = 1 - m - eps > m = eps^(1-eta) (eps too large)");
  }
  ComplexMatrix a = ComplexMatrix::Zero(2, 2);
  a(0, 0) = a1;
  a(1, 1) = m;
  ComplexMatrix b = ComplexMatrix::Zero(2, 1);
  b(0, 0) = std::sqrt(a1 * eps / 2.0);
  ComplexMatrix c(1, 1);
  c(0, 0) = eps;
  BlockState state(a, b, c);
  const double form = bkm_form(state.a(), state.c(), state.b());
  const double scalar = state.b().squaredNorm() * std::log(m / eps);
  return SeparationPoint{k, eps, eta, m, a1, std::move(state), form / scalar};
}

double find_separation_eps(double k) {
  if (!(k > 1.0)) throw DomainError("find_separation_eps: K must exceed 1");
  std::ostringstream table;
  table << "no eps in {1e-2..1e-12} reaches ratio >= " << k << "; scanned:";
  for (int decade = 2; decade <= 12; ++decade) {
    const double eps = std::pow(10.0, -decade);
    try {
      const SeparationPoint p = separation_family(k, eps);
      if (p.ratio >= k) return eps;
      table << " [eps=1e-" << decade << " ratio=" << p.ratio << "]";
    } catch (const InfeasibleError&) {
      table << " [eps=1e-" << decade << " infeasible]";
    }
  }
  throw NotFoundError(table.str());
}

} // namespace cebound
