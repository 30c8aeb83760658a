#include "cebound/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "cebound/errors.hpp"
#include "cebound/random_state.hpp"

namespace cebound {

namespace {

constexpr int kBisectionSteps = 80;
constexpr int kMaxSamplingAttempts = 10000;
constexpr double kCoherenceSlack = 1e-14;
constexpr double kMergeSlack = 1e-12;

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

ComplexMatrix projector(const ComplexMatrix& basis, Index from, Index to) {
  const ComplexMatrix cols = basis.middleCols(from, to - from);
  return cols * cols.adjoint();
}

RealVector compressed_eigenvalues(const ComplexMatrix& m, const ComplexMatrix& basis, Index from) {
  const Index k = basis.cols() - from;
  if (k <= 0) return RealVector(0);
  const ComplexMatrix cols = basis.rightCols(k);
  return eigh(cols.adjoint() * m * cols).eigenvalues;
}

// x clamped to a eps when it exceeds it by at most `slack`.
double clamp_coherence(double a, double eps, double x, double slack) {
  const double cap = a * eps;
  if (x > cap + slack) {
    throw DomainError("coherence x = " + fmt(x) + " exceeds a eps = " + fmt(cap));
  }
  return std::min(x, cap);
}

ComplexMatrix sqrt_psd(const ComplexMatrix& m) {
  return apply_spectral(eigh(m), [](double l) { return std::sqrt(std::max(l, 0.0)); });
}

} // namespace

ComplexMatrix KrausChannel::apply(const ComplexMatrix& rho) const {
  if (rho.rows() != dim_in || rho.cols() != dim_in) throw DomainError("KrausChannel::apply: dimension mismatch");
  ComplexMatrix out = ComplexMatrix::Zero(dim_out, dim_out);
  for (const ComplexMatrix& k : kraus) out.noalias() += k * rho * k.adjoint();
  return out;
}

double KrausChannel::completeness_defect() const {
  ComplexMatrix sum = ComplexMatrix::Zero(dim_in, dim_in);
  for (const ComplexMatrix& k : kraus) sum.noalias() += k.adjoint() * k;
  return (sum - ComplexMatrix::Identity(dim_in, dim_in)).norm();
}

PinchedData svd_pinch(const BlockState& state) {
  const Index dp = state.dim_p();
  const Index dq = state.dim_q();
  const Index d = state.dim();
  Eigen::JacobiSVD<ComplexMatrix> svd(state.b(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  const ComplexMatrix& u = svd.matrixU();
  const ComplexMatrix& v = svd.matrixV();
  const RealVector& sv = svd.singularValues();
  Index rank = 0;
  while (rank < sv.size() && sv(rank) > kSingularValueCutoff) ++rank;

  PinchedData out;
  out.channel.dim_in = d;
  out.channel.dim_out = d;
  for (Index j = 0; j < rank; ++j) {
    PinchedChannel ch;
    ch.a_pin = (u.col(j).adjoint() * state.a() * u.col(j))(0, 0).real();
    ch.c_pin = (v.col(j).adjoint() * state.c() * v.col(j))(0, 0).real();
    ch.s = sv(j);
    out.channels.push_back(ch);
    out.channel.kraus.push_back(direct_sum(projector(u, j, j + 1), projector(v, j, j + 1)));
  }
  if (rank < dp) {
    out.channel.kraus.push_back(direct_sum(projector(u, rank, dp), ComplexMatrix::Zero(dq, dq)));
  }
  if (rank < dq) {
    out.channel.kraus.push_back(direct_sum(ComplexMatrix::Zero(dp, dp), projector(v, rank, dq)));
  }
  out.kernel_a = compressed_eigenvalues(state.a(), u, rank);
  out.kernel_c = compressed_eigenvalues(state.c(), v, rank);

  out.pinched = out.channel.apply(state.assemble());
  const ComplexMatrix reference =
      direct_sum(out.pinched.topLeftCorner(dp, dp), out.pinched.bottomRightCorner(dq, dq));
  out.pinched_entropy = relative_entropy_psd(out.pinched, reference);
  for (const PinchedChannel& ch : out.channels) {
    out.phi_sum += phi({ch.a_pin, ch.c_pin, clamp_coherence(ch.a_pin, ch.c_pin, ch.s * ch.s, kMergeSlack)});
  }
  return out;
}

MergeResult merge_channel(const MergeSpec& spec) {
  const std::size_t n = spec.blocks.size();
  if (n == 0) throw DomainError("merge_channel: at least one block is required");
  if (!(spec.a0 > 0.0)) throw DomainError("merge_channel: floor a0 must be positive");
  if (!(spec.eps_rem >= 0.0)) throw DomainError("merge_channel: eps_rem must be nonnegative");

  std::vector<TwoLevelParams> blocks = spec.blocks;
  double big_a = spec.a0;
  double big_e = spec.eps_rem;
  double big_x = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    TwoLevelParams& b = blocks[j];
    const std::string tag = "merge_channel block " + std::to_string(j) + ": ";
    if (!(b.a >= spec.a0 * (1.0 - kMergeSlack))) {
      throw DomainError(tag + "a_j = " + fmt(b.a) + " is below the floor a0 = " + fmt(spec.a0));
    }
    if (!(b.eps >= 0.0) || !(b.x >= 0.0)) throw DomainError(tag + "eps_j and x_j must be nonnegative");
    if (b.eps == 0.0 && b.x > 0.0) throw DomainError(tag + "eps_j = 0 forces x_j = 0");
    b.x = clamp_coherence(b.a, b.eps, b.x, kCoherenceSlack);
    big_a += b.a - spec.a0;
    big_e += b.eps;
    big_x += b.x;
  }
  if (big_x > big_a * big_e + kMergeSlack) {
    throw DomainError("merge_channel: X = " + fmt(big_x) + " exceeds A E = " + fmt(big_a * big_e));
  }
  big_x = std::min(big_x, big_a * big_e);

  MergeResult res;
  res.merged = {big_a, big_e, big_x};

  // Step 1: weights r_j(t) = (1 - t) sqrt(x_j / X) + t with sum a_j r_j^2 = A.
  std::vector<double> base(n, 0.0);
  if (big_x > 0.0) {
    for (std::size_t j = 0; j < n; ++j) base[j] = std::sqrt(blocks[j].x / big_x);
  }
  auto r_of = [&](double t, std::size_t j) { return std::min(1.0, (1.0 - t) * base[j] + t); };
  auto excess = [&](double t) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += blocks[j].a * r_of(t, j) * r_of(t, j);
    return s - big_a;
  };
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < kBisectionSteps; ++it) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) < 0.0 ? lo : hi) = mid;
  }
  res.t = std::abs(excess(lo)) <= std::abs(excess(hi)) ? lo : hi;
  res.weight_residual = std::abs(excess(res.t));
  res.r.resize(n);
  for (std::size_t j = 0; j < n; ++j) res.r[j] = r_of(res.t, j);

  // Step 2: phases closing sum_j alpha_j sqrt(x_j) onto the real axis at sqrt(X).
  res.alpha.assign(n, Complex(0.0, 0.0));
  if (big_x > 0.0) {
    std::vector<double> lengths(n);
    for (std::size_t j = 0; j < n; ++j) lengths[j] = res.r[j] * std::sqrt(blocks[j].x);
    const std::vector<double> theta = polygon_phases(lengths, std::sqrt(big_x));
    Complex sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) sum += std::polar(lengths[j], theta[j]);
    const double back = std::abs(sum) > 0.0 ? -std::arg(sum) : 0.0;
    for (std::size_t j = 0; j < n; ++j) res.alpha[j] = std::polar(res.r[j], theta[j] + back);
  } else {
    for (std::size_t j = 0; j < n; ++j) res.alpha[j] = res.r[j];
  }

  // Step 3: Kraus operators.
  const Index d_in = static_cast<Index>(2 * n + 1);
  const Index d_out = static_cast<Index>(n + 2);
  const Index p = 0;
  const Index q = 1;
  res.channel.dim_in = d_in;
  res.channel.dim_out = d_out;
  for (std::size_t j = 0; j < n; ++j) {
    const auto pj = static_cast<Index>(2 * j);
    const auto qj = pj + 1;
    ComplexMatrix ka = ComplexMatrix::Zero(d_out, d_in);
    ka(p, pj) = res.alpha[j];
    ka(q, qj) = 1.0;
    res.channel.kraus.push_back(std::move(ka));
    ComplexMatrix ks = ComplexMatrix::Zero(d_out, d_in);
    ks(static_cast<Index>(2 + j), pj) = std::sqrt(std::max(0.0, 1.0 - std::norm(res.alpha[j])));
    res.channel.kraus.push_back(std::move(ks));
  }
  ComplexMatrix krem = ComplexMatrix::Zero(d_out, d_in);
  krem(q, d_in - 1) = 1.0;
  res.channel.kraus.push_back(std::move(krem));

  // Steps 4 and 5 on the explicit matrices.
  res.input = ComplexMatrix::Zero(d_in, d_in);
  ComplexMatrix diag = ComplexMatrix::Zero(d_in, d_in);
  for (std::size_t j = 0; j < n; ++j) {
    const auto pj = static_cast<Index>(2 * j);
    res.input(pj, pj) = diag(pj, pj) = blocks[j].a;
    res.input(pj + 1, pj + 1) = diag(pj + 1, pj + 1) = blocks[j].eps;
    res.input(pj, pj + 1) = res.input(pj + 1, pj) = std::sqrt(blocks[j].x);
  }
  res.input(d_in - 1, d_in - 1) = diag(d_in - 1, d_in - 1) = spec.eps_rem;
  res.output = res.channel.apply(res.input);
  const ComplexMatrix out_diag = res.channel.apply(diag);

  ComplexMatrix target(2, 2);
  target << big_a, std::sqrt(big_x), std::sqrt(big_x), big_e;
  res.active_block_error = (res.output.topLeftCorner(2, 2) - target).cwiseAbs().maxCoeff();
  res.channel_entropy = relative_entropy_psd(res.output, out_diag);
  for (const TwoLevelParams& b : blocks) res.left_entropy += phi(b);
  res.right_entropy = phi(res.merged);
  return res;
}

double VariationalParams::a_star() const { return 1.0 - eps - static_cast<double>(dim_p - 1) * a0; }

void require_feasible(const VariationalParams& p) {
  if (p.dim_p < 1 || p.dim_q < 1) throw InfeasibleError("dimensions must satisfy d_P, d_Q >= 1");
  if (!std::isfinite(p.a0) || !std::isfinite(p.eps) || !std::isfinite(p.c)) {
    throw InfeasibleError("a0, eps and c must be finite");
  }
  if (p.a0 < 0.0) throw InfeasibleError("floor a0 must be >= 0");
  if (p.eps < 0.0 || p.eps > 1.0) throw InfeasibleError("leakage eps must lie in [0, 1]");
  if (p.c < 0.0) throw InfeasibleError("coherence c must be >= 0");
  if (1.0 - p.eps < static_cast<double>(p.dim_p) * p.a0) {
    throw InfeasibleError("floor constraint violated: 1 - eps = " + fmt(1.0 - p.eps) + " < d_P a0 = " +
                          fmt(static_cast<double>(p.dim_p) * p.a0));
  }
  const double cap = p.a_star() * p.eps;
  if (p.c > cap + kCoherenceSlack) {
    throw InfeasibleError("coherence constraint violated: c = " + fmt(p.c) + " > a* eps = " + fmt(cap));
  }
}

namespace {

BlockState active_state(const VariationalParams& p, Complex coherence) {
  const double a_star = p.a_star();
  ComplexMatrix a = ComplexMatrix::Zero(p.dim_p, p.dim_p);
  a(0, 0) = a_star;
  for (Index k = 1; k < p.dim_p; ++k) a(k, k) = p.a0;
  ComplexMatrix b = ComplexMatrix::Zero(p.dim_p, p.dim_q);
  b(0, 0) = coherence;
  ComplexMatrix c = ComplexMatrix::Zero(p.dim_q, p.dim_q);
  c(0, 0) = p.eps;
  return BlockState(a, b, c);
}

double bound_value(const VariationalParams& p) {
  const double a_star = p.a_star();
  return phi({a_star, p.eps, std::min(p.c, a_star * p.eps)});
}

} // namespace

OptimizerResult optimizer(const VariationalParams& p) {
  require_feasible(p);
  const double c = std::min(p.c, p.a_star() * p.eps);
  BlockState state = active_state(p, std::sqrt(c));
  const double entropy = coherence_entropy(state);
  return OptimizerResult{std::move(state), bound_value(p), entropy, p.a_star()};
}

BlockState equality_state(const VariationalParams& p, double phase, std::optional<std::uint64_t> rotation_seed) {
  require_feasible(p);
  const double c = std::min(p.c, p.a_star() * p.eps);
  BlockState base = active_state(p, std::polar(std::sqrt(c), phase));
  if (!rotation_seed) return base;
  std::mt19937_64 rng(*rotation_seed);
  const ComplexMatrix up = random_unitary(p.dim_p, rng);
  const ComplexMatrix uq = random_unitary(p.dim_q, rng);
  ComplexMatrix a = up * base.a() * up.adjoint();
  ComplexMatrix c_block = uq * base.c() * uq.adjoint();
  a = 0.5 * (a + a.adjoint()).eval();
  c_block = 0.5 * (c_block + c_block.adjoint()).eval();
  return BlockState(a, up * base.b() * uq.adjoint(), c_block);
}

BlockState sample_feasible_state(const VariationalParams& p, std::mt19937_64& rng) {
  require_feasible(p);
  const double slack = 1.0 - p.eps - static_cast<double>(p.dim_p) * p.a0;
  for (int attempt = 0; attempt < kMaxSamplingAttempts; ++attempt) {
    ComplexMatrix a = slack * random_density(p.dim_p, rng);
    a.diagonal().array() += p.a0;
    const ComplexMatrix c = p.eps * random_density(p.dim_q, rng);
    if (p.c == 0.0) return BlockState(a, ComplexMatrix::Zero(p.dim_p, p.dim_q), c);

    // Haar partial isometry: all singular values one.
    const ComplexMatrix up = random_unitary(p.dim_p, rng);
    const ComplexMatrix uq = random_unitary(p.dim_q, rng);
    const ComplexMatrix k = up * ComplexMatrix::Identity(p.dim_p, p.dim_q) * uq.adjoint();
    const ComplexMatrix b_max = sqrt_psd(a) * k * sqrt_psd(c);
    const double frob_sq = b_max.squaredNorm();
    if (!(frob_sq > 0.0)) continue;
    const double scale = std::sqrt(p.c / frob_sq);
    if (scale > 1.0) continue;
    try {
      return BlockState(a, scale * b_max, c);
    } catch (const ValidationError&) {
      continue;
    }
  }
  throw SamplingError("no feasible state found after " + std::to_string(kMaxSamplingAttempts) + " attempts");
}

VariationalCheck variational_check(const VariationalParams& p, int trials, std::uint64_t seed) {
  if (trials < 0) throw DomainError("variational_check: trials must be >= 0");
  const OptimizerResult opt = optimizer(p);
  VariationalCheck out;
  out.trials = trials;
  out.bound = opt.value;
  out.optimizer_gap = std::abs(opt.entropy - opt.value);
  out.min_sampled = std::numeric_limits<double>::infinity();
  for (int i = 0; i < trials; ++i) {
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    const BlockState s = sample_feasible_state(p, rng);
    out.min_sampled = std::min(out.min_sampled, coherence_entropy(s));
  }
  out.min_found = std::min(opt.entropy, out.min_sampled);
  out.gap = out.min_found - out.bound;
  return out;
}

double PipelineChain::min_step() const {
  return std::min({entropy - pinched_sum, pinched_sum - merged, merged - variational, variational});
}

PipelineChain pipeline_chain(const BlockState& state, std::optional<double> floor) {
  const double lmin = lambda_min(state.a());
  const double a0 = floor.value_or(lmin);
  if (!(a0 > 0.0)) throw DomainError("pipeline_chain: needs a positive floor a0 (lambda_min(A) = " + fmt(lmin) + ")");
  if (a0 > lmin + kMergeSlack) {
    throw DomainError("pipeline_chain: floor " + fmt(a0) + " exceeds lambda_min(A) = " + fmt(lmin));
  }
  PipelineChain out;
  out.a0 = a0;
  out.entropy = coherence_entropy(state);

  const PinchedData pin = svd_pinch(state);
  out.pinched_sum = pin.phi_sum;
  out.decomposition_residual = std::abs(pin.pinched_entropy - pin.phi_sum);

  MergeSpec spec;
  spec.a0 = a0;
  for (const PinchedChannel& ch : pin.channels) {
    spec.blocks.push_back({ch.a_pin, ch.c_pin, std::min(ch.s * ch.s, ch.a_pin * ch.c_pin)});
  }
  for (Index i = 0; i < pin.kernel_a.size(); ++i) spec.blocks.push_back({pin.kernel_a(i), 0.0, 0.0});
  spec.eps_rem = std::max(0.0, pin.kernel_c.sum());
  const MergeResult merged = merge_channel(spec);
  out.merged = merged.right_entropy;
  out.completeness = std::max(pin.channel.completeness_defect(), merged.channel.completeness_defect());

  out.eps = state.c().trace().real();
  out.c = state.b().squaredNorm();
  out.a_star = 1.0 - out.eps - static_cast<double>(state.dim_p() - 1) * a0;
  out.variational = phi({out.a_star, out.eps, std::min(out.c, out.a_star * out.eps)});
  return out;
}

std::vector<ModulusRow> modulus_curve(double a_star, double tau, const std::vector<double>& eps_grid) {
  if (!(a_star > 0.0 && a_star <= 1.0)) throw DomainError("modulus_curve: a* must lie in (0, 1]");
  if (!(tau > 0.0 && tau <= 1.0)) throw DomainError("modulus_curve: tau must lie in (0, 1]");
  std::vector<ModulusRow> rows;
  rows.reserve(eps_grid.size());
  for (double eps : eps_grid) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw DomainError("modulus_curve: every eps_q must be positive");
    ModulusRow row;
    row.eps_q = eps;
    const double c = tau * a_star * eps;
    row.phi = phi({a_star, eps, c});
    row.phi_per_coherence = row.phi / c;
    const double log_ratio = std::log(a_star / eps);
    if (log_ratio > 0.0) {
      row.scaling_ratio = row.phi / (tau * eps * log_ratio);
      row.cost_ratio = row.phi_per_coherence * a_star / log_ratio;
    }
    rows.push_back(row);
  }
  return rows;
}

} // namespace cebound
