#include <doctest.h>

#include <cmath>
#include <sstream>

#include "../support/fixtures.hpp"

using namespace cebound;
using namespace cebound::testing;

namespace {

BlockState two_level(double a, double eps, double x) {
  ComplexMatrix m(2, 2);
  m << a, std::sqrt(x), std::sqrt(x), eps;
  return block_decompose(DensityMatrix(m), 1);
}

// -d/dt Phi(a, eps, exp(-2 g t) x) from a central difference of the closed-form eigenvalues.
double two_level_rate(double a, double eps, double x, double g, double t) {
  const double h = 1e-5;
  auto d = [&](double s) { return phi_oracle(a, eps, std::exp(-2.0 * g * s) * x); };
  return (d(t - h) - d(t + h)) / (2.0 * h);
}

// -d/dt D(rho_t || M) through the Schur-Parlett logarithm.
double matrix_rate(const BlockState& s, double g, double t) {
  const double h = 1e-5;
  const ComplexMatrix m = s.pinched_matrix();
  const ComplexMatrix y = s.coherence_direction();
  auto d = [&](double u) { return relative_entropy_oracle(m + std::exp(-g * u) * y, m); };
  return (d(t - h) - d(t + h)) / (2.0 * h);
}

} // namespace

TEST_CASE("validate_orbit") {
  const BlockState s = random_block_state(2, 2, 1);
  CHECK_NOTHROW(validate_orbit({s, 1.0, 1.0, 10}));
  CHECK_THROWS_AS(validate_orbit({s, 0.0, 1.0, 10}), DomainError);
  CHECK_THROWS_AS(validate_orbit({s, 1.0, -1.0, 10}), DomainError);
  CHECK_THROWS_AS(validate_orbit({s, 1.0, 1.0, 0}), DomainError);
  ComplexMatrix a = ComplexMatrix::Zero(2, 2), b = ComplexMatrix::Zero(2, 1), c(1, 1);
  a(0, 0) = 0.6;
  c(0, 0) = 0.4;
  CHECK_THROWS_AS(validate_orbit({BlockState(a, b, c), 1.0, 1.0, 10}), DomainError);
  CHECK_THROWS_AS((void)orbit_trace({s, 1.0, 1.0, 1}), DomainError);
  CHECK_THROWS_AS((void)orbit_entropy({s, 1.0, 1.0, 10}, -0.5), DomainError);
}

TEST_CASE("orbit_state and orbit_entropy") {
  const BlockState s = random_block_state(2, 3, 2);
  const OrbitConfig cfg{s, 2.0, 1.0, 10};
  CHECK((orbit_state(cfg, 0.0).matrix() - s.assemble()).norm() <= 1e-15);
  CHECK(orbit_entropy(cfg, 0.0) == doctest::Approx(coherence_entropy(s)).epsilon(1e-12));
  const ComplexMatrix late = orbit_state(cfg, 50.0).matrix();
  CHECK((late - s.pinched_matrix()).norm() <= 1e-12);
  CHECK(orbit_entropy(cfg, 50.0) <= 1e-12);
  // Two-level orbit: the coherence decays as exp(-2 gamma t) in x.
  const BlockState q = two_level(0.7, 0.3, 0.1);
  const OrbitConfig qc{q, 1.5, 1.0, 10};
  for (double t : {0.0, 0.2, 1.0}) {
    CHECK(orbit_entropy(qc, t) == doctest::Approx(phi_oracle(0.7, 0.3, 0.1 * std::exp(-3.0 * t))).epsilon(1e-11));
  }
}

TEST_CASE("entropy_production: two-level and matrix oracles") {
  const BlockState q = two_level(0.7, 0.3, 0.1);
  for (double g : {0.5, 1.0, 3.0}) {
    const OrbitConfig cfg{q, g, 1.0, 10};
    for (double t : {0.0, 0.3, 1.0}) {
      const EntropyProduction ep = entropy_production(cfg, t);
      const double oracle = two_level_rate(0.7, 0.3, 0.1, g, t);
      CHECK(std::abs(ep.rate - oracle) <= 1e-8 * (1.0 + std::abs(oracle)));
      CHECK(std::abs(ep.fd_rate - ep.rate) <= rate_tolerance(ep.rate));
      // BKM bound for a scalar coherence: 2 g exp(-2 g t) x L(a, eps).
      CHECK(ep.bound == doctest::Approx(2.0 * g * std::exp(-2.0 * g * t) * 0.1 * direct_kernel(0.7, 0.3)).epsilon(1e-13));
      CHECK(ep.margin >= -rate_tolerance(ep.rate));
    }
  }

  for (std::uint64_t i = 0; i < 40; ++i) {
    const BlockState s = random_block_state(1 + i % 3, 1 + (i / 3) % 3, seed_for(3, i));
    const OrbitConfig cfg{s, 1.0, 1.0, 10};
    for (double t : {0.1, 0.5}) {
      const EntropyProduction ep = entropy_production(cfg, t);
      const double oracle = matrix_rate(s, 1.0, t);
      CHECK(std::abs(ep.rate - oracle) <= 1e-7 * (1.0 + std::abs(oracle)));
      CHECK(ep.margin >= -rate_tolerance(ep.rate));
      CHECK(ep.bound == doctest::Approx(2.0 * std::exp(-2.0 * t) * operator_bound(s)).epsilon(1e-12));
    }
  }
}

TEST_CASE("entropy_production: singular start and one-sided difference") {
  const OrbitConfig pure{rho_q(0.25), 1.0, 1.0, 10};
  const EntropyProduction ep = entropy_production(pure, 0.0);
  CHECK(std::isinf(ep.rate));
  CHECK(ep.fd_one_sided);
  CHECK(std::isfinite(ep.fd_rate));
  CHECK(ep.fd_rate > 0.0);
  const EntropyProduction later = entropy_production(pure, 0.5);
  CHECK(std::isfinite(later.rate));
  CHECK_FALSE(later.fd_one_sided);

  const OrbitConfig mixed{two_level(0.7, 0.3, 0.1), 1.0, 1.0, 10};
  CHECK_FALSE(entropy_production(mixed, 0.0).fd_one_sided);
  CHECK(rate_tolerance(0.0) == 1e-6);
  CHECK(rate_tolerance(-3.0) == doctest::Approx(4e-6));
}

TEST_CASE("log_enhanced_bound") {
  ComplexMatrix a = ComplexMatrix::Zero(2, 2), b = ComplexMatrix::Zero(2, 1), c(1, 1);
  a(0, 0) = 0.45;
  a(1, 1) = 0.5;
  b(0, 0) = 0.1;
  c(0, 0) = 0.05;
  const OrbitConfig cfg{BlockState(a, b, c), 2.0, 1.0, 10};
  const auto lb = log_enhanced_bound(cfg, 0.25);
  REQUIRE(lb.has_value());
  CHECK(*lb == doctest::Approx(4.0 * std::exp(-1.0) * 0.01 * std::log(9.0)).epsilon(1e-14));
  CHECK(*lb <= entropy_production(cfg, 0.25).bound + 1e-12);
  CHECK_FALSE(log_enhanced_bound({rho_q(0.45), 1.0, 1.0, 10}, 0.0).has_value());
}

TEST_CASE("orbit_trace, first_failing_row and CSV") {
  const BlockState s = random_block_state(2, 2, 5, BoundaryEnsemble{0.3, 0.02});
  const OrbitConfig cfg{s, 1.0, 2.0, 20};
  const std::vector<OrbitRow> rows = orbit_trace(cfg);
  REQUIRE(rows.size() == 21);
  CHECK(rows.front().t == 0.0);
  CHECK(rows.back().t == 2.0);
  CHECK_FALSE(first_failing_row(rows).has_value());
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].entropy <= rows[i - 1].entropy + 1e-12);
  for (const OrbitRow& r : rows) {
    REQUIRE(r.log_bound.has_value());
    CHECK(*r.log_bound <= r.bkm_bound + 1e-12);
  }

  std::vector<OrbitRow> bad = rows;
  bad[3].margin = -1.0;
  CHECK(first_failing_row(bad) == std::optional<std::size_t>(3));
  bad = rows;
  bad[5].entropy = bad[4].entropy + 1e-6;
  CHECK(first_failing_row(bad) == std::optional<std::size_t>(5));

  std::ostringstream os;
  write_orbit_csv(os, {OrbitRow{0.5, 0.1, 0.2, 0.2, 0.15, std::nullopt, 0.05}});
  CHECK(os.str() == "t,entropy,rate,bkm_bound,log_bound,margin\n0.5,0.10000000000000001,0.20000000000000001,"
                    "0.14999999999999999,,0.050000000000000003\n");
}
