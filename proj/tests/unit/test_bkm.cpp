#include <doctest.h>

#include <cmath>
#include <numbers>

#include "../support/fixtures.hpp"

using namespace cebound;
using namespace cebound::testing;

namespace {

ComplexMatrix scalar(double v) {
  ComplexMatrix m(1, 1);
  m(0, 0) = v;
  return m;
}

// Frozen from a 40-digit oracle: ln 3 / 0.5 and 0.1875 ln 3 / 0.5.
constexpr double kL075_025 = 2.1972245773362193828;
constexpr double kBkmRhoQ = 0.41197960825054113427;

} // namespace

TEST_CASE("log_mean_kernel: examples") {
  CHECK(log_mean_kernel(0.5, 0.5) == 2.0);
  const double t = 0.1;
  CHECK(log_mean_kernel(std::numbers::e * t, t) == doctest::Approx(1.0 / (t * (std::numbers::e - 1.0))).epsilon(1e-14));
  CHECK(log_mean_kernel(0.75, 0.25) == doctest::Approx(kL075_025).epsilon(1e-15));
  CHECK_THROWS_AS((void)log_mean_kernel(0.0, 1.0), DomainError);
  CHECK_THROWS_AS((void)log_mean_kernel(1.0, -1.0), DomainError);
}

TEST_CASE("log_mean_kernel: symmetry, bounds and near-diagonal series") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-12.0, 0.0);
  for (int i = 0; i < 2000; ++i) {
    const double a = std::pow(10.0, u(rng));
    const double c = std::pow(10.0, u(rng));
    const double l = log_mean_kernel(a, c);
    CHECK(l == log_mean_kernel(c, a));
    const double mean = 1.0 / l;
    CHECK(mean >= std::min(a, c) * (1.0 - 1e-12));
    CHECK(mean <= 0.5 * (a + c) * (1.0 + 1e-12));
    CHECK(l == doctest::Approx(direct_kernel(a, c)).epsilon(1e-12));
  }
  // Series branch against log(1 + d)/(a d) = (1/a)(1 - d/2 + d^2/3 - ...).
  for (double a : {1e-6, 0.3, 1.0}) {
    for (double d : {1e-9, 3e-9, -5e-9, 1e-12}) {
      const double expected = (1.0 - d / 2.0 + d * d / 3.0) / a;
      CHECK(log_mean_kernel(a, a * (1.0 + d)) == doctest::Approx(expected).epsilon(1e-15));
    }
  }
}

TEST_CASE("bkm_apply and bkm_form: examples") {
  std::mt19937_64 rng(2);
  const ComplexMatrix a = random_pd(3, rng, 0.6);
  const ComplexMatrix c = random_pd(2, rng, 0.4);
  CHECK(bkm_apply(a, c, ComplexMatrix::Zero(3, 2)).norm() == 0.0);
  CHECK(bkm_form(a, c, ComplexMatrix::Zero(3, 2)) == 0.0);

  const ComplexMatrix b = ginibre(3, 2, rng);
  const ComplexMatrix out = bkm_apply(0.4 * ComplexMatrix::Identity(3, 3), 0.1 * ComplexMatrix::Identity(2, 2), b);
  CHECK((out - log_mean_kernel(0.4, 0.1) * b).norm() <= 1e-14 * b.norm());

  // Linearity.
  const ComplexMatrix b2 = ginibre(3, 2, rng);
  const Complex z(0.3, -1.2);
  CHECK((bkm_apply(a, c, b + z * b2) - bkm_apply(a, c, b) - z * bkm_apply(a, c, b2)).norm() <= 1e-12 * (1 + b.norm()));

  const BlockState q = rho_q(0.25);
  CHECK(bkm_form(q.a(), q.c(), q.b()) == doctest::Approx(kBkmRhoQ).epsilon(1e-14));

  CHECK_THROWS_AS((void)bkm_form(ComplexMatrix::Zero(3, 3), c, b), PositivityError);
}

TEST_CASE("bkm_form: agrees with the explicit double sum and with quadrature") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const Index dp = 1 + trial % 3, dq = 1 + (trial / 3) % 3;
    const ComplexMatrix a = random_pd(dp, rng, 0.7);
    const ComplexMatrix c = random_pd(dq, rng, 0.3);
    const ComplexMatrix b = 0.1 * ginibre(dp, dq, rng);
    // Explicit sum in a fresh eigenbasis, kernel evaluated in long double.
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> ea(a), ec(c);
    const ComplexMatrix bt = ea.eigenvectors().adjoint() * b * ec.eigenvectors();
    double sum = 0.0;
    for (Index i = 0; i < dp; ++i) {
      for (Index j = 0; j < dq; ++j) sum += std::norm(bt(i, j)) * direct_kernel(ea.eigenvalues()(i), ec.eigenvalues()(j));
    }
    const double form = bkm_form(a, c, b);
    CHECK(form == doctest::Approx(sum).epsilon(1e-10));
    CHECK(std::abs(bkm_quadrature(a, c, b) - form) / form <= 1e-8);
  }
}

TEST_CASE("channel_weights") {
  ComplexMatrix a = ComplexMatrix::Zero(2, 2);
  a(0, 0) = 0.5;
  a(1, 1) = 0.3;
  ComplexMatrix c = ComplexMatrix::Zero(2, 2);
  c(0, 0) = 0.15;
  c(1, 1) = 0.05;
  ComplexMatrix b = ComplexMatrix::Zero(2, 2);
  b(1, 0) = 0.05; // aligned with (a = 0.3, c = 0.15)
  const ChannelWeights w = channel_weights(a, c, b);
  CHECK(w.weights.sum() == doctest::Approx(1.0));
  double peak = 0.0;
  for (Index i = 0; i < 2; ++i) {
    for (Index j = 0; j < 2; ++j) {
      if (w.weights(i, j) > 0.5) {
        CHECK(w.a_eigen(i) == doctest::Approx(0.3));
        CHECK(w.c_eigen(j) == doctest::Approx(0.15));
        peak = w.weights(i, j);
      }
    }
  }
  CHECK(peak == doctest::Approx(1.0).epsilon(1e-14));

  const ChannelWeights zero = channel_weights(a, c, ComplexMatrix::Zero(2, 2));
  CHECK(zero.frob_sq == 0.0);
  CHECK(zero.weights.sum() == 0.0);

  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const ComplexMatrix ra = random_pd(3, rng, 0.8), rc = random_pd(2, rng, 0.2);
    const ComplexMatrix rb = 0.1 * ginibre(3, 2, rng);
    const ChannelWeights cw = channel_weights(ra, rc, rb);
    CHECK(std::abs(cw.weights.sum() - 1.0) <= 1e-10);
    CHECK((cw.weights.array() >= 0.0).all());
    CHECK(std::abs(cw.reconstruct_form() - bkm_form(ra, rc, rb)) <= 1e-10);
    CHECK(cw.frob_sq == doctest::Approx(rb.squaredNorm()));
  }
}

TEST_CASE("bkm_quadrature: examples") {
  const double q = bkm_quadrature(scalar(0.75), scalar(0.25), scalar(std::sqrt(0.1875)), 1e-10);
  CHECK(q == doctest::Approx(kBkmRhoQ).epsilon(1e-10));
  CHECK(bkm_quadrature(scalar(0.75), scalar(0.25), scalar(0.0)) == 0.0);
}

TEST_CASE("bkm_hessian: examples and block identity") {
  std::mt19937_64 rng(5);
  const ComplexMatrix n = random_pd(4, rng);
  CHECK(bkm_hessian(n, ComplexMatrix::Zero(4, 4)) == 0.0);

  const ComplexMatrix y = random_hermitian(4, rng);
  CHECK(bkm_hessian(ComplexMatrix::Identity(4, 4), y) == doctest::Approx(y.squaredNorm()).epsilon(1e-14));

  const BlockState q = rho_q(0.25);
  CHECK(bkm_hessian(q.pinched_matrix(), q.coherence_direction()) == doctest::Approx(2.0 * kBkmRhoQ).epsilon(1e-14));

  for (std::uint64_t i = 0; i < 100; ++i) {
    const BlockState s = random_block_state(1 + i % 4, 1 + (i / 4) % 4, seed_for(50, i));
    const double h = bkm_hessian(s.pinched_matrix(), s.coherence_direction());
    CHECK(std::abs(h - 2.0 * bkm_form(s.a(), s.c(), s.b())) <= 1e-10);
  }

  CHECK_THROWS_AS((void)bkm_hessian(ComplexMatrix::Zero(2, 2), ComplexMatrix::Identity(2, 2)), PositivityError);
}

TEST_CASE("monotone functions: normalization and symmetry") {
  for (MonotoneMetric m : kAllMonotoneMetrics) {
    CHECK(monotone_function(m, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    for (double x : {1e-6, 0.01, 0.3, 0.999999, 1.000001, 2.0, 50.0, 1e5}) {
      CHECK(x * monotone_function(m, 1.0 / x) == doctest::Approx(monotone_function(m, x)).epsilon(1e-10));
    }
  }
  CHECK(to_string(MonotoneMetric::harmonic) == "harmonic");
}

TEST_CASE("petz_form: examples") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 40; ++trial) {
    const Index d = 2 + trial % 4;
    const ComplexMatrix n = random_pd(d, rng);
    const ComplexMatrix y = random_hermitian(d, rng);
    CHECK(std::abs(petz_form(n, y, MonotoneMetric::bkm) - bkm_hessian(n, y)) <= 1e-10 * (1.0 + bkm_hessian(n, y)));
    for (MonotoneMetric m : kAllMonotoneMetrics) {
      CHECK(petz_form(ComplexMatrix::Identity(d, d), y, m) == doctest::Approx(y.squaredNorm()).epsilon(1e-13));
    }
  }
  ComplexMatrix n = ComplexMatrix::Zero(2, 2);
  n(0, 0) = 0.3;
  n(1, 1) = 0.7;
  ComplexMatrix y = ComplexMatrix::Zero(2, 2);
  y(0, 1) = Complex(0.2, 0.1);
  y(1, 0) = std::conj(y(0, 1));
  CHECK(petz_form(n, y, MonotoneMetric::arithmetic) == doctest::Approx(2.0 * std::norm(y(0, 1)) * 2.0 / 1.0).epsilon(1e-14));
}

TEST_CASE("midpoint_margin: examples and hypotheses") {
  const std::vector<double> zero{0.0};
  const BlockState s = random_block_state(2, 2, 7);
  CHECK(midpoint_margin(s, zero).margins[0] == 0.0);

  const ComplexMatrix zb = ComplexMatrix::Zero(2, 2);
  const MidpointResult flat = midpoint_margin(s.a(), s.c(), zb, uniform_grid(0.9, 5));
  for (double m : flat.margins) CHECK(m == 0.0);

  std::vector<double> grid;
  for (int k = 1; k <= 9; ++k) grid.push_back(0.1 * k);
  grid.push_back(0.99);
  const MidpointResult rq = midpoint_margin(rho_q(0.25), grid);
  CHECK(rq.min_margin() >= -1e-9);
  CHECK(rq.max_symmetry_residual <= 1e-9);

  const std::vector<double> bad{1.0};
  CHECK_THROWS_AS((void)midpoint_margin(s, bad), DomainError);
  const std::vector<double> neg{-0.1};
  CHECK_THROWS_AS((void)midpoint_margin(s, neg), DomainError);
  // M + Y not PSD.
  CHECK_THROWS_AS((void)midpoint_margin(s.a(), s.c(), 10.0 * s.b(), grid), DomainError);
}

TEST_CASE("petz_midpoint_margin: tags and the bkm identity") {
  const std::vector<double> grid{0.3, 0.6, 0.9};
  for (std::uint64_t i = 0; i < 60; ++i) {
    const BlockState s = random_block_state(1 + i % 3, 1 + (i / 3) % 3, seed_for(70, i));
    const MidpointResult base = midpoint_margin(s, grid);
    for (MonotoneMetric m : kAllMonotoneMetrics) {
      const MidpointResult r = petz_midpoint_margin(s, grid, m);
      CHECK(r.min_margin() >= -1e-9);
      CHECK(r.max_symmetry_residual <= 1e-9);
      if (m == MonotoneMetric::bkm) {
        for (std::size_t k = 0; k < grid.size(); ++k) CHECK(std::abs(r.margins[k] - base.margins[k]) <= 1e-9);
      }
    }
    CHECK(petz_midpoint_margin(s, std::vector<double>{0.0}, MonotoneMetric::geometric).margins[0] == 0.0);
  }
}

TEST_CASE("scalar midpoint kernel inequality") {
  for (int k = -999; k <= 999; ++k) {
    const double u = k / 1000.0;
    CHECK(1.0 / ((1 + u) * (1 + u)) + 1.0 / ((1 - u) * (1 - u)) >= 2.0);
  }
}

TEST_CASE("uniform_grid") {
  const std::vector<double> g = uniform_grid(0.99, 20);
  CHECK(g.size() == 20);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == doctest::Approx(0.99));
}
