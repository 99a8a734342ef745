#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "test_support.hpp"
#include "veflow/symmat.hpp"

using namespace veflow;
using testsupport::make_rng;
using testsupport::random_spd;
using testsupport::random_symmetric;

namespace {

// Independent oracle: eigenvalues as roots of det(m - s I) = 0 via the
// quadratic formula on the characteristic polynomial.
std::pair<double, double> char_poly_roots(const SymMat2& m) {
  const double b = -(m.a11 + m.a22);
  const double c = m.a11 * m.a22 - m.a12 * m.a12;
  const double disc = std::sqrt(std::max(0.0, b * b - 4.0 * c));
  const double r1 = (-b + disc) / 2.0;
  const double r2 = (-b - disc) / 2.0;
  return {std::max(r1, r2), std::min(r1, r2)};
}

}  // namespace

TEST_CASE("eig_sym2 basics") {
  auto d = eig_sym2(SymMat2::identity());
  CHECK(d.eig1 == 1.0);
  CHECK(d.eig2 == 1.0);

  d = eig_sym2(SymMat2::diag(3.0, 1.0));
  CHECK(d.eig1 == 3.0);
  CHECK(d.eig2 == 1.0);
  CHECK(d.cos_t == 1.0);
  CHECK(d.sin_t == 0.0);
}

TEST_CASE("eig_sym2 matches characteristic polynomial on random input") {
  auto rng = make_rng(101);
  for (int trial = 0; trial < 2000; ++trial) {
    const SymMat2 m = random_symmetric(rng);
    const auto d = eig_sym2(m);
    const auto [r1, r2] = char_poly_roots(m);
    CHECK(std::abs(d.eig1 - r1) < 1e-12 * std::max(1.0, std::abs(r1)));
    CHECK(std::abs(d.eig2 - r2) < 1e-12 * std::max(1.0, std::abs(r2)));
    // Orthonormality and reconstruction.
    CHECK(std::abs(d.cos_t * d.cos_t + d.sin_t * d.sin_t - 1.0) < 1e-12);
    const SymMat2 r = d.reconstruct();
    const double scale = std::max(1.0, frobenius_norm(m));
    CHECK(frobenius_norm(r - m) < 1e-12 * scale);
  }
}

TEST_CASE("matfun_apply closed forms") {
  const SymMat2 zero = matfun_apply(SymMat2::identity(),
                                    [](double s) { return std::log(s); });
  CHECK(frobenius_norm(zero) < 1e-15);

  const SymMat2 root = matfun_apply(SymMat2::diag(4.0, 1.0),
                                    [](double s) { return std::sqrt(s); });
  CHECK(root.a11 == 2.0);
  CHECK(root.a22 == 1.0);
  CHECK(root.a12 == 0.0);
}

TEST_CASE("matfun_apply inverse multiplies back to identity") {
  auto rng = make_rng(102);
  for (int trial = 0; trial < 1000; ++trial) {
    const SymMat2 m = random_spd(rng);
    const SymMat2 inv = inv_sym(m);
    const Eigen::Matrix2d prod = inv.matrix() * m.matrix();
    CHECK((prod - Eigen::Matrix2d::Identity()).norm() < 1e-12);
  }
}

TEST_CASE("matfun_apply identity function is a projection") {
  auto rng = make_rng(103);
  const SymMat2 diag = SymMat2::diag(2.5, -0.5);
  const SymMat2 same = matfun_apply(diag, [](double s) { return s; });
  CHECK(same.a11 == diag.a11);
  CHECK(same.a12 == diag.a12);
  CHECK(same.a22 == diag.a22);
  for (int trial = 0; trial < 500; ++trial) {
    const SymMat2 m = random_symmetric(rng);
    const SymMat2 r = matfun_apply(m, [](double s) { return s; });
    CHECK(frobenius_norm(r - m) < 1e-12 * std::max(1.0, frobenius_norm(m)));
  }
}

TEST_CASE("matfun_apply raises DomainError for log of indefinite input") {
  CHECK_THROWS_AS(log_sym(SymMat2::diag(-1.0, 2.0)), DomainError);
}

TEST_CASE("regularized_log_pair branch values") {
  // Continuity point s = delta.
  auto p = regularized_log_pair(0.1, 0.1);
  CHECK(p.g == doctest::Approx(std::log(0.1)).epsilon(1e-14));
  CHECK(p.beta == 0.1);

  // s >= delta branch.
  p = regularized_log_pair(1.0, 0.5);
  CHECK(p.g == 0.0);
  CHECK(p.beta == 1.0);

  // s < delta branch.
  p = regularized_log_pair(-2.0, 0.5);
  CHECK(p.g == doctest::Approx(-4.0 + std::log(0.5) - 1.0).epsilon(1e-14));
  CHECK(p.beta == 0.5);

  CHECK_THROWS_AS(regularized_log_pair(1.0, 0.0), InvalidDelta);
  CHECK_THROWS_AS(regularized_log_pair(1.0, 1.0), InvalidDelta);
  CHECK_THROWS_AS(regularized_log_pair(1.0, -0.3), InvalidDelta);
}

TEST_CASE("elastic energy density") {
  CHECK(elastic_energy_density(SymMat2::identity(), 1.0) == 0.0);

  const double e = std::exp(1.0);
  CHECK(elastic_energy_density(SymMat2::diag(e, 1.0), 2.0) ==
        doctest::Approx(e - 2.0).epsilon(1e-14));

  CHECK_THROWS_AS(elastic_energy_density(SymMat2::diag(-1.0, 2.0), 1.0),
                  NotPositiveDefinite);

  // Regularized value against the scalar-spectrum brute evaluation.
  const SymMat2 b = SymMat2::diag(-1.0, 2.0);
  const double delta = 0.5;
  const double brute =
      0.5 * (b.trace() - g_delta_scalar(-1.0, delta) -
             g_delta_scalar(2.0, delta) - 2.0);
  CHECK(elastic_energy_density(b, 1.0, delta) ==
        doctest::Approx(brute).epsilon(1e-14));

  // Random spot check of the regularized formula through the spectrum.
  auto rng = make_rng(104);
  for (int trial = 0; trial < 500; ++trial) {
    const SymMat2 m = random_symmetric(rng);
    const auto d = eig_sym2(m);
    const double expected =
        0.5 * 2.0 *
        ((d.eig1 - g_delta_scalar(d.eig1, 0.1) - 1.0) +
         (d.eig2 - g_delta_scalar(d.eig2, 0.1) - 1.0));
    CHECK(elastic_energy_density(m, 2.0, 0.1) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("relaxation trace") {
  CHECK(relaxation_trace(SymMat2::identity()) == 0.0);
  CHECK(relaxation_trace(SymMat2::diag(4.0, 1.0)) ==
        doctest::Approx(2.25).epsilon(1e-14));
  CHECK_THROWS_AS(relaxation_trace(SymMat2::diag(0.0, 1.0)),
                  NotPositiveDefinite);

  // Frobenius-norm oracle: tr(B + B^-1 - 2I) = |B^(1/2) - B^(-1/2)|^2.
  auto rng = make_rng(105);
  for (int trial = 0; trial < 1000; ++trial) {
    const SymMat2 m = random_symmetric(rng);
    const double delta = 0.1;
    const SymMat2 beta = beta_delta(m, delta);
    const SymMat2 diff =
        matfun_apply(beta, [](double s) { return std::sqrt(s); }) -
        matfun_apply(beta, [](double s) { return 1.0 / std::sqrt(s); });
    const double oracle = ddot(diff, diff);
    const double got = relaxation_trace(m, delta);
    CHECK(got == doctest::Approx(oracle).epsilon(1e-11));
    CHECK(got >= 0.0);
  }
}

TEST_CASE("regularization lemma inequalities on random symmetric matrices") {
  auto rng = make_rng(106);
  const double slack = 1e-12;
  for (double delta : {0.5, 0.1, 0.01}) {
    for (int trial = 0; trial < 2000; ++trial) {
      const SymMat2 b = random_symmetric(rng, 3.0);
      const SymMat2 g = random_symmetric(rng, 3.0);
      const SymMat2 beta = beta_delta(b, delta);
      const SymMat2 gprime = g_delta_prime(b, delta);
      const SymMat2 eye = SymMat2::identity();

      // tr(beta + beta^-1 - 2I) >= 0
      CHECK(relaxation_trace(b, delta) >= -slack);
      // (b - beta) : (I - g') >= 0
      CHECK(ddot(b - beta, eye - gprime) >= -slack);
      // (g - b) : g'(b) >= tr(g_d(g) - g_d(b))
      CHECK(ddot(g - b, gprime) -
                (g_delta(g, delta).trace() - g_delta(b, delta).trace()) >=
            -slack);
      if (delta <= 0.5) {
        // tr(b - g_d(b)) >= |b|/2 and >= |[b]_-| / (2 delta)
        const double lhs = (b - g_delta(b, delta)).trace();
        CHECK(lhs - 0.5 * frobenius_norm(b) >= -slack);
        CHECK(lhs - frobenius_norm(negative_part(b)) / (2.0 * delta) >=
              -slack);
        // b : (I - g'(b)) >= |b|/2 - d
        CHECK(ddot(b, eye - gprime) - (0.5 * frobenius_norm(b) - 2.0) >=
              -slack);
      }
    }
  }
}

TEST_CASE("beta_delta and g_delta converge monotonically as delta -> 0") {
  auto rng = make_rng(107);
  for (int trial = 0; trial < 200; ++trial) {
    const SymMat2 b = random_spd(rng, 0.2, 4.0);
    const SymMat2 logb = log_sym(b);
    double prev_beta_err = std::numeric_limits<double>::infinity();
    double prev_g_err = std::numeric_limits<double>::infinity();
    for (double delta : {1e-1, 1e-2, 1e-3}) {
      const double beta_err = frobenius_norm(beta_delta(b, delta) - b);
      const double g_err = frobenius_norm(g_delta(b, delta) - logb);
      CHECK(beta_err <= prev_beta_err + 1e-15);
      CHECK(g_err <= prev_g_err + 1e-15);
      prev_beta_err = beta_err;
      prev_g_err = g_err;
    }
    // Once delta is below the smallest eigenvalue both regularizations agree
    // with the unregularized functions up to the spectral round trip.
    const double eig_min = min_eigenvalue(b);
    if (eig_min > 1e-1) {
      CHECK(frobenius_norm(beta_delta(b, 1e-1) - b) < 1e-14);
      CHECK(frobenius_norm(g_delta(b, 1e-1) - logb) < 1e-13);
    }
  }
}
