#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "test_support.hpp"
#include "veflow/lambda.hpp"

using namespace veflow;
using testsupport::make_rng;
using testsupport::random_spd;
using testsupport::random_symmetric;
using testsupport::random_triangle;

namespace {

RefMapping mapping_of(const std::array<Eigen::Vector2d, 3>& p) {
  return RefMapping::from_vertices(p[0], p[1], p[2]);
}

RefMapping identity_mapping() {
  return RefMapping::from_vertices({0, 0}, {1, 0}, {0, 1});
}

}  // namespace

TEST_CASE("lambda_hat equal branch") {
  auto rng = make_rng(301);
  for (int trial = 0; trial < 100; ++trial) {
    const SymMat2 m = random_spd(rng);
    const SymMat2 hat = lambda_hat(m, m);
    CHECK(frobenius_norm(hat - m) == 0.0);
    CHECK(lambda_coefficient(m, m) == 0.0);
  }
}

TEST_CASE("lambda_hat scalar reduction for multiples of the identity") {
  // For b0 = I, bi = 2I the formula reduces to the one-dimensional secant of
  // -ln between 2 and 1.
  const SymMat2 b0 = SymMat2::identity();
  const SymMat2 bi = SymMat2::diag(2.0, 2.0);
  // 1D reduction per eigenvalue s_i = 2, s_0 = 1:
  // lambda = [tr ln bi^-1 - tr ln b0^-1 + bi : (b0^-1 - bi^-1)] /
  //          [(bi - b0) : (b0^-1 - bi^-1)]
  const double numer = (-2.0 * std::log(2.0)) - 0.0 + 2.0 * (1.0 - 0.5) * 2.0;
  const double denom = (2.0 - 1.0) * (1.0 - 0.5) * 2.0;
  const double lam = numer / denom;
  CHECK(lambda_coefficient(b0, bi) == doctest::Approx(lam).epsilon(1e-14));
  const SymMat2 hat = lambda_hat(b0, bi);
  CHECK(hat.a12 == 0.0);
  CHECK(hat.a11 == doctest::Approx(2.0 + lam * (1.0 - 2.0)).epsilon(1e-14));
  CHECK(hat.a11 == doctest::Approx(hat.a22).epsilon(1e-15));
}

TEST_CASE("lambda_hat regularized path accepts indefinite input") {
  const SymMat2 b0 = SymMat2::diag(-1.0, 1.0);
  const SymMat2 bi = SymMat2::identity();
  const double delta = 0.5;
  const SymMat2 hat = lambda_hat(b0, bi, delta);
  CHECK(std::isfinite(hat.a11));
  CHECK(std::isfinite(hat.a12));
  CHECK(std::isfinite(hat.a22));
  // Direct regularized-formula oracle with beta values diag(0.5, 1) and I.
  const SymMat2 beta0 = SymMat2::diag(0.5, 1.0);
  const SymMat2 betai = SymMat2::identity();
  const SymMat2 dinv = inv_sym(beta0) - inv_sym(betai);
  const double numer =
      (-trace_log(betai)) - (-trace_log(beta0)) + ddot(betai, dinv);
  const double denom = ddot(betai - beta0, dinv);
  const double lam = numer / denom;
  const SymMat2 oracle = betai + lam * (beta0 - betai);
  CHECK(frobenius_norm(hat - oracle) < 1e-13);

  CHECK_THROWS_AS(lambda_hat(b0, bi), NotPositiveDefinite);
}

TEST_CASE("lambda coefficient lies in [0,1] on random input") {
  auto rng = make_rng(302);
  for (int trial = 0; trial < 10000; ++trial) {
    const double lam = lambda_coefficient(random_spd(rng), random_spd(rng));
    CHECK(lam >= -1e-12);
    CHECK(lam <= 1.0 + 1e-12);
  }
  for (int trial = 0; trial < 10000; ++trial) {
    const double lam = lambda_coefficient(random_symmetric(rng),
                                          random_symmetric(rng), 0.1);
    CHECK(lam >= -1e-12);
    CHECK(lam <= 1.0 + 1e-12);
  }
}

TEST_CASE("assemble_lambda constant field collapses to delta_ij B") {
  auto rng = make_rng(303);
  for (int trial = 0; trial < 200; ++trial) {
    const SymMat2 b = random_spd(rng);
    const RefMapping map = mapping_of(random_triangle(rng));
    const LambdaElement lam = assemble_lambda({b, b, b}, map);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const SymMat2 expected = (i == j) ? b : SymMat2::zero();
        CHECK(frobenius_norm(lam(i, j) - expected) <
              1e-12 * std::max(1.0, frobenius_norm(b)));
      }
  }
}

TEST_CASE("assemble_lambda identity mapping reduction") {
  auto rng = make_rng(304);
  const std::array<SymMat2, 3> nodal = {random_spd(rng), random_spd(rng),
                                        random_spd(rng)};
  const LambdaElement lam = assemble_lambda(nodal, identity_mapping());
  const SymMat2 hat1 = lambda_hat(nodal[0], nodal[1]);
  const SymMat2 hat2 = lambda_hat(nodal[0], nodal[2]);
  CHECK(frobenius_norm(lam(0, 0) - hat1) < 1e-13);
  CHECK(frobenius_norm(lam(1, 1) - hat2) < 1e-13);
  CHECK(frobenius_norm(lam(0, 1)) < 1e-13);
  CHECK(frobenius_norm(lam(1, 0)) < 1e-13);
}

TEST_CASE("lambda converges to delta_ij B under mesh refinement") {
  // Smooth positive definite field sampled on shrinking triangles around a
  // fixed point: the deviation from delta_ij B(center) decays at first order.
  auto field = [](const Vec2& p) {
    return SymMat2{2.0 + 0.5 * std::sin(p.x()), 0.3 * p.y(),
                   1.5 + 0.25 * std::cos(p.x() + p.y())};
  };
  const Vec2 center(0.4, 0.7);
  double prev_err = 1e300;
  double prev_h = 0.0;
  std::vector<double> errs;
  for (double h : {0.4, 0.2, 0.1, 0.05, 0.025}) {
    const Vec2 v0 = center + h * Vec2(-0.3, -0.2);
    const Vec2 v1 = center + h * Vec2(0.7, -0.1);
    const Vec2 v2 = center + h * Vec2(0.1, 0.6);
    const RefMapping map = RefMapping::from_vertices(v0, v1, v2);
    const LambdaElement lam =
        assemble_lambda({field(v0), field(v1), field(v2)}, map);
    const SymMat2 bc = field((v0 + v1 + v2) / 3.0);
    double err = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const SymMat2 expected = (i == j) ? bc : SymMat2::zero();
        err = std::max(err, frobenius_norm(lam(i, j) - expected));
      }
    if (prev_h > 0.0) {
      // First-order decay: halving h should at least halve the error,
      // within a generous constant.
      CHECK(err < 0.75 * prev_err);
    }
    prev_err = err;
    prev_h = h;
    errs.push_back(err);
  }
  CHECK(errs.back() < 0.03);
}

TEST_CASE("chain rule identity holds to rounding on random elements") {
  auto rng = make_rng(305);
  // Constant nodal field: both sides vanish identically.
  const SymMat2 c = random_spd(rng);
  CHECK(verify_chain_rule({c, c, c}, mapping_of(random_triangle(rng))) <
        1e-14);

  for (int trial = 0; trial < 1000; ++trial) {
    const std::array<SymMat2, 3> nodal = {random_spd(rng), random_spd(rng),
                                          random_spd(rng)};
    const RefMapping map = mapping_of(random_triangle(rng));
    CHECK(verify_chain_rule(nodal, map) < 1e-10);
  }
  for (int trial = 0; trial < 1000; ++trial) {
    const std::array<SymMat2, 3> nodal = {random_symmetric(rng),
                                          random_symmetric(rng),
                                          random_symmetric(rng)};
    const RefMapping map = mapping_of(random_triangle(rng));
    CHECK(verify_chain_rule(nodal, map, 0.1) < 1e-10);
  }
}

TEST_CASE("lambda blocks depend continuously on the nodal values") {
  auto rng = make_rng(306);
  const double eps = 1e-6;
  for (int trial = 0; trial < 200; ++trial) {
    std::array<SymMat2, 3> nodal = {random_spd(rng, 0.3, 3.0),
                                    random_spd(rng, 0.3, 3.0),
                                    random_spd(rng, 0.3, 3.0)};
    const RefMapping map = mapping_of(random_triangle(rng, 0.1));
    const LambdaElement base = assemble_lambda(nodal, map);
    std::array<SymMat2, 3> bumped = nodal;
    bumped[1].a11 += eps;
    const LambdaElement moved = assemble_lambda(bumped, map);
    double slope = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        slope = std::max(
            slope, frobenius_norm(moved(i, j) - base(i, j)) / eps);
    // Finite-difference slope stays bounded over well-conditioned inputs.
    CHECK(slope < 1e4);
  }
}
