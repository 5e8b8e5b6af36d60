#include <cmath>
#include <limits>
#include <stdexcept>

#include <gtest/gtest.h>

#include "grushinlab/geometry.hpp"
#include "grushinlab/params.hpp"
#include "grushinlab/rng.hpp"
#include "support.hpp"

using namespace grushinlab;
using grushinlab::testing::pt;
using grushinlab::testing::rel_err;

namespace {

HalfSpacePoint random_point(Rng& rng, int n, double scale = 1.0) {
  std::vector<double> t(static_cast<std::size_t>(n - 1));
  for (auto& c : t) c = rng.uniform(-scale, scale);
  return HalfSpacePoint(std::move(t), rng.uniform(0.0, scale));
}

}  // namespace

TEST(Params, DerivedConstants) {
  for (int n : {2, 3, 5}) {
    for (double a : {0.0, 0.5, 1.0, 2.0, 3.7}) {
      const GrushinParams p(n, a);
      EXPECT_NEAR(p.Q(), 2.0 * (1.0 + a) * p.gamma(), 1e-14 * p.Q());
      EXPECT_DOUBLE_EQ(p.beta(), 1.0 / ((1.0 + a) * (1.0 + a)));
      EXPECT_DOUBLE_EQ(p.alpha_prime(), std::pow(4.0, -2.0 * (1.0 + a)));
      EXPECT_DOUBLE_EQ(p.Q(), (a + 1.0) * (n - 1) + 1.0);
    }
  }
}

TEST(Params, RejectsBadInput) {
  EXPECT_THROW(GrushinParams(1, 1.0), std::invalid_argument);
  EXPECT_THROW(GrushinParams(2, -0.1), std::invalid_argument);
  EXPECT_THROW(GrushinParams(2, std::numeric_limits<double>::quiet_NaN()), std::invalid_argument);
}

TEST(HalfSpacePoint, RejectsNegativeNormal) {
  EXPECT_THROW(pt({0.0}, -1e-300), std::invalid_argument);
  EXPECT_NO_THROW(pt({0.0}, 0.0));
}

TEST(Gauge, Examples) {
  EXPECT_DOUBLE_EQ(gauge(pt({1.0}, 0.0), GrushinParams(2, 1.0)), 1.0);
  EXPECT_NEAR(gauge(pt({0.0}, 1.0), GrushinParams(2, 1.0)), 0.7071067812, 1e-10);
  EXPECT_NEAR(gauge(pt({3.0}, 4.0), GrushinParams(2, 0.0)), 5.0, 1e-14);
  EXPECT_EQ(gauge(origin(3), GrushinParams(3, 1.0)), 0.0);
}

TEST(Gauge, AlphaZeroIsEuclidean) {
  Rng rng(11);
  const GrushinParams p(3, 0.0);
  for (int k = 0; k < 200; ++k) {
    const auto x = random_point(rng, 3, 5.0);
    EXPECT_LE(rel_err(gauge(x, p), euclidean_distance(x, origin(3))), 1e-14);
  }
}

TEST(QuasiDistance, Examples) {
  EXPECT_DOUBLE_EQ(quasi_distance(pt({0.0}, 0.0), pt({1.0}, 0.0), 1.0), 1.0);
  EXPECT_DOUBLE_EQ(quasi_distance(pt({0.0}, 0.0), pt({0.0}, 1.0), 1.0), 1.0);
  EXPECT_DOUBLE_EQ(quasi_distance(pt({0.0}, 1.0), pt({0.0}, 2.0), 1.0), 3.0);
  EXPECT_DOUBLE_EQ(quasi_distance(pt({1.0, 2.0}, 0.5), pt({4.0, 6.0}, 0.5), 0.7), 5.0);
}

TEST(QuasiDistance, SymmetricAndVanishesOnDiagonal) {
  Rng rng(3);
  for (int k = 0; k < 500; ++k) {
    const auto y = random_point(rng, 3), z = random_point(rng, 3);
    EXPECT_EQ(quasi_distance(y, z, 1.3), quasi_distance(z, y, 1.3));
    EXPECT_EQ(quasi_distance(y, y, 1.3), 0.0);
    if (!(y == z)) {
      EXPECT_GT(quasi_distance(y, z, 1.3), 0.0);
    }
  }
}

TEST(QuasiDistance, AlphaZeroIsTaxicabSplit) {
  const auto y = pt({1.0, -2.0}, 0.25), z = pt({4.0, 2.0}, 1.0);
  EXPECT_DOUBLE_EQ(quasi_distance(y, z, 0.0), 5.0 + 0.75);
}

TEST(QuasiDistance, TwoSidedEuclideanComparisonOnUnitBox) {
  // The constants are not explicit; report the tightest ones seen and check they are sane.
  Rng rng(5);
  for (double a : {0.5, 1.0, 2.0}) {
    double c = std::numeric_limits<double>::infinity(), C = 0.0;
    for (int k = 0; k < 10000; ++k) {
      const auto y = random_point(rng, 2), z = random_point(rng, 2);
      const double e = euclidean_distance(y, z);
      if (e == 0.0) continue;
      const double d = quasi_distance(y, z, a);
      c = std::min(c, d / std::pow(e, 1.0 + a));
      C = std::max(C, d / e);
    }
    RecordProperty("alpha_" + std::to_string(a) + "_c", std::to_string(c));
    RecordProperty("alpha_" + std::to_string(a) + "_C", std::to_string(C));
    EXPECT_GT(c, 0.0);
    EXPECT_LT(C, 2.0 + 2.0 * (1.0 + a));
  }
}

TEST(Scaling, Examples) {
  const GrushinParams p(2, 1.0);
  const auto x = pt({1.0}, 1.0);
  EXPECT_EQ(apply_scaling(1.0, x, p), x);
  const auto y = apply_scaling(16.0, x, p);
  EXPECT_DOUBLE_EQ(y.tangential()[0], 4.0);
  EXPECT_DOUBLE_EQ(y.normal(), 2.0);
  EXPECT_THROW(apply_scaling(0.0, x, p), std::invalid_argument);
  EXPECT_THROW(apply_scaling(-1.0, x, p), std::invalid_argument);
}

TEST(Scaling, RoundTripAndHomogeneity) {
  Rng rng(7);
  for (int n : {2, 3}) {
    for (double a : {0.0, 0.5, 1.0, 2.0}) {
      const GrushinParams p(n, a);
      for (int k = 0; k < 300; ++k) {
        const auto x = random_point(rng, n, 3.0), z = random_point(rng, n, 3.0);
        const double h = std::exp(rng.uniform(-6.0, 6.0));
        const auto hx = apply_scaling(h, x, p);
        const auto back = apply_scaling(1.0 / h, hx, p);
        for (int i = 0; i < n; ++i) EXPECT_NEAR(back.coord(i), x.coord(i), 1e-13 * (1.0 + std::abs(x.coord(i))));
        EXPECT_LE(rel_err(gauge(hx, p), std::pow(h, 1.0 / p.normal_weight()) * gauge(x, p), 1e-300), 1e-12);
        const double dq = quasi_distance(x, z, a);
        const double dq_scaled = std::pow(h, -0.5) * quasi_distance(hx, apply_scaling(h, z, p), a);
        EXPECT_LE(rel_err(dq_scaled, dq, 1e-300), 1e-12);
      }
    }
  }
}

TEST(Ellipsoid, Examples) {
  const GrushinParams p(2, 1.0);
  const auto c = pt({0.3}, 0.2);
  EXPECT_TRUE(in_ellipsoid(c, 1e-9, c, p));
  EXPECT_FALSE(in_ellipsoid(pt({0.0}, 1.0), 1.0, origin(2), p));
  EXPECT_TRUE(in_ellipsoid(pt({0.0}, 0.999), 1.0, origin(2), p));
  EXPECT_THROW(in_ellipsoid(c, 0.0, c, p), std::invalid_argument);
}

TEST(Ellipsoid, ScalingMapsUnitEllipsoidOntoEh) {
  Rng rng(13);
  for (double a : {0.5, 1.0, 2.0}) {
    const GrushinParams p(3, a);
    int inside = 0;
    for (int k = 0; k < 100; ++k) {
      const auto x = random_point(rng, 3, 1.2);
      const double h = std::exp(rng.uniform(-4.0, 4.0));
      const bool in1 = in_ellipsoid(x, 1.0, origin(3), p);
      inside += in1;
      // Stay off the boundary where rounding could flip the strict inequality.
      if (std::abs(ellipsoid_level(x, origin(3), p) - 1.0) < 1e-9) continue;
      EXPECT_EQ(in1, in_ellipsoid(apply_scaling(h, x, p), h, origin(3), p));
    }
    EXPECT_GT(inside, 0);
    EXPECT_LT(inside, 100);
  }
}
