#include <random>

#include <gtest/gtest.h>

#include "supbridge/geometry.hpp"

using namespace supbridge;

namespace {

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  return Vec3(g(rng), g(rng), g(rng)).normalized();
}

LinearMap random_map(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  for (;;) {
    Mat3 m;
    for (int i = 0; i < 9; ++i) m(i / 3, i % 3) = g(rng);
    if (std::abs(m.determinant()) > 0.05) return LinearMap(m);
  }
}

}  // namespace

TEST(Direction, NormalizesAndRejectsZero) {
  const Direction d = Direction::normalized(0, 3, 4);
  EXPECT_NEAR(d.v2(), 0.6, 1e-15);
  EXPECT_NEAR(d.v3(), 0.8, 1e-15);
  EXPECT_THROW(Direction::normalized(0, 0, 0), ConstructionError);
  EXPECT_THROW(Direction::unit(Vec3(1, 1, 0)), ConstructionError);
  EXPECT_NO_THROW(Direction::unit(Vec3(0, 0, 1)));
}

TEST(Direction, PolarAccessors) {
  const Direction d = Direction::polar_upper(0.8, kPi / 3);
  EXPECT_NEAR(d.rho(), 0.8, 1e-12);
  EXPECT_NEAR(d.alpha(), kPi / 3, 1e-12);
  EXPECT_NEAR(d.v3(), 0.6, 1e-12);
  EXPECT_THROW(Direction::polar_upper(1.5, 0.0), ParameterError);
}

TEST(LinearMap, RejectsSingular) {
  EXPECT_THROW(LinearMap::diagonal(1, 1, 0), ConstructionError);
  Mat3 m;
  m << 1, 2, 3, 2, 4, 6, 0, 0, 1;
  EXPECT_THROW(LinearMap{m}, ConstructionError);
}

TEST(Transport, IdentityAndDiagonal) {
  const Direction v = Direction::normalized(0.3, -0.4, 0.5);
  EXPECT_LT((transport_direction(v, LinearMap::identity()).vec() - v.vec()).norm(), 1e-15);
  const Direction k = Direction::normalized(0, 0, 1);
  for (double lam : {0.1, 0.25, 1.0, 7.0}) {
    EXPECT_LT((transport_direction(k, LinearMap::diagonal(1, 1, lam)).vec() - k.vec()).norm(), 1e-15);
  }
}

TEST(Transport, WorkedExample) {
  // diag(1, 1, 1/4)^{-T} (0, 3/5, 4/5) = (0, 3/5, 16/5), normalized by sqrt(10.6).
  const Direction u = transport_direction(Direction::normalized(0, 0.6, 0.8), phi_lambda(0.25));
  const double n = std::sqrt(0.36 + 10.24);
  EXPECT_NEAR(u.v1(), 0.0, 1e-15);
  EXPECT_NEAR(u.v2(), 0.6 / n, 1e-12);
  EXPECT_NEAR(u.v3(), 3.2 / n, 1e-12);
  EXPECT_NEAR(u.v2(), 0.18429, 1e-5);
  EXPECT_NEAR(u.v3(), 0.98287, 1e-5);
  // The image plane phi(v-perp) is orthogonal to u.
  const LinearMap phi = phi_lambda(0.25).linear();
  EXPECT_NEAR(u.dot(phi(Vec3(1, 0, 0))), 0.0, 1e-15);
  EXPECT_NEAR(u.dot(phi(Vec3(0, 0.8, -0.6))), 0.0, 1e-15);
}

TEST(Transport, RandomPostConditionsAndRoundTrip) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 1000; ++i) {
    const Direction v = Direction::normalized(random_unit(rng));
    const LinearMap phi = random_map(rng);
    const Direction u = transport_direction(v, phi);
    EXPECT_NEAR(u.vec().norm(), 1.0, 1e-12);
    const Vec3 w1 = v.vec().unitOrthogonal();
    const Vec3 w2 = v.vec().cross(w1);
    EXPECT_NEAR(u.dot(phi(w1)), 0.0, 1e-9);
    EXPECT_NEAR(u.dot(phi(w2)), 0.0, 1e-9);
    EXPECT_GT(phi(v.vec()).dot(u.vec()), 0.0);
    EXPECT_LT((transport_direction(u, phi.inverse()).vec() - v.vec()).norm(), 1e-9);
  }
}

TEST(Maps, PaperMaps) {
  const Vec3 a = phi_lambda(0.25)(Vec3(1, 0, 1));
  EXPECT_LT((a - Vec3(1, 0, 0.25)).norm(), 1e-15);
  EXPECT_LT((psi()(Vec3(1, 0, 0)) - Vec3(0, 0, -1)).norm(), 1e-15);
  for (double lam : {0.1, 0.25, 1.0}) {
    EXPECT_LT((psi_lambda(lam)(Vec3(0, 1, 0)) - Vec3(1 + lam, -1, 1 + lam)).norm(), 1e-15);
    // Both maps send the basepoint (1, 0, 1) to (1, 0, lambda).
    EXPECT_LT((psi_lambda(lam)(Vec3(1, 0, 1)) - Vec3(1, 0, lam)).norm(), 1e-15);
    EXPECT_LT((phi_lambda(lam)(Vec3(1, 0, 1)) - Vec3(1, 0, lam)).norm(), 1e-15);
  }
  const AffineMap pp = psi().compose(psi());
  EXPECT_LT((pp.linear().matrix() - Mat3::Identity()).norm(), 1e-15);
  EXPECT_LT(pp.translation().norm(), 1e-15);
}

TEST(Maps, LambdaRange) {
  EXPECT_THROW(phi_lambda(0.0), ParameterError);
  EXPECT_THROW(psi_lambda(1.5), ParameterError);
  EXPECT_NO_THROW(phi_lambda(1.0));
}

TEST(Maps, AffineInverse) {
  const AffineMap m = psi_lambda(0.3);
  const AffineMap id = m.compose(m.inverse());
  const Vec3 p(0.2, -1.4, 3.0);
  EXPECT_LT((id(p) - p).norm(), 1e-14);
}
