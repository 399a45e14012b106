#include <gtest/gtest.h>

#include "supbridge/region_n.hpp"

using namespace supbridge;

namespace {

/// Boundary radius from the maxima count of eta alone: largest rho with two
/// maxima, by bisection.
double xi_by_count(double alpha) {
  double lo = 0.3, hi = 0.99;
  for (int i = 0; i < 40; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (crook_trig(eta(), Direction::polar_upper(mid, alpha)).count == 2) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// min_t G(t)^2 + G'(t)^2 on a fine grid.
double double_root_residual(double rho, double alpha) {
  double best = 1e300;
  for (int i = 0; i < 200000; ++i) {
    const double t = kTwoPi * i / 200000;
    const double g = g_eval(rho, alpha, t), d = g_eval_d(rho, alpha, t);
    best = std::min(best, g * g + d * d);
  }
  return best;
}

}  // namespace

TEST(GEval, Examples) {
  EXPECT_NEAR(g_eval(0.6, 0.0, 0.0), 0.0, 1e-15);
  EXPECT_NEAR(g_eval(1.0, 0.0, kPi / 2), -1.0, 1e-15);
  EXPECT_NEAR(g_eval(0.0, 0.3, kPi / 4), -1.0, 1e-15);
  EXPECT_NEAR(g_eval(0.6, 0.0, kPi / 4), -0.6 * std::sin(kPi / 4) - 0.8, 1e-15);
  EXPECT_THROW(g_eval(1.5, 0.0, 0.0), ParameterError);
  EXPECT_THROW(g_eval_d(-0.1, 0.0, 0.0), ParameterError);
}

TEST(GEval, IsDerivativeOfEtaHeight) {
  for (double rho : {0.2, 0.7, 0.95}) {
    for (double alpha : {-2.0, 0.4, 1.9}) {
      const Direction v = Direction::polar_upper(rho, alpha);
      for (double t : {0.3, 1.7, 4.1}) {
        EXPECT_NEAR(g_eval(rho, alpha, t), v.dot(eta().velocity(t)), 1e-12);
        const double h = 1e-6;
        EXPECT_NEAR(g_eval_d(rho, alpha, t), (g_eval(rho, alpha, t + h) - g_eval(rho, alpha, t - h)) / (2 * h), 1e-8);
        EXPECT_NEAR(g_eval_dd(rho, alpha, t), (g_eval_d(rho, alpha, t + h) - g_eval_d(rho, alpha, t - h)) / (2 * h),
                    1e-8);
      }
    }
  }
}

TEST(Xi, ClosedFormValues) {
  EXPECT_NEAR(xi(0.0), 2.0 / std::sqrt(5.0), 1e-12);
  EXPECT_NEAR(xi(kPi), 2.0 / std::sqrt(5.0), 1e-12);
  EXPECT_NEAR(xi(kPi / 4), 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(xi(3 * kPi / 4), 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(xi(-kPi / 4), 1.0 / std::sqrt(2.0), 1e-12);
}

TEST(Xi, RangeAndSymmetry) {
  for (int i = 0; i < 720; ++i) {
    const double a = kTwoPi * i / 720;
    const double x = xi(a);
    EXPECT_GE(x, 1.0 / std::sqrt(2.0) - 1e-12);
    EXPECT_LE(x, 2.0 / std::sqrt(5.0) + 1e-12);
    EXPECT_NEAR(x, xi(-a), 1e-10);
    EXPECT_NEAR(x, xi(kPi - a), 1e-10);
  }
}

TEST(Xi, AgreesWithCountOracle) {
  for (double a : {kPi / 8, 0.3, 1.0, 2.2, -0.7}) EXPECT_NEAR(xi(a), xi_by_count(a), 1e-6) << a;
}

TEST(Xi, IsADoubleRoot) {
  for (double a : {kPi / 8, 1.2, 2.6}) {
    EXPECT_LT(double_root_residual(xi(a), a), 1e-9);
    EXPECT_GT(double_root_residual(xi(a) - 0.02, a), 1e-6);
  }
}

TEST(Xi, LocusIsDoubleRoot) {
  for (double t0 : {0.1, 0.9, 2.0, 3.0, 5.5}) {
    const DoubleRoot d = double_root_locus(t0);
    EXPECT_NEAR(g_eval(d.rho, d.alpha, t0), 0.0, 1e-12);
    EXPECT_NEAR(g_eval_d(d.rho, d.alpha, t0), 0.0, 1e-12);
  }
}

TEST(Boundary, InterpolatesXi) {
  EXPECT_THROW(RegionBoundary::sample(3), ParameterError);
  const RegionBoundary b = RegionBoundary::sample(360);
  ASSERT_EQ(b.size(), 360u);
  for (std::size_t j = 0; j < b.size(); j += 37) EXPECT_NEAR(b(b.alpha[j]), xi(b.alpha[j]), 1e-15);
  for (double a : {1.234, 4.5, -1.0, 2.0}) EXPECT_NEAR(b(a), xi(a), 1e-4);
  // xi has cusps at alpha = 0 and pi, where linear interpolation is coarser.
  EXPECT_NEAR(b(0.013), xi(0.013), 5e-3);
}

TEST(InN, Examples) {
  EXPECT_EQ(in_n(Direction::normalized(0, 0, 1)), Membership::Inside);
  EXPECT_EQ(in_n(Direction::normalized(1, 0, 0.01)), Membership::Outside);
  EXPECT_EQ(in_n(Direction::normalized(0, 1, -1)), Membership::Outside);
  EXPECT_EQ(in_n(Direction::polar_upper(0.5, 2.0)), Membership::Inside);
  EXPECT_EQ(in_n(Direction::polar_upper(0.95, 2.0)), Membership::Outside);
  EXPECT_EQ(in_n_polar(Direction::polar_upper(0.5, 2.0)), Membership::Inside);
  EXPECT_EQ(in_n_polar(Direction::polar_upper(xi(2.0) + 1e-4, 2.0), 1e-3), Membership::Indeterminate);
  EXPECT_STREQ(to_string(Membership::Indeterminate), "indeterminate");
}

TEST(InN, DirectAndPolarAgreeAwayFromBoundary) {
  for (int i = 0; i < 60; ++i) {
    const double a = kTwoPi * i / 60;
    for (double rho : {0.2, 0.6, 0.69, 0.91, 0.99}) {
      const Direction v = Direction::polar_upper(rho, a);
      EXPECT_EQ(in_n(v), in_n_polar(v)) << rho << " " << a;
    }
  }
}

TEST(EtaPlus, Classes) {
  EXPECT_THROW(eta_plus_class(Direction::normalized(1, 0, 0)), ParameterError);
  EXPECT_EQ(eta_plus_class(Direction::normalized(0, 0, 1)), 1);
  EXPECT_EQ(eta_plus_class(Direction::polar_upper(0.95, 0.1)), 1);
  EXPECT_EQ(eta_plus_class(Direction::polar_upper(0.95, kPi - 0.1)), 0);
  EXPECT_EQ(eta_plus_class(Direction::polar_upper(0.5, kPi - 0.1)), 1);
  EXPECT_EQ(eta_plus_class(Direction::normalized(0, 0.99, 0.1)), 0);
  EXPECT_EQ(eta_plus_class(Direction::normalized(0, 0.3, 0.9)), 1);
}

TEST(EtaPlus, MatchesSubarcCount) {
  for (int i = 0; i < 40; ++i) {
    const double a = kTwoPi * (i + 0.5) / 40;
    for (double rho : {0.3, 0.65, 0.93}) {
      const Direction v = Direction::polar_upper(rho, a);
      const auto r = crook_subarc(eta(), HalfSpace::x_positive(), v);
      if (r.degenerate) continue;
      EXPECT_EQ(eta_plus_class(v), r.count) << rho << " " << a;
    }
  }
}
