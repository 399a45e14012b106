#include <cstdlib>

#include <gtest/gtest.h>

#include "supbridge/constructions.hpp"
#include "supbridge/search.hpp"

using namespace supbridge;

namespace {

struct AlwaysDegenerate {
  CountResult count(const Direction&) const { return {1, true}; }
};

/// Flagged count 5 near k, clean count 1 elsewhere.
struct DegenerateNearPole {
  CountResult count(const Direction& v) const { return v.v3() > 0.9 ? CountResult{5, true} : CountResult{1, false}; }
};

/// Count depends only on the angle to k: 3 inside a small polar cap, else 1.
struct PolarCap {
  double cos_radius;
  CountResult count(const Direction& v) const { return {v.v3() > cos_radius ? 3 : 1, false}; }
};

}  // namespace

TEST(SphereGrid, UpperHemisphereAndNested) {
  const auto small = SphereGrid(500).directions();
  const auto big = SphereGrid(2000).directions();
  ASSERT_EQ(small.size(), 500u);
  for (std::size_t i = 0; i < small.size(); ++i) {
    EXPECT_GT(small[i].v3(), 0.0);
    EXPECT_EQ(small[i].vec(), big[i].vec());
  }
  // No direction and its antipode both appear.
  for (std::size_t i = 0; i < small.size(); ++i) {
    for (std::size_t j = i + 1; j < small.size(); ++j) {
      EXPECT_GT((small[i].vec() + small[j].vec()).norm(), 1e-9);
    }
  }
  EXPECT_THROW(SphereGrid(0).directions(), ParameterError);
}

TEST(SphereGrid, AreaUniform) {
  // Fraction of directions with v3 > 1/2 approaches the cap area fraction 1/2.
  const auto d = SphereGrid(20000).directions();
  std::size_t high = 0;
  for (const auto& v : d) high += v.v3() > 0.5;
  EXPECT_NEAR(static_cast<double>(high) / d.size(), 0.5, 0.005);
}

TEST(SphereGrid, Exclusion) {
  SphereGrid g(1000);
  g.exclude = [](const Direction& v) { return std::abs(v.v1()) < 0.1; };
  const auto d = g.directions();
  ASSERT_EQ(d.size(), 1000u);
  for (const auto& v : d) EXPECT_GE(std::abs(v.v1()), 0.1);
  g.exclude = [](const Direction&) { return true; };
  EXPECT_THROW(g.directions(), ParameterError);
}

TEST(Scan, EtaExtremes) {
  const SmoothCurve e = eta();
  const ScanResult mx = scan_max(e, SphereGrid(2000));
  EXPECT_EQ(mx.extremal, 2);
  EXPECT_FALSE(mx.unstable);
  EXPECT_FALSE(mx.witnesses.empty());
  const ScanResult mn = scan_min(e, SphereGrid(2000));
  EXPECT_EQ(mn.extremal, 1);
  EXPECT_EQ(mn.histogram.size(), 2u);
}

TEST(Scan, FineGridFindsSmallCap) {
  // A cap of radius 0.02 rad is far narrower than a 200-point grid spacing.
  const PolarCap c{std::cos(0.02)};
  const ScanResult coarse = scan_max(c, SphereGrid(200));
  EXPECT_EQ(coarse.histogram.count(3), 0u);
  EXPECT_EQ(scan_max(c, SphereGrid(200000)).extremal, 3);
}

TEST(Scan, AllDegenerateThrows) {
  EXPECT_THROW(scan_max(AlwaysDegenerate{}, SphereGrid(100)), DegenerateError);
}

TEST(Scan, MonotoneInGridSize) {
  const PolyKnot k = nine_gon();
  int prev_max = 0, prev_min = 100;
  for (std::size_t m : {100, 1000, 10000}) {
    const int mx = scan_max(k, SphereGrid(m)).extremal;
    const int mn = scan_min(k, SphereGrid(m)).extremal;
    EXPECT_GE(mx, prev_max);
    EXPECT_LE(mn, prev_min);
    prev_max = mx;
    prev_min = mn;
  }
  EXPECT_EQ(prev_min, 3);
}

TEST(Scan, RotationInvariantExtremes) {
  const TorusSpec spec{2, 3};
  const PolyKnot k = torus_polygon(spec);
  const PolyKnot r = apply_map(k, AffineMap(rotation(Vec3(1, 2, 3), 0.7)));
  EXPECT_EQ(scan_max(k, SphereGrid(20000)).extremal, scan_max(r, SphereGrid(20000)).extremal);
  EXPECT_EQ(scan_min(k, SphereGrid(20000)).extremal, scan_min(r, SphereGrid(20000)).extremal);
}

TEST(Scan, ThreadCountDoesNotChangeResult) {
  const SmoothCurve k = braided(make_lambda(default_braid_params(2)), 0.05);
  setenv("SUPBRIDGE_THREADS", "1", 1);
  const ScanResult a = scan_max(k, SphereGrid(1000));
  setenv("SUPBRIDGE_THREADS", "3", 1);
  EXPECT_EQ(thread_count(), 3u);
  const ScanResult b = scan_max(k, SphereGrid(1000));
  unsetenv("SUPBRIDGE_THREADS");
  EXPECT_EQ(a.extremal, b.extremal);
  EXPECT_EQ(a.histogram, b.histogram);
  EXPECT_EQ(a.evaluated, b.evaluated);
  EXPECT_EQ(a.witness.vec(), b.witness.vec());
}

TEST(Certify, EtaBounds) {
  const SmoothCurve e = eta();
  const CertifyReport ok = certify_bound(e, 2, SphereGrid(2000));
  EXPECT_TRUE(ok.passed);
  EXPECT_EQ(ok.observed_max, 2);
  const CertifyReport bad = certify_bound(e, 1, SphereGrid(2000));
  EXPECT_FALSE(bad.passed);
  ASSERT_FALSE(bad.violations.empty());
  EXPECT_LE(bad.violations.size(), 16u);
  for (const auto& v : bad.violations) EXPECT_EQ(crook_smooth(e, v).count, 2);
  // k is one such direction.
  EXPECT_EQ(crook_smooth(e, Direction::normalized(0, 0, 1)).count, 2);
}

TEST(Certify, DegenerateDirectionsCountAgainstBound) {
  const CertifyReport r = certify_bound(DegenerateNearPole{}, 1, SphereGrid(1000));
  EXPECT_FALSE(r.passed);
  EXPECT_EQ(r.observed_max, 5);
  EXPECT_GT(r.degenerate, 0u);
  const ScanResult s = scan_max(DegenerateNearPole{}, SphereGrid(1000));
  EXPECT_EQ(s.extremal, 1);
  EXPECT_EQ(s.extremal_any, 5);
  EXPECT_TRUE(s.unstable);
}
