#include <gtest/gtest.h>

#include "supbridge/constructions.hpp"
#include "supbridge/curves.hpp"

using namespace supbridge;

namespace {

PolyKnot square() { return PolyKnot({Vec3(1, 1, 0), Vec3(-1, 1, 0), Vec3(-1, -1, 0), Vec3(1, -1, 0)}); }

/// Stadium: two straight sides joined by 8-edge half-polygons approximating
/// semicircles of radius 1 centred at (+-2, 0, 0).
PolyKnot stadium() {
  std::vector<Vec3> v;
  for (int i = 0; i <= 8; ++i) {
    const double a = -kPi / 2 + kPi * i / 8;
    v.emplace_back(2 + std::cos(a), std::sin(a), 0.0);
  }
  for (int i = 0; i <= 8; ++i) {
    const double a = kPi / 2 + kPi * i / 8;
    v.emplace_back(-2 + std::cos(a), std::sin(a), 0.0);
  }
  return PolyKnot(v);
}

}  // namespace

TEST(PolyKnot, Validation) {
  EXPECT_THROW(PolyKnot({Vec3(0, 0, 0), Vec3(1, 0, 0)}), StructuralError);
  EXPECT_THROW(PolyKnot({Vec3(0, 0, 0), Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)}), StructuralError);
  EXPECT_THROW(PolyKnot({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0), Vec3(0, 1, 0)}), StructuralError);
  EXPECT_NO_THROW(square());
}

TEST(PolyKnot, PositionAndClosure) {
  const PolyKnot k = square();
  EXPECT_LT((k.position(0.5) - Vec3(0, 1, 0)).norm(), 1e-15);
  EXPECT_LT((k.position(4.0) - k.position(0.0)).norm(), 1e-15);
  EXPECT_LT((k.position(-0.5) - Vec3(1, 0, 0)).norm(), 1e-15);
}

TEST(TrigKnot, EtaValuesAndVelocity) {
  const TrigKnot e = eta();
  EXPECT_LT((e.position(0) - Vec3(1, 0, 1)).norm(), 1e-15);
  EXPECT_LT((e.position(kPi / 2) - Vec3(0, 1, 0)).norm(), 1e-15);
  EXPECT_LT((e.position(kPi) - Vec3(-1, 0, 1)).norm(), 1e-15);
  EXPECT_LT((e.position(kTwoPi) - e.position(0)).norm(), 1e-12);
  for (double t : {0.1, 1.3, 2.9, 5.0}) {
    const double h = 1e-6;
    const Vec3 fd = (e.position(t + h) - e.position(t - h)) / (2 * h);
    EXPECT_LT((fd - e.velocity(t)).norm(), 1e-8);
  }
  EXPECT_THROW(TrigKnot(Vec3(1, 2, 3), {}, {}), StructuralError);
}

TEST(ApplyMap, EtaScaled) {
  const TrigKnot e = eta();
  const TrigKnot s = apply_map(e, phi_lambda(0.25));
  for (double t : {0.0, 0.7, 2.0, 4.4}) {
    const Vec3 a = e.position(t), b = s.position(t);
    EXPECT_NEAR(b.x(), a.x(), 1e-15);
    EXPECT_NEAR(b.y(), a.y(), 1e-15);
    EXPECT_NEAR(b.z(), 0.25 * a.z(), 1e-15);
  }
}

TEST(ApplyMap, PsiOnSquareAndEta) {
  const PolyKnot sq = square();
  const PolyKnot k = apply_map(sq, psi());
  for (std::size_t i = 0; i < 4; ++i) {
    const Vec3& p = sq[i];
    EXPECT_LT((k[i] - Vec3(-p.z(), -p.y(), -p.x())).norm(), 1e-15);
  }
  const double lam = 0.2;
  const TrigKnot m = apply_map(eta(), psi_lambda(lam));
  EXPECT_LT((m.position(kPi / 2) - Vec3(1 + lam, -1, 1 + lam)).norm(), 1e-12);
}

TEST(ApplyMap, RoundTrip) {
  Mat3 a;
  a << 1, 0.3, -0.2, 0.1, 2, 0.5, 0, -0.4, 0.7;
  const AffineMap m(LinearMap(a), Vec3(0.5, -1, 2));
  const PolyKnot p = apply_map(apply_map(square(), m), m.inverse());
  for (std::size_t i = 0; i < 4; ++i) EXPECT_LT((p[i] - square()[i]).norm(), 1e-9);
  const TrigKnot t = apply_map(apply_map(eta(), m), m.inverse());
  for (double s : {0.0, 1.0, 2.5}) EXPECT_LT((t.position(s) - eta().position(s)).norm(), 1e-9);
  const SmoothCurve sc = apply_map(apply_map(SmoothCurve(braided(make_lambda(default_braid_params(2)), 0.1)), m),
                                   m.inverse());
  const BraidedKnot b = braided(make_lambda(default_braid_params(2)), 0.1);
  for (double s : {0.0, 1.0, 2.5}) EXPECT_LT((sc.position(s) - b.position(s)).norm(), 1e-9);
}

TEST(PiecewiseKnot, ClosureAndMatching) {
  EXPECT_THROW(PiecewiseKnot(Chain{Segment{Vec3(0, 0, 0), Vec3(1, 0, 0)}, Segment{Vec3(1, 0, 0), Vec3(0, 1, 0)}}),
               StructuralError);
  EXPECT_THROW(PiecewiseKnot(Chain{Segment{Vec3(0, 0, 0), Vec3(1, 0, 0)}, Segment{Vec3(1, 1, 0), Vec3(0, 0, 0)}}),
               StructuralError);
  const PiecewiseKnot k = to_piecewise(square());
  EXPECT_LT((k.position(0) - k.position(k.period())).norm(), 1e-15);
  // A marked singular point must sit on exactly two junctions.
  EXPECT_THROW(PiecewiseKnot(k.pieces(), {Vec3(1, 1, 0)}), StructuralError);
}

TEST(HalfSpace, EtaPlusInterval) {
  const auto parts = resolve_half_space(to_piecewise(SmoothCurve(eta())), HalfSpace::x_positive());
  ASSERT_TRUE(parts.has_value());
  ASSERT_EQ(parts->size(), 1u);
  // x > 0 for t in (-pi/2, pi/2): piecewise parameter (3/4, 1/4), wrapping.
  EXPECT_NEAR((*parts)[0].s0, 0.75, 1e-12);
  EXPECT_NEAR((*parts)[0].s1, 0.25, 1e-12);
  EXPECT_THROW(resolve_half_space(to_piecewise(SmoothCurve(eta())), {Vec3::UnitZ(), 5.0}), ParameterError);
  EXPECT_FALSE(resolve_half_space(to_piecewise(SmoothCurve(eta())), {Vec3::UnitZ(), -1.0}).has_value());
}

TEST(Straighten, StadiumChord) {
  const PolyKnot k = stadium();
  // Replace the right semicircle (vertices 0..8) by its chord.
  const PolyKnot s = straighten(k, ParamInterval{0.0, 8.0});
  EXPECT_EQ(s.size(), k.size() - 7);
  bool has_a = false, has_b = false;
  for (const auto& p : s.vertices()) {
    has_a = has_a || (p - k[0]).norm() < 1e-15;
    has_b = has_b || (p - k[8]).norm() < 1e-15;
  }
  EXPECT_TRUE(has_a);
  EXPECT_TRUE(has_b);
  // The rest of the polygon is untouched.
  for (std::size_t i = 9; i < k.size(); ++i) {
    bool found = false;
    for (const auto& p : s.vertices()) found = found || (p - k[i]).norm() == 0.0;
    EXPECT_TRUE(found) << i;
  }
}

TEST(Straighten, FractionalEndpoints) {
  const PolyKnot k = stadium();
  const PolyKnot s = straighten(k, ParamInterval{0.5, 7.5});
  EXPECT_EQ(s.size(), k.size() - 7 + 2);
}

TEST(Straighten, Errors) {
  // A chord through the rest of the curve: figure with a vertex on the chord line.
  const PolyKnot k({Vec3(0, 0, 0), Vec3(1, 1, 0), Vec3(2, 0, 0), Vec3(1, -1, 0), Vec3(1, 0.5, 0.0),
                    Vec3(0.5, -2, 0)});
  EXPECT_THROW(straighten(k, ParamInterval{0.0, 2.0}), TopologyError);
  EXPECT_THROW(straighten(square(), ParamInterval{0.0, 4.0}), ParameterError);
  EXPECT_THROW(straighten(square(), ParamInterval{0.0, 3.0}), ParameterError);
}

TEST(Straighten, PiecewisePreservesOutside) {
  const PiecewiseKnot k = to_piecewise(stadium());
  const PiecewiseKnot s = straighten(k, ParamInterval{2.5, 6.0});
  // pieces before 2 and from 6 on are identical
  for (int i = 0; i < 2; ++i) {
    EXPECT_EQ((s.pieces()[i].start() - k.pieces()[i].start()).norm(), 0.0);
    EXPECT_EQ((s.pieces()[i].end() - k.pieces()[i].end()).norm(), 0.0);
  }
  const std::size_t shift = k.size() - s.size();
  for (std::size_t i = 6; i < k.size(); ++i) {
    EXPECT_EQ((s.pieces()[i - shift].start() - k.pieces()[i].start()).norm(), 0.0);
  }
  // The chord is piece 3, running from k(2.5) to k(6).
  EXPECT_LT((s.position(3.0) - k.position(2.5)).norm(), 1e-15);
  EXPECT_LT((s.position(4.0) - k.position(6.0)).norm(), 1e-15);
  EXPECT_TRUE(s.pieces()[3].is_segment());
}
