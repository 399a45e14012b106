#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "supbridge/curves.hpp"
#include "supbridge/errors.hpp"
#include "supbridge/geometry.hpp"

namespace supbridge {

using Vec2 = Eigen::Vector2d;

/// The trivial knot t -> (cos t, sin t, cos^2 t) on the parabolic sheet z = x^2.
inline TrigKnot eta() {
  // cos^2 t = 1/2 + cos(2t)/2
  return TrigKnot(Vec3(0.0, 0.0, 0.5), {Vec3(1.0, 0.0, 0.0), Vec3(0.0, 0.0, 0.5)},
                  {Vec3(0.0, 1.0, 0.0), Vec3::Zero()});
}

// ---------------------------------------------------------------------------
// Perturbation functions for Kuiper-style closed braids
// ---------------------------------------------------------------------------

/// A pair of 2 pi-periodic functions (lambda_1, lambda_2) with derivatives,
/// attached to a strand count n.
struct LambdaPair {
  int n = 1;
  std::function<Vec2(double)> value;
  std::function<Vec2(double)> derivative;
};

namespace detail {

inline double wrap_pi(double t) {
  t = std::fmod(t + kPi, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  return t - kPi;
}

inline double flat_h(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }
inline double flat_dh(double x) { return x > 0.0 ? std::exp(-1.0 / x) / (x * x) : 0.0; }

/// C-infinity step from 0 (x <= 0) to 1 (x >= 1).
inline double smooth_step(double x) {
  const double a = flat_h(x), b = flat_h(1.0 - x);
  return a / (a + b);
}

inline double smooth_step_d(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  const double a = flat_h(x), b = flat_h(1.0 - x);
  const double s = a + b;
  return (flat_dh(x) * b + a * flat_dh(1.0 - x)) / (s * s);
}

/// C-infinity bump supported on (0, 1), equal to 1 at x = 1/2.
inline double bump(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return std::exp(4.0 - 1.0 / (x * (1.0 - x)));
}

inline double bump_d(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  const double w = x * (1.0 - x);
  return bump(x) * (1.0 - 2.0 * x) / (w * w);
}

}  // namespace detail

/// Parameters of the built-in admissible family. In the (lambda_1, lambda_2)
/// plane, pass j of the curve sits at centre + R (cos theta_j, sin theta_j)
/// on a circle of radius R = a sqrt(2) about (-a, -a); theta_0 = pi/4 puts pass
/// 0 at the origin and theta_1 < ... < theta_{n-1} lie in (3 pi/4, 7 pi/4), so
/// every other pass is strictly negative in both coordinates. Inside each
/// braiding wedge all strands rotate together by their gap plus `twists` full
/// turns, so strands never collide; a common bump-windowed oscillation is
/// added on top.
struct BraidLambdaParams {
  int n = 2;
  double a = 0.05;
  std::vector<double> theta;  // theta_1..theta_{n-1}
  int twists = 0;
  std::vector<Vec2> osc_sin;  // oscillation harmonics, sin(2 pi k x)
  std::vector<Vec2> osc_cos;  // oscillation harmonics, cos(2 pi k x)
};

/// Evenly spaced passes, no oscillation.
inline BraidLambdaParams default_braid_params(int n, int twists = 1) {
  BraidLambdaParams p;
  p.n = n;
  p.twists = twists;
  for (int j = 1; j < n; ++j) p.theta.push_back(0.75 * kPi + kPi * j / n);
  return p;
}

/// Random member of the admissible family; sup |lambda| stays below 0.25.
inline BraidLambdaParams random_braid_params(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  BraidLambdaParams p;
  p.n = n;
  p.a = 0.03 + 0.05 * u(rng);
  p.twists = static_cast<int>(rng() % 2);
  for (int j = 1; j < n; ++j) p.theta.push_back(0.75 * kPi + kPi * (j - 0.3 + 0.6 * u(rng)) / n);
  std::sort(p.theta.begin(), p.theta.end());
  const int harmonics = 1 + static_cast<int>(rng() % 3);
  for (int k = 0; k < harmonics; ++k) {
    p.osc_sin.emplace_back(0.01 * (2.0 * u(rng) - 1.0), 0.01 * (2.0 * u(rng) - 1.0));
    p.osc_cos.emplace_back(0.01 * (2.0 * u(rng) - 1.0), 0.01 * (2.0 * u(rng) - 1.0));
  }
  return p;
}

inline LambdaPair make_lambda(const BraidLambdaParams& p) {
  if (p.n < 1) throw ParameterError("strand count must be positive");
  if (static_cast<int>(p.theta.size()) != p.n - 1) {
    throw ParameterError("need n - 1 pass angles");
  }
  if (!(p.a > 0.0)) throw ParameterError("pass circle radius must be positive");
  struct Shape {
    int n;
    double a, R;
    std::vector<double> theta;  // theta_0 .. theta_n, theta_n = theta_0 + 2 pi
    double twist;
    std::vector<Vec2> os, oc;

    // Pass (j), or wedge from pass j to j + 1 at local coordinate x in (0, 1).
    void locate(double t, int& j, bool& wedge, double& x) const {
      const double u = n * detail::wrap_pi(t);
      const double m = std::floor((u + kPi) / kTwoPi);
      const double w = u - kTwoPi * m;
      auto mod = [this](double k) { return static_cast<int>(((static_cast<long>(k) % n) + n) % n); };
      if (std::abs(w) <= 0.75 * kPi) {
        j = mod(m);
        wedge = false;
        x = 0.0;
      } else if (w > 0.0) {
        j = mod(m);
        wedge = true;
        x = (w - 0.75 * kPi) / (0.5 * kPi);
      } else {
        j = mod(m - 1.0);
        wedge = true;
        x = (w + 1.25 * kPi) / (0.5 * kPi);
      }
    }
    Vec2 point(double angle) const {
      return Vec2(-a + R * std::cos(angle), -a + R * std::sin(angle));
    }
    Vec2 pass(int j) const { return j == 0 ? Vec2::Zero() : point(theta[j]); }
    Vec2 osc(double x) const {
      Vec2 s = Vec2::Zero();
      for (std::size_t k = 0; k < os.size(); ++k) {
        const double w = kTwoPi * static_cast<double>(k + 1);
        s += os[k] * std::sin(w * x) + oc[k] * std::cos(w * x);
      }
      return s;
    }
    Vec2 osc_d(double x) const {
      Vec2 s = Vec2::Zero();
      for (std::size_t k = 0; k < os.size(); ++k) {
        const double w = kTwoPi * static_cast<double>(k + 1);
        s += w * (os[k] * std::cos(w * x) - oc[k] * std::sin(w * x));
      }
      return s;
    }
    double sweep(int j) const { return theta[j + 1] - theta[j] + twist; }

    Vec2 value(double t) const {
      int j;
      bool wedge;
      double x;
      locate(t, j, wedge, x);
      if (!wedge) return pass(j);
      return point(theta[j] + detail::smooth_step(x) * sweep(j)) + detail::bump(x) * osc(x);
    }
    Vec2 derivative(double t) const {
      int j;
      bool wedge;
      double x;
      locate(t, j, wedge, x);
      if (!wedge) return Vec2::Zero();
      const double dxdt = 2.0 * n / kPi;
      const double ang = theta[j] + detail::smooth_step(x) * sweep(j);
      const double dang = detail::smooth_step_d(x) * sweep(j) * dxdt;
      return R * Vec2(-std::sin(ang), std::cos(ang)) * dang +
             (detail::bump_d(x) * osc(x) + detail::bump(x) * osc_d(x)) * dxdt;
    }
  };
  auto shape = std::make_shared<Shape>();
  shape->n = p.n;
  shape->a = p.a;
  shape->R = p.a * std::sqrt(2.0);
  shape->theta.push_back(0.25 * kPi);
  for (double t : p.theta) shape->theta.push_back(t);
  shape->theta.push_back(0.25 * kPi + kTwoPi);
  shape->twist = kTwoPi * p.twists;
  shape->os = p.osc_sin;
  shape->oc = p.osc_cos;
  shape->os.resize(std::max(p.osc_sin.size(), p.osc_cos.size()), Vec2::Zero());
  shape->oc.resize(shape->os.size(), Vec2::Zero());
  return LambdaPair{p.n, [shape](double t) { return shape->value(t); },
                    [shape](double t) { return shape->derivative(t); }};
}

/// Checks the three admissibility conditions on an 8192-point grid over one
/// period; throws AdmissibilityError naming the first violated condition.
inline void validate_lambda(const LambdaPair& lam, int grid = 8192) {
  const int n = lam.n;
  if (n < 1) throw ParameterError("strand count must be positive");
  constexpr double tol = 1e-12;
  bool prev_zone = false;
  Vec2 prev_val = Vec2::Zero();
  for (int i = 0; i <= grid; ++i) {
    const double t = -kPi + kTwoPi * i / grid;
    const Vec2 l = lam.value(t);
    const Vec2 dl = lam.derivative(t);
    if (!(l.squaredNorm() < 1.0)) {
      throw AdmissibilityError("in-torus", "lambda_1^2 + lambda_2^2 >= 1 at t = " + std::to_string(t));
    }
    if (std::abs(t) <= 0.75 * kPi / n && l.cwiseAbs().maxCoeff() > tol) {
      throw AdmissibilityError("as-eta", "lambda does not vanish at t = " + std::to_string(t));
    }
    const bool zone = std::abs(t) >= 1.25 * kPi / n && std::cos(n * t) >= -1.0 / std::sqrt(2.0);
    if (zone) {
      if (!(l.x() < 0.0 && l.y() < 0.0)) {
        throw AdmissibilityError("like-eta", "lambda is not negative at t = " + std::to_string(t));
      }
      if (dl.cwiseAbs().maxCoeff() > tol || (prev_zone && (l - prev_val).cwiseAbs().maxCoeff() > tol)) {
        throw AdmissibilityError("like-eta", "lambda is not locally constant at t = " + std::to_string(t));
      }
    }
    prev_zone = zone;
    prev_val = l;
  }
}

/// K^eps(t) = ((1 + eps l1) cos nt, (1 + eps l1) sin nt, eps l2 + cos^2 nt).
/// At eps = 0 this is the n-fold covering of eta.
class BraidedKnot {
 public:
  BraidedKnot(LambdaPair lam, double epsilon) : lam_(std::move(lam)), eps_(epsilon) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ParameterError("epsilon must lie in [0, 1]");
    validate_lambda(lam_);
  }

  int strands() const noexcept { return lam_.n; }
  double epsilon() const noexcept { return eps_; }
  const LambdaPair& lambda() const noexcept { return lam_; }

  Vec3 position(double t) const {
    const int n = lam_.n;
    const Vec2 l = lam_.value(t);
    const double r = 1.0 + eps_ * l.x();
    const double c = std::cos(n * t), s = std::sin(n * t);
    return Vec3(r * c, r * s, eps_ * l.y() + c * c);
  }

  Vec3 velocity(double t) const {
    const int n = lam_.n;
    const Vec2 l = lam_.value(t);
    const Vec2 dl = lam_.derivative(t);
    const double r = 1.0 + eps_ * l.x();
    const double c = std::cos(n * t), s = std::sin(n * t);
    return Vec3(eps_ * dl.x() * c - n * r * s, eps_ * dl.x() * s + n * r * c,
                eps_ * dl.y() - n * std::sin(2.0 * n * t));
  }

  /// cos^2(nt) carries harmonic 2n; the braiding wedges get two more units.
  int harmonic_degree() const noexcept { return 2 * lam_.n + 2; }

 private:
  LambdaPair lam_;
  double eps_;
};

inline BraidedKnot braided(const LambdaPair& lam, double epsilon) {
  return BraidedKnot(lam, epsilon);
}

// ---------------------------------------------------------------------------
// Polygonal torus knots
// ---------------------------------------------------------------------------

/// Torus knot type (p, q) with the descending-edge angle alpha.
struct TorusSpec {
  int p = 2;
  int q = 3;
  double alpha = 0.0;  // 0 selects the midpoint of the admissible range

  double alpha_min() const { return kPi * p / q; }
  double alpha_max() const { return kPi; }

  double down_angle() const { return alpha > 0.0 ? alpha : 0.5 * (alpha_min() + alpha_max()); }
  /// Angular advance of the ascending edges; down + up = 2 pi p / q.
  double up_angle() const { return kTwoPi * p / q - down_angle(); }

  void validate() const {
    if (!(p >= 2 && p < q)) throw ParameterError("torus type needs 2 <= p < q");
    if (std::gcd(p, q) != 1) throw ParameterError("torus type needs coprime p, q");
    const double a = down_angle();
    if (!(a > alpha_min() && a < alpha_max())) {
      throw ParameterError("alpha must lie in (pi p / q, pi)");
    }
  }
};

/// Residual of a point against the hyperboloid
/// H_theta: x^2 + y^2 - z^2 sin^2(theta/2) = cos^2(theta/2).
inline double hyperboloid_residual(const Vec3& x, double theta) {
  const double s = std::sin(0.5 * theta), c = std::cos(0.5 * theta);
  return x.x() * x.x() + x.y() * x.y() - x.z() * x.z() * s * s - c * c;
}

/// 2q vertices alternating between the circles z = 1 and z = -1. Top vertex j
/// sits at angle 2 pi j p / q, bottom vertex j at that angle plus alpha. The
/// descending edges are rulings of H_alpha and the ascending edges rulings of
/// H_{2 pi p/q - alpha}; the curve winds p times about the z-axis and q times
/// around the torus bounded by the two hyperboloids.
inline PolyKnot torus_polygon(const TorusSpec& spec) {
  spec.validate();
  std::vector<Vec3> v;
  const double alpha = spec.down_angle();
  for (int j = 0; j < spec.q; ++j) {
    const double top = kTwoPi * j * spec.p / spec.q;
    v.emplace_back(std::cos(top), std::sin(top), 1.0);
    v.emplace_back(std::cos(top + alpha), std::sin(top + alpha), -1.0);
  }
  return PolyKnot(std::move(v));
}

/// Largest distance (in hyperboloid residual) of sampled edge points from the
/// union of the two hyperboloids carrying the torus polygon.
inline double torus_residual(const PolyKnot& k, const TorusSpec& spec, int per_edge = 64) {
  double worst = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    for (int s = 0; s <= per_edge; ++s) {
      const Vec3 x = k.position(static_cast<double>(i) + static_cast<double>(s) / per_edge);
      const double r = std::min(std::abs(hyperboloid_residual(x, spec.down_angle())),
                                std::abs(hyperboloid_residual(x, spec.up_angle())));
      worst = std::max(worst, r);
    }
  }
  return worst;
}

/// Nine-edge polygonal connected sum of a trefoil and a figure eight.
inline PolyKnot nine_gon() {
  return PolyKnot({Vec3(-30, 0, -10), Vec3(10, 20, 30), Vec3(-27, -35, -70), Vec3(0, 30, 10),
                   Vec3(0, -40, 10), Vec3(-4, -7, 8), Vec3(16, 6, -21), Vec3(-18, -32, 36),
                   Vec3(30, 0, -10)});
}

// ---------------------------------------------------------------------------
// Connected sums
// ---------------------------------------------------------------------------

/// A summand of a connected sum: passes through (1, 0, 1) at parameter 0.
/// For smooth summands `strands` locates the eta_+ arc at |t| < pi / (2 strands).
struct Summand {
  std::variant<PolyKnot, SmoothCurve> knot;
  int strands = 1;

  bool smooth() const noexcept { return std::holds_alternative<SmoothCurve>(knot); }
  Vec3 basepoint() const {
    if (auto p = std::get_if<PolyKnot>(&knot)) return (*p)[0];
    return std::get<SmoothCurve>(knot).position(0.0);
  }
};

inline Summand summand(const PolyKnot& k) { return {k, 1}; }
inline Summand summand(const BraidedKnot& k) { return {SmoothCurve(k), k.strands()}; }
inline Summand summand(const SmoothCurve& k, int strands) { return {k, strands}; }

struct ConnectedSum {
  PiecewiseKnot knot;
  Summand first, second;
  double lambda;
};

inline const Vec3 kBasepoint{1.0, 0.0, 1.0};

namespace detail {

inline void append_loop(Chain& out, const Summand& s, const AffineMap& m, bool reversed) {
  if (auto p = std::get_if<PolyKnot>(&s.knot)) {
    const std::size_t n = p->size();
    for (std::size_t i = 0; i < n; ++i) {
      if (!reversed) {
        out.push_back(Segment{m((*p)[i]), m((*p)[i + 1])});
      } else {
        out.push_back(Segment{m((*p)[n - i]), m((*p)[n - i - 1])});
      }
    }
    return;
  }
  const SmoothCurve& c = std::get<SmoothCurve>(s.knot);
  out.push_back(Arc{c, m, 0.0, reversed ? -kTwoPi : kTwoPi});
}

inline void check_sum_lambda(double lambda) {
  if (!(lambda > 0.0 && lambda <= 0.25)) throw ParameterError("lambda must lie in (0, 1/4]");
}

}  // namespace detail

/// The singular knot K_lambda: phi_lambda(K1) traversed forward from the
/// basepoint, then psi_lambda(K2) traversed backwards. Both images pass
/// through (1, 0, lambda), marked as the singular point.
inline ConnectedSum connected_sum(const Summand& k1, const Summand& k2, double lambda) {
  detail::check_sum_lambda(lambda);
  for (const Summand* s : {&k1, &k2}) {
    if ((s->basepoint() - kBasepoint).norm() > kMatchTol) {
      throw ConstructionError("connected-sum summand must pass through (1, 0, 1) at parameter 0");
    }
  }
  Chain c;
  detail::append_loop(c, k1, phi_lambda(lambda), false);
  detail::append_loop(c, k2, psi_lambda(lambda), true);
  return {PiecewiseKnot(std::move(c), {Vec3(1.0, 0.0, lambda)}), k1, k2, lambda};
}

/// Segments S_+ (from (0,-1,0) to (1+l, 1, 1+l)) and S_- (from (0,1,0) to
/// (1+l, -1, 1+l)), as (start, end) pairs.
inline std::pair<Segment, Segment> s_plus_minus(double lambda) {
  const double c = 1.0 + lambda;
  return {Segment{Vec3(0, -1, 0), Vec3(c, 1, c)}, Segment{Vec3(0, 1, 0), Vec3(c, -1, c)}};
}

/// The modified connected sum.
///  - Two smooth summands: both eta_+ image arcs are replaced by S_+ and S_-,
///    which cross at ((1+l)/2, 0, (1+l)/2), the marked singular point.
///  - Smooth first summand, polygonal second: the arc phi_lambda(eta_+) is
///    replaced by the broken line (0,-1,0), (1,0,l), (0,1,0).
///  - Two polygons: the corner at (1, 0, l) shared by the end of the first
///    loop and the start of the second is cut by the chord joining the points
///    at fraction `corner` along its two edges; the result is embedded.
inline PiecewiseKnot bar_k_lambda(const ConnectedSum& ks, double corner = 0.5) {
  const double lam = ks.lambda;
  const double c = 1.0 + lam;
  if (ks.first.smooth() && ks.second.smooth()) {
    const auto& k1 = std::get<SmoothCurve>(ks.first.knot);
    const auto& k2 = std::get<SmoothCurve>(ks.second.knot);
    const double h1 = kPi / (2.0 * ks.first.strands);
    const double h2 = kPi / (2.0 * ks.second.strands);
    const Vec3 mid(0.5 * c, 0.0, 0.5 * c);
    Chain out;
    out.push_back(Arc{k1, phi_lambda(lam), h1, kTwoPi - h1});
    out.push_back(Segment{Vec3(0, -1, 0), mid});
    out.push_back(Segment{mid, Vec3(c, 1, c)});
    out.push_back(Arc{k2, psi_lambda(lam), -h2, -kTwoPi + h2});
    out.push_back(Segment{Vec3(c, -1, c), mid});
    out.push_back(Segment{mid, Vec3(0, 1, 0)});
    return PiecewiseKnot(std::move(out), {mid});
  }
  if (ks.first.smooth() && !ks.second.smooth()) {
    const auto& k1 = std::get<SmoothCurve>(ks.first.knot);
    const double h1 = kPi / (2.0 * ks.first.strands);
    const Vec3 p(1.0, 0.0, lam);
    Chain out;
    out.push_back(Arc{k1, phi_lambda(lam), h1, kTwoPi - h1});
    out.push_back(Segment{Vec3(0, -1, 0), p});
    detail::append_loop(out, ks.second, psi_lambda(lam), true);
    out.push_back(Segment{p, Vec3(0, 1, 0)});
    return PiecewiseKnot(std::move(out), {p});
  }
  if (!ks.first.smooth() && !ks.second.smooth()) {
    if (!(corner > 0.0 && corner <= 1.0)) throw ParameterError("corner fraction must lie in (0, 1]");
    const double n1 = static_cast<double>(std::get<PolyKnot>(ks.first.knot).size());
    return straighten(ks.knot, ParamInterval{n1 - corner, n1 + corner});
  }
  throw StructuralError("unsupported summand combination: polygonal first, smooth second");
}

/// Straightens S-bar_+ = S_+ together with the last `tail` of eta-parameter
/// before it, removing the crossing of S_+ and S_-. Requires the two-smooth
/// form of bar_k_lambda.
inline PiecewiseKnot check_k_lambda(const ConnectedSum& ks, const PiecewiseKnot& bar,
                                    double tail = 0.05) {
  if (!(ks.first.smooth() && ks.second.smooth())) {
    throw StructuralError("check_k_lambda needs two smooth summands");
  }
  const int n1 = ks.first.strands;
  if (!(tail > 0.0 && tail <= 0.25 * kPi)) throw ParameterError("tail must lie in (0, pi/4]");
  const double h1 = kPi / (2.0 * n1);
  const double t_start = kTwoPi - h1 - tail / n1;
  const double tau = (t_start - h1) / ((kTwoPi - h1) - h1);
  return straighten(bar, ParamInterval{tau, 3.0});
}

/// (w_+ . v, w_- . v) for w_pm = +-(1 + l)(i + k) + 2 j.
inline std::pair<double, double> w_pm_sign_check(double lambda, const Direction& v) {
  detail::check_sum_lambda(lambda);
  const double c = 1.0 + lambda;
  return {c * (v.v1() + v.v3()) + 2.0 * v.v2(), -c * (v.v1() + v.v3()) + 2.0 * v.v2()};
}

/// (10 - sqrt 89) / sqrt 80.
inline double w_pm_bound() { return (10.0 - std::sqrt(89.0)) / std::sqrt(80.0); }

/// Lower edge of the cap v3 >= (4 l^2 + 1)^(-1/2).
inline double w_pm_cap(double lambda) { return 1.0 / std::sqrt(4.0 * lambda * lambda + 1.0); }

}  // namespace supbridge
