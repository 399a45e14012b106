#pragma once

#include <cmath>
#include <vector>

#include "supbridge/constructions.hpp"
#include "supbridge/crookedness.hpp"
#include "supbridge/errors.hpp"
#include "supbridge/geometry.hpp"

namespace supbridge {

/// G(t) = -rho sin(t - alpha) - (1 - rho^2)^(1/2) sin 2t, the derivative of
/// t -> eta(t) . v for v with horizontal radius rho and azimuth alpha.
inline double g_eval(double rho, double alpha, double t) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw ParameterError("rho must lie in [0, 1]");
  return -rho * std::sin(t - alpha) - std::sqrt(1.0 - rho * rho) * std::sin(2.0 * t);
}

/// d/dt and d^2/dt^2 of g_eval.
inline double g_eval_d(double rho, double alpha, double t) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw ParameterError("rho must lie in [0, 1]");
  return -rho * std::cos(t - alpha) - 2.0 * std::sqrt(1.0 - rho * rho) * std::cos(2.0 * t);
}

inline double g_eval_dd(double rho, double alpha, double t) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw ParameterError("rho must lie in [0, 1]");
  return rho * std::sin(t - alpha) + 4.0 * std::sqrt(1.0 - rho * rho) * std::sin(2.0 * t);
}

/// Double-root locus of G: at parameter t0 the function G_{rho, alpha} with
/// rho = rho(t0), alpha = alpha(t0) has a multiple root at t0.
struct DoubleRoot {
  double rho;
  double alpha;
};

inline DoubleRoot double_root_locus(double t0) {
  const double c2 = std::cos(2.0 * t0);
  const double C = c2 * c2;
  const double rho = std::sqrt((1.0 + 3.0 * C) / (2.0 + 3.0 * C));
  // rho (sin, cos)(t0 - alpha) = -sigma (sin 2t0, 2 cos 2t0)
  const double alpha = t0 - std::atan2(-std::sin(2.0 * t0), -2.0 * c2);
  return {rho, detail::wrap_pi(alpha)};
}

/// The unique rho at which G_{rho, alpha} has a multiple root.
/// The azimuth of the locus decreases monotonically in t0 (d alpha / d t0 =
/// 1 - 4 / (1 + 3 cos^2 2t0) <= 0) and turns once per 2 pi, so each alpha is
/// hit exactly once; it is located by a sweep and refined by bisection.
inline double xi(double alpha) {
  alpha = detail::wrap_pi(alpha);
  constexpr int sweep = 256;
  auto f = [alpha](double t0) { return detail::wrap_pi(double_root_locus(t0).alpha - alpha); };
  double found = std::nan("");
  int hits = 0;
  double prev_t = 0.0, prev = f(0.0);
  if (prev == 0.0) {
    found = 0.0;
    ++hits;
  }
  for (int i = 1; i <= sweep; ++i) {
    const double t = kTwoPi * i / sweep;
    const double cur = f(t);
    if (cur == 0.0 && i < sweep) {
      found = t;
      ++hits;
    } else if (prev != 0.0 && cur != 0.0 && (prev > 0.0) != (cur > 0.0) &&
               std::abs(cur - prev) < kPi) {
      found = detail::bisect_root(f, prev_t, t, prev, 1e-15);
      ++hits;
    }
    prev = cur;
    prev_t = t;
  }
  if (hits == 0) throw NumericalError("xi: no double root bracketed");
  if (hits > 1) throw NumericalError("xi: double-root locus is not single-valued");
  return double_root_locus(found).rho;
}

/// Sampled boundary curve rho = xi(alpha), alpha_j = 2 pi j / M.
struct RegionBoundary {
  std::vector<double> alpha;
  std::vector<double> xi;

  static RegionBoundary sample(int m) {
    if (m < 4) throw ParameterError("boundary needs at least 4 samples");
    RegionBoundary b;
    for (int j = 0; j < m; ++j) {
      const double a = kTwoPi * j / m;
      b.alpha.push_back(a);
      b.xi.push_back(supbridge::xi(a));
    }
    return b;
  }

  std::size_t size() const noexcept { return alpha.size(); }

  /// Linear interpolation in alpha, periodic.
  double operator()(double a) const {
    const double m = static_cast<double>(alpha.size());
    double u = std::fmod(a, kTwoPi) / kTwoPi * m;
    if (u < 0.0) u += m;
    const auto i = static_cast<std::size_t>(std::floor(u)) % alpha.size();
    const double f = u - std::floor(u);
    return (1.0 - f) * xi[i] + f * xi[(i + 1) % alpha.size()];
  }
};

enum class Membership { Outside, Inside, Indeterminate };

inline const char* to_string(Membership m) {
  switch (m) {
    case Membership::Inside: return "inside";
    case Membership::Outside: return "outside";
    default: return "indeterminate";
  }
}

/// v3 > 0 and eta shows two maxima in direction v, by direct counting.
/// Directions where the count is flagged degenerate are indeterminate.
inline Membership in_n(const Direction& v) {
  if (!(v.v3() > 0.0)) return Membership::Outside;
  const CrookednessReport r = crook_trig(eta(), v);
  if (r.degenerate) return Membership::Indeterminate;
  return r.count == 2 ? Membership::Inside : Membership::Outside;
}

/// Membership from the boundary curve; within `tube` of rho = xi(alpha) the
/// result is indeterminate.
inline Membership in_n_polar(const Direction& v, double tube = 0.0) {
  if (!(v.v3() > 0.0)) return Membership::Outside;
  const double x = xi(v.alpha());
  if (std::abs(v.rho() - x) <= tube) return Membership::Indeterminate;
  return v.rho() < x ? Membership::Inside : Membership::Outside;
}

/// Maxima of eta restricted to eta_+ = eta cap {x > 0}: 1 if v lies in N or
/// v1 > 0, 0 if v lies outside N with v1 < 0. On v1 = 0 (or on the boundary
/// of N) the count is computed directly.
inline int eta_plus_class(const Direction& v) {
  if (!(v.v3() > 0.0)) throw ParameterError("eta_plus_class needs v3 > 0");
  if (v.v1() == 0.0) {
    return crook_subarc(eta(), HalfSpace::x_positive(), v).count;
  }
  const Membership m = in_n_polar(v);
  if (m == Membership::Inside || v.v1() > 0.0) return 1;
  if (m == Membership::Outside) return 0;
  return crook_subarc(eta(), HalfSpace::x_positive(), v).count;
}

}  // namespace supbridge
