#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "supbridge/errors.hpp"

namespace supbridge {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Tolerance for unit norms and nonsingular determinants.
inline constexpr double kGeometryTol = 1e-12;

/// Unit vector on S^2; the projection axis for crookedness.
class Direction {
 public:
  /// Defaults to +k.
  Direction() : v_(0.0, 0.0, 1.0) {}

  /// Normalizes `v`; throws ConstructionError for a (near) zero vector.
  static Direction normalized(const Vec3& v) {
    const double n = v.norm();
    if (!(n > kGeometryTol) || !std::isfinite(n)) {
      throw ConstructionError("cannot normalize a zero or non-finite vector");
    }
    return Direction(v / n);
  }

  static Direction normalized(double x, double y, double z) {
    return normalized(Vec3(x, y, z));
  }

  /// Accepts `v` only if it already has unit length to within 1e-12.
  static Direction unit(const Vec3& v) {
    if (std::abs(v.norm() - 1.0) > kGeometryTol) {
      throw ConstructionError("direction is not a unit vector");
    }
    return Direction(v);
  }

  /// (sin(theta)cos(phi), sin(theta)sin(phi), cos(theta)).
  static Direction spherical(double theta, double phi) {
    return Direction(Vec3(std::sin(theta) * std::cos(phi),
                          std::sin(theta) * std::sin(phi), std::cos(theta)));
  }

  /// Direction with horizontal radius rho and azimuth alpha in the upper
  /// hemisphere: (rho cos a, rho sin a, sqrt(1 - rho^2)).
  static Direction polar_upper(double rho, double alpha) {
    if (rho < 0.0 || rho > 1.0) throw ParameterError("rho must lie in [0,1]");
    return Direction(Vec3(rho * std::cos(alpha), rho * std::sin(alpha),
                          std::sqrt(std::max(0.0, 1.0 - rho * rho))));
  }

  const Vec3& vec() const noexcept { return v_; }
  double v1() const noexcept { return v_.x(); }
  double v2() const noexcept { return v_.y(); }
  double v3() const noexcept { return v_.z(); }

  /// Horizontal radius (1 - v3^2)^(1/2).
  double rho() const noexcept {
    return std::sqrt(std::max(0.0, 1.0 - v_.z() * v_.z()));
  }

  /// Azimuth of the horizontal part, in (-pi, pi]. Zero when v = +-k.
  double alpha() const noexcept { return std::atan2(v_.y(), v_.x()); }

  Direction operator-() const { return Direction(-v_); }

  double dot(const Vec3& p) const noexcept { return v_.dot(p); }

 private:
  explicit Direction(const Vec3& v) : v_(v) {}
  Vec3 v_;
};

/// Nonsingular 3x3 linear map.
class LinearMap {
 public:
  LinearMap() : m_(Mat3::Identity()) {}

  explicit LinearMap(const Mat3& m) : m_(m) {
    if (!(std::abs(m.determinant()) > kGeometryTol) || !m.allFinite()) {
      throw ConstructionError("linear map is singular");
    }
  }

  static LinearMap identity() { return LinearMap(); }

  static LinearMap diagonal(double a, double b, double c) {
    return LinearMap(Vec3(a, b, c).asDiagonal().toDenseMatrix());
  }

  const Mat3& matrix() const noexcept { return m_; }
  double determinant() const { return m_.determinant(); }

  Vec3 operator()(const Vec3& p) const { return m_ * p; }

  LinearMap inverse() const { return LinearMap(m_.inverse()); }

  /// this after other.
  LinearMap compose(const LinearMap& other) const {
    return LinearMap(m_ * other.m_);
  }

 private:
  Mat3 m_;
};

/// p -> L p + b.
class AffineMap {
 public:
  AffineMap() : b_(Vec3::Zero()) {}
  AffineMap(LinearMap l, const Vec3& b) : l_(std::move(l)), b_(b) {}
  explicit AffineMap(LinearMap l) : l_(std::move(l)), b_(Vec3::Zero()) {}

  static AffineMap identity() { return AffineMap(); }

  const LinearMap& linear() const noexcept { return l_; }
  const Vec3& translation() const noexcept { return b_; }

  Vec3 operator()(const Vec3& p) const { return l_(p) + b_; }

  /// Maps a tangent vector (translation does not act).
  Vec3 tangent(const Vec3& d) const { return l_(d); }

  AffineMap inverse() const {
    LinearMap li = l_.inverse();
    return AffineMap(li, -li(b_));
  }

  /// this after other.
  AffineMap compose(const AffineMap& other) const {
    return AffineMap(l_.compose(other.l_), l_(other.b_) + b_);
  }

 private:
  LinearMap l_;
  Vec3 b_;
};

/// The unit normal of the image plane phi(v^perp), oriented so that
/// phi(v) . u > 0. Computed as the normalized inverse-transpose image of v.
inline Direction transport_direction(const Direction& v, const LinearMap& phi) {
  const Vec3 u = phi.matrix().inverse().transpose() * v.vec();
  Direction d = Direction::normalized(u);
  // phi(v).phi^{-T}v = |v|^2 > 0 already; the flip only guards rounding.
  if (phi(v.vec()).dot(d.vec()) < 0.0) d = -d;
  return d;
}

inline Direction transport_direction(const Direction& v, const AffineMap& m) {
  return transport_direction(v, m.linear());
}

inline void check_lambda(double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw ParameterError("lambda must lie in (0, 1]");
  }
}

/// (x, y, z) -> (x, y, lambda z).
inline AffineMap phi_lambda(double lambda) {
  check_lambda(lambda);
  return AffineMap(LinearMap::diagonal(1.0, 1.0, lambda));
}

/// (x, y, z) -> (1 + lambda - lambda z, -y, 1 + lambda - x).
inline AffineMap psi_lambda(double lambda) {
  check_lambda(lambda);
  Mat3 m;
  m << 0.0, 0.0, -lambda,
       0.0, -1.0, 0.0,
       -1.0, 0.0, 0.0;
  return AffineMap(LinearMap(m), Vec3(1.0 + lambda, 0.0, 1.0 + lambda));
}

/// Half-turn about the line {(x, 0, z) | x + z = 0}: (x, y, z) -> (-z, -y, -x).
inline AffineMap psi() {
  Mat3 m;
  m << 0.0, 0.0, -1.0,
       0.0, -1.0, 0.0,
       -1.0, 0.0, 0.0;
  return AffineMap(LinearMap(m));
}

/// Rotation by `angle` about a unit axis (Rodrigues).
inline LinearMap rotation(const Vec3& axis, double angle) {
  return LinearMap(Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix());
}

}  // namespace supbridge
