#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "supbridge/errors.hpp"
#include "supbridge/geometry.hpp"

namespace supbridge {

/// Distance below which endpoints are considered equal.
inline constexpr double kMatchTol = 1e-9;

/// Grid density for smooth curves: samples per 2*pi per unit of harmonic degree.
inline constexpr int kSamplesPerHarmonic = 4096;

// ---------------------------------------------------------------------------
// Smooth closed curves
// ---------------------------------------------------------------------------

/// A 2*pi-periodic smooth space curve with an exact first derivative.
/// `harmonic_degree` is a sampling hint: the curve is resolved by a grid of
/// kSamplesPerHarmonic * degree points per period.
template <class C>
concept SmoothClosedCurve = requires(const C& c, double t) {
  { c.position(t) } -> std::convertible_to<Vec3>;
  { c.velocity(t) } -> std::convertible_to<Vec3>;
  { c.harmonic_degree() } -> std::convertible_to<int>;
};

/// Closed curve whose coordinates are finite trigonometric series
///   K(t) = c + sum_k (a_k cos kt + b_k sin kt),  a_k, b_k in R^3.
class TrigKnot {
 public:
  TrigKnot(const Vec3& constant, std::vector<Vec3> cos_coef,
           std::vector<Vec3> sin_coef)
      : c_(constant), a_(std::move(cos_coef)), b_(std::move(sin_coef)) {
    const std::size_t d = std::max(a_.size(), b_.size());
    a_.resize(d, Vec3::Zero());
    b_.resize(d, Vec3::Zero());
    bool moving = false;
    for (std::size_t k = 0; k < d; ++k) {
      if (a_[k].norm() > 0.0 || b_[k].norm() > 0.0) moving = true;
    }
    if (!moving) throw StructuralError("trigonometric knot has zero derivative");
  }

  /// Harmonic k (1-based) cosine and sine coefficients.
  const Vec3& constant() const noexcept { return c_; }
  const std::vector<Vec3>& cos_coefficients() const noexcept { return a_; }
  const std::vector<Vec3>& sin_coefficients() const noexcept { return b_; }

  int harmonic_degree() const noexcept { return static_cast<int>(a_.size()); }

  Vec3 position(double t) const {
    Vec3 p = c_;
    for (std::size_t k = 0; k < a_.size(); ++k) {
      const double kt = static_cast<double>(k + 1) * t;
      p += a_[k] * std::cos(kt) + b_[k] * std::sin(kt);
    }
    return p;
  }

  Vec3 velocity(double t) const {
    Vec3 d = Vec3::Zero();
    for (std::size_t k = 0; k < a_.size(); ++k) {
      const double kk = static_cast<double>(k + 1);
      d += kk * (b_[k] * std::cos(kk * t) - a_[k] * std::sin(kk * t));
    }
    return d;
  }

  /// Affine images of trigonometric series are again trigonometric series.
  TrigKnot transformed(const AffineMap& m) const {
    std::vector<Vec3> a, b;
    a.reserve(a_.size());
    b.reserve(b_.size());
    for (const auto& v : a_) a.push_back(m.tangent(v));
    for (const auto& v : b_) b.push_back(m.tangent(v));
    return TrigKnot(m(c_), std::move(a), std::move(b));
  }

 private:
  Vec3 c_;
  std::vector<Vec3> a_, b_;
};

/// Type-erased, immutable handle to any SmoothClosedCurve.
class SmoothCurve {
 public:
  template <SmoothClosedCurve C>
    requires(!std::same_as<std::remove_cvref_t<C>, SmoothCurve>)
  SmoothCurve(C curve)  // NOLINT(google-explicit-constructor)
      : self_(std::make_shared<Model<C>>(std::move(curve))) {}

  Vec3 position(double t) const { return self_->position(t); }
  Vec3 velocity(double t) const { return self_->velocity(t); }
  int harmonic_degree() const { return self_->harmonic_degree(); }

  /// Underlying object when it is a `C`, else nullptr.
  template <class C>
  const C* as() const {
    auto m = dynamic_cast<const Model<C>*>(self_.get());
    return m ? &m->curve : nullptr;
  }

 private:
  struct Concept {
    virtual ~Concept() = default;
    virtual Vec3 position(double t) const = 0;
    virtual Vec3 velocity(double t) const = 0;
    virtual int harmonic_degree() const = 0;
  };
  template <class C>
  struct Model final : Concept {
    explicit Model(C c) : curve(std::move(c)) {}
    Vec3 position(double t) const override { return curve.position(t); }
    Vec3 velocity(double t) const override { return curve.velocity(t); }
    int harmonic_degree() const override { return curve.harmonic_degree(); }
    C curve;
  };
  std::shared_ptr<const Concept> self_;
};

/// m applied pointwise to a smooth curve.
class MappedCurve {
 public:
  MappedCurve(SmoothCurve base, AffineMap m)
      : base_(std::move(base)), map_(std::move(m)) {}
  Vec3 position(double t) const { return map_(base_.position(t)); }
  Vec3 velocity(double t) const { return map_.tangent(base_.velocity(t)); }
  int harmonic_degree() const { return base_.harmonic_degree(); }
  const SmoothCurve& base() const noexcept { return base_; }
  const AffineMap& map() const noexcept { return map_; }

 private:
  SmoothCurve base_;
  AffineMap map_;
};

// ---------------------------------------------------------------------------
// Polygonal knots
// ---------------------------------------------------------------------------

/// Closed polygon through a cyclic vertex list. Native parameter s in [0, n):
/// vertex i sits at s = i and edge i joins vertex i to vertex i+1.
class PolyKnot {
 public:
  explicit PolyKnot(std::vector<Vec3> vertices) : v_(std::move(vertices)) {
    const std::size_t n = v_.size();
    if (n < 3) throw StructuralError("polygon needs at least 3 vertices");
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3& a = v_[(i + n - 1) % n];
      const Vec3& b = v_[i];
      const Vec3& c = v_[(i + 1) % n];
      if ((c - b).norm() <= kMatchTol) {
        throw StructuralError("polygon has coincident consecutive vertices at index " +
                              std::to_string(i));
      }
      const Vec3 u = b - a, w = c - b;
      if (u.cross(w).norm() <= kMatchTol * u.norm() * w.norm()) {
        throw StructuralError("polygon has collinear consecutive vertices at index " +
                              std::to_string(i));
      }
    }
  }

  const std::vector<Vec3>& vertices() const noexcept { return v_; }
  std::size_t size() const noexcept { return v_.size(); }
  const Vec3& operator[](std::size_t i) const { return v_[i % v_.size()]; }

  /// Point at native parameter s (taken mod n).
  Vec3 position(double s) const {
    const double n = static_cast<double>(v_.size());
    s = s - n * std::floor(s / n);
    const auto i = static_cast<std::size_t>(std::floor(s)) % v_.size();
    const double f = s - std::floor(s);
    return (1.0 - f) * v_[i] + f * v_[(i + 1) % v_.size()];
  }

  PolyKnot transformed(const AffineMap& m) const {
    std::vector<Vec3> w;
    w.reserve(v_.size());
    for (const auto& p : v_) w.push_back(m(p));
    return PolyKnot(std::move(w));
  }

 private:
  std::vector<Vec3> v_;
};

// ---------------------------------------------------------------------------
// Piecewise chains
// ---------------------------------------------------------------------------

struct Segment {
  Vec3 a, b;
};

/// map(curve(t)) for t running from t0 to t1 (t1 < t0 traverses backwards).
struct Arc {
  SmoothCurve curve;
  AffineMap map;
  double t0 = 0.0;
  double t1 = kTwoPi;
};

/// Either a straight segment or a smooth arc, parametrized by tau in [0, 1].
class Piece {
 public:
  Piece(Segment s) : p_(std::move(s)) {}  // NOLINT(google-explicit-constructor)
  Piece(Arc a) : p_(std::move(a)) {}      // NOLINT(google-explicit-constructor)

  bool is_segment() const noexcept { return std::holds_alternative<Segment>(p_); }
  const Segment* segment() const noexcept { return std::get_if<Segment>(&p_); }
  const Arc* arc() const noexcept { return std::get_if<Arc>(&p_); }

  Vec3 position(double tau) const {
    if (auto s = segment()) return (1.0 - tau) * s->a + tau * s->b;
    const Arc& a = *arc();
    return a.map(a.curve.position(a.t0 + tau * (a.t1 - a.t0)));
  }

  /// d/dtau of position.
  Vec3 velocity(double tau) const {
    if (auto s = segment()) return s->b - s->a;
    const Arc& a = *arc();
    return a.map.tangent(a.curve.velocity(a.t0 + tau * (a.t1 - a.t0))) * (a.t1 - a.t0);
  }

  Vec3 start() const { return position(0.0); }
  Vec3 end() const { return position(1.0); }

  /// Number of grid intervals used to resolve this piece.
  int grid_intervals(double density = 1.0) const {
    if (is_segment()) return 1;
    const Arc& a = *arc();
    const double per = kSamplesPerHarmonic * std::max(1, a.curve.harmonic_degree()) * density;
    return std::max(16, static_cast<int>(std::ceil(per * std::abs(a.t1 - a.t0) / kTwoPi)));
  }

  /// Restriction to tau in [u0, u1], reparametrized to [0, 1].
  Piece slice(double u0, double u1) const {
    if (auto s = segment()) return Segment{position(u0), position(u1)};
    Arc a = *arc();
    const double dt = a.t1 - a.t0;
    const double t0 = a.t0 + u0 * dt;
    const double t1 = a.t0 + u1 * dt;
    a.t0 = t0;
    a.t1 = t1;
    return a;
  }

  Piece reversed() const {
    if (auto s = segment()) return Segment{s->b, s->a};
    Arc a = *arc();
    std::swap(a.t0, a.t1);
    return a;
  }

  Piece transformed(const AffineMap& m) const {
    if (auto s = segment()) return Segment{m(s->a), m(s->b)};
    Arc a = *arc();
    a.map = m.compose(a.map);
    return a;
  }

 private:
  std::variant<Segment, Arc> p_;
};

/// Open chain of pieces; consecutive pieces share endpoints.
using Chain = std::vector<Piece>;

/// Closed chain of segments and smooth arcs. Native parameter s in [0, P)
/// where piece k covers [k, k+1). May carry marked singular (double) points,
/// each of which must sit on exactly two junctions of the chain.
class PiecewiseKnot {
 public:
  explicit PiecewiseKnot(Chain pieces, std::vector<Vec3> singular = {})
      : pieces_(std::move(pieces)), singular_(std::move(singular)) {
    if (pieces_.empty()) throw StructuralError("piecewise knot has no pieces");
    for (std::size_t k = 0; k < pieces_.size(); ++k) {
      const Vec3 e = pieces_[k].end();
      const Vec3 s = pieces_[(k + 1) % pieces_.size()].start();
      if ((e - s).norm() > kMatchTol) {
        throw StructuralError(k + 1 == pieces_.size()
                                  ? "piecewise chain is not closed"
                                  : "pieces " + std::to_string(k) + " and " +
                                        std::to_string(k + 1) + " do not share an endpoint");
      }
    }
    for (const auto& p : singular_) {
      if (junctions_at(p) != 2) {
        throw StructuralError("marked singular point must coincide with exactly two junctions");
      }
    }
  }

  const Chain& pieces() const noexcept { return pieces_; }
  std::size_t size() const noexcept { return pieces_.size(); }
  const std::vector<Vec3>& singular_points() const noexcept { return singular_; }

  /// Number of piece junctions located at p.
  int junctions_at(const Vec3& p) const {
    int n = 0;
    for (const auto& piece : pieces_) {
      if ((piece.start() - p).norm() <= kMatchTol) ++n;
    }
    return n;
  }

  double period() const noexcept { return static_cast<double>(pieces_.size()); }

  double wrap(double s) const {
    const double P = period();
    s = s - P * std::floor(s / P);
    return s >= P ? 0.0 : s;
  }

  std::pair<std::size_t, double> locate(double s) const {
    s = wrap(s);
    auto k = static_cast<std::size_t>(std::floor(s));
    if (k >= pieces_.size()) k = pieces_.size() - 1;
    return {k, s - static_cast<double>(k)};
  }

  Vec3 position(double s) const {
    auto [k, tau] = locate(s);
    return pieces_[k].position(tau);
  }

  Vec3 velocity(double s) const {
    auto [k, tau] = locate(s);
    return pieces_[k].velocity(tau);
  }

  /// Pieces covering [a, b] with 0 <= a <= b <= P (no wrap-around).
  Chain slice(double a, double b) const {
    Chain out;
    const double P = period();
    a = std::clamp(a, 0.0, P);
    b = std::clamp(b, 0.0, P);
    if (b - a <= 0.0) return out;
    for (std::size_t k = 0; k < pieces_.size(); ++k) {
      const double lo = std::max(a, static_cast<double>(k));
      const double hi = std::min(b, static_cast<double>(k + 1));
      if (hi - lo <= 1e-15) continue;
      const double u0 = lo - static_cast<double>(k);
      const double u1 = hi - static_cast<double>(k);
      out.push_back(u0 == 0.0 && u1 == 1.0 ? pieces_[k] : pieces_[k].slice(u0, u1));
    }
    return out;
  }

  /// The open subarc from s0 forward to s1, wrapping past the start if needed.
  Chain subpath(double s0, double s1) const {
    s0 = wrap(s0);
    s1 = wrap(s1);
    if (s0 < s1) return slice(s0, s1);
    Chain out = slice(s0, period());
    Chain tail = slice(0.0, s1);
    out.insert(out.end(), tail.begin(), tail.end());
    return out;
  }

  PiecewiseKnot transformed(const AffineMap& m) const {
    Chain out;
    out.reserve(pieces_.size());
    for (const auto& p : pieces_) out.push_back(p.transformed(m));
    std::vector<Vec3> sing;
    for (const auto& p : singular_) sing.push_back(m(p));
    return PiecewiseKnot(std::move(out), std::move(sing));
  }

 private:
  Chain pieces_;
  std::vector<Vec3> singular_;
};

inline PiecewiseKnot to_piecewise(const PolyKnot& k) {
  Chain c;
  const std::size_t n = k.size();
  for (std::size_t i = 0; i < n; ++i) c.push_back(Segment{k[i], k[i + 1]});
  return PiecewiseKnot(std::move(c));
}

/// One arc over t in [0, 2*pi]; piecewise parameter s = t / (2*pi).
inline PiecewiseKnot to_piecewise(const SmoothCurve& k) {
  return PiecewiseKnot(Chain{Arc{k, AffineMap::identity(), 0.0, kTwoPi}});
}

// ---------------------------------------------------------------------------
// Subarcs
// ---------------------------------------------------------------------------

/// Open parameter interval (s0, s1) in the host's native parameter; wraps
/// around the period when s1 <= s0.
struct ParamInterval {
  double s0 = 0.0;
  double s1 = 0.0;
};

/// Points p with normal . p > offset.
struct HalfSpace {
  Vec3 normal = Vec3::UnitX();
  double offset = 0.0;

  static HalfSpace x_positive() { return {Vec3::UnitX(), 0.0}; }
  static HalfSpace x_negative() { return {-Vec3::UnitX(), 0.0}; }

  double value(const Vec3& p) const { return normal.dot(p) - offset; }
};

using SubarcSpec = std::variant<ParamInterval, HalfSpace>;

namespace detail {

/// Shrinks [lo, hi] around a sign change of g to width tol. g(lo) has the
/// sign of glo; g(hi) the opposite.
inline std::pair<double, double> bisect_bracket(const auto& g, double lo, double hi, double glo,
                                                double tol = 1e-12) {
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if ((gm > 0.0) == (glo > 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return {lo, hi};
}

inline double bisect_root(const auto& g, double lo, double hi, double glo, double tol = 1e-12) {
  const auto [a, b] = bisect_bracket(g, lo, hi, glo, tol);
  return 0.5 * (a + b);
}

}  // namespace detail

/// Parameter intervals (in piecewise parameter) of the part of `k` inside the
/// open half-space. Boundary crossings are refined by bisection to 1e-12 in
/// the underlying curve parameter; interval ends stay on the inside. Returns nullopt when the whole curve lies
/// inside; throws ParameterError when nothing does.
inline std::optional<std::vector<ParamInterval>> resolve_half_space(
    const PiecewiseKnot& k, const HalfSpace& h) {
  struct Crossing {
    double s;
    bool entering;
  };
  std::vector<Crossing> xs;
  bool any_inside = false;
  for (std::size_t p = 0; p < k.size(); ++p) {
    const Piece& piece = k.pieces()[p];
    const int m = piece.is_segment() ? 1 : piece.grid_intervals();
    auto g = [&](double tau) { return h.value(piece.position(tau)); };
    // Rescale the tolerance from curve parameter to tau.
    double tol = 1e-12;
    if (auto a = piece.arc()) tol = 1e-12 / std::max(1e-300, std::abs(a->t1 - a->t0));
    double prev_tau = 0.0, prev = g(0.0);
    if (prev > 0.0) any_inside = true;
    for (int i = 1; i <= m; ++i) {
      const double tau = static_cast<double>(i) / m;
      const double cur = g(tau);
      if (cur > 0.0) any_inside = true;
      if ((prev > 0.0) != (cur > 0.0)) {
        const auto [lo, hi] = detail::bisect_bracket(g, prev_tau, tau, prev, tol);
        xs.push_back({static_cast<double>(p) + (cur > 0.0 ? hi : lo), cur > 0.0});
      }
      prev = cur;
      prev_tau = tau;
    }
  }
  if (xs.empty()) {
    if (any_inside) return std::nullopt;
    throw ParameterError("half-space restriction of the curve is empty");
  }
  std::sort(xs.begin(), xs.end(), [](const Crossing& a, const Crossing& b) { return a.s < b.s; });
  std::vector<ParamInterval> out;
  const std::size_t n = xs.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!xs[i].entering) continue;
    const Crossing& next = xs[(i + 1) % n];
    if (next.entering) throw NumericalError("inconsistent half-space crossings");
    out.push_back({xs[i].s, next.s});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Affine images
// ---------------------------------------------------------------------------

inline PolyKnot apply_map(const PolyKnot& k, const AffineMap& m) { return k.transformed(m); }
inline TrigKnot apply_map(const TrigKnot& k, const AffineMap& m) { return k.transformed(m); }
inline PiecewiseKnot apply_map(const PiecewiseKnot& k, const AffineMap& m) {
  return k.transformed(m);
}
inline SmoothCurve apply_map(const SmoothCurve& k, const AffineMap& m) {
  if (auto t = k.as<TrigKnot>()) return t->transformed(m);
  if (auto mc = k.as<MappedCurve>()) return MappedCurve(mc->base(), m.compose(mc->map()));
  return MappedCurve(k, m);
}

// ---------------------------------------------------------------------------
// Straightening
// ---------------------------------------------------------------------------

namespace detail {

/// Minimum distance between segments [p0,p1] and [q0,q1].
inline double segment_distance(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1) {
  const Vec3 d1 = p1 - p0, d2 = q1 - q0, r = p0 - q0;
  const double a = d1.squaredNorm(), e = d2.squaredNorm(), f = d2.dot(r);
  double s = 0.0, t = 0.0;
  if (a <= 1e-300 && e <= 1e-300) return r.norm();
  if (a <= 1e-300) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= 1e-300) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      s = denom > 1e-300 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  return ((p0 + s * d1) - (q0 + t * d2)).norm();
}

/// Polyline through a chain; arcs are sampled at 10x their harmonic density.
inline std::vector<Vec3> chain_polyline(const Chain& c, double arc_density = 10.0 / 64.0) {
  std::vector<Vec3> pts;
  for (const auto& piece : c) {
    const int m = piece.is_segment() ? 1 : std::max(8, piece.grid_intervals(arc_density));
    if (pts.empty()) pts.push_back(piece.start());
    for (int i = 1; i <= m; ++i) pts.push_back(piece.position(static_cast<double>(i) / m));
  }
  return pts;
}

/// Throws TopologyError if [a,b] comes within 1e-9 of the polyline, ignoring
/// the first and last polyline edges (they touch the chord's endpoints).
inline void check_chord_clear(const Vec3& a, const Vec3& b, const std::vector<Vec3>& rest) {
  if (rest.size() < 2) return;
  for (std::size_t i = 1; i + 2 < rest.size(); ++i) {
    if (segment_distance(a, b, rest[i], rest[i + 1]) <= kMatchTol) {
      throw TopologyError("straightened segment intersects the rest of the knot");
    }
  }
}

}  // namespace detail

/// Replaces the open subarc (s0, s1) of the polygon by the chord joining its
/// endpoints. Fractional endpoints become new vertices.
inline PolyKnot straighten(const PolyKnot& k, const ParamInterval& arc) {
  const double n = static_cast<double>(k.size());
  auto wrap = [n](double s) {
    s = s - n * std::floor(s / n);
    return s >= n ? 0.0 : s;
  };
  const double s0 = wrap(arc.s0), s1 = wrap(arc.s1);
  const Vec3 a = k.position(s0), b = k.position(s1);
  if ((a - b).norm() <= kMatchTol) throw ParameterError("straightening chord is degenerate");

  // Walk forward from s1 to s0, keeping (parameter, point).
  std::vector<std::pair<double, Vec3>> kept;
  kept.emplace_back(s1, b);
  const double span = s0 > s1 ? s0 - s1 : s0 + n - s1;
  for (double s = std::floor(s1) + 1.0; s - s1 < span; s += 1.0) {
    kept.emplace_back(wrap(s), k.position(s));
  }
  kept.emplace_back(s0, a);
  if (kept.size() < 3) throw ParameterError("straightening leaves fewer than 3 vertices");

  std::vector<Vec3> rest;
  for (const auto& [s, p] : kept) rest.push_back(p);
  // rest runs b ... a; the chord closes a -> b.
  detail::check_chord_clear(a, b, rest);

  const auto first = std::min_element(kept.begin(), kept.end(),
                                      [](const auto& x, const auto& y) { return x.first < y.first; });
  std::rotate(kept.begin(), first, kept.end());
  std::vector<Vec3> out;
  for (const auto& [s, p] : kept) out.push_back(p);
  return PolyKnot(std::move(out));
}

/// Replaces the open subarc (s0, s1) by the straight segment joining its
/// endpoints. Pieces outside the subarc are copied unchanged; marked singular
/// points that no longer sit on two junctions are dropped.
inline PiecewiseKnot straighten(const PiecewiseKnot& k, const ParamInterval& arc) {
  const double s0 = k.wrap(arc.s0), s1 = k.wrap(arc.s1);
  const Vec3 a = k.position(s0), b = k.position(s1);
  if ((a - b).norm() <= kMatchTol) throw ParameterError("straightening chord is degenerate");

  Chain rest = k.subpath(s1, s0);
  detail::check_chord_clear(a, b, detail::chain_polyline(rest));

  Chain out;
  if (s0 < s1) {
    out = k.slice(0.0, s0);
    out.push_back(Segment{a, b});
    Chain tail = k.slice(s1, k.period());
    out.insert(out.end(), tail.begin(), tail.end());
  } else {
    out = std::move(rest);
    out.push_back(Segment{a, b});
  }
  PiecewiseKnot probe(out);
  std::vector<Vec3> sing;
  for (const auto& p : k.singular_points()) {
    if (probe.junctions_at(p) == 2) sing.push_back(p);
  }
  return PiecewiseKnot(std::move(out), std::move(sing));
}

}  // namespace supbridge
