#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "supbridge/curves.hpp"
#include "supbridge/errors.hpp"
#include "supbridge/geometry.hpp"

namespace supbridge {

/// Height differences at or below this are a plateau (polygon edges).
inline constexpr double kPlateauTol = 1e-9;

/// Result of counting the local-maximum components of t -> K(t) . v.
struct CrookednessReport {
  Direction direction;
  int count = 0;
  /// One native parameter per maximum component, sorted ascending. For
  /// polygons these are vertex indices (first vertex of a plateau).
  std::vector<double> witnesses;
  /// Set when the derivative comes within numerical noise of a double root.
  bool degenerate = false;
};

struct CountResult {
  int count = 0;
  bool degenerate = false;
};

// ---------------------------------------------------------------------------
// Polygons: maximal runs of equal height that sit above both neighbours.
// ---------------------------------------------------------------------------

inline CrookednessReport crook_poly(const PolyKnot& k, const Direction& v) {
  const std::size_t n = k.size();
  std::vector<double> h(n);
  for (std::size_t i = 0; i < n; ++i) h[i] = v.dot(k[i]);

  CrookednessReport r{v, 0, {}, false};
  // Rotate so that vertex `start` begins a run.
  std::size_t start = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(h[i] - h[(i + n - 1) % n]) > kPlateauTol) {
      start = i;
      break;
    }
  }
  if (start == n) {
    r.count = 1;
    r.witnesses.push_back(0.0);
    return r;
  }
  std::size_t i = 0;
  while (i < n) {
    const std::size_t first = (start + i) % n;
    std::size_t len = 1;
    while (i + len < n &&
           std::abs(h[(first + len) % n] - h[(first + len - 1) % n]) <= kPlateauTol) {
      ++len;
    }
    const std::size_t last = (first + len - 1) % n;
    const double before = h[(first + n - 1) % n];
    const double after = h[(last + 1) % n];
    if (h[first] > before && h[last] > after) {
      ++r.count;
      r.witnesses.push_back(static_cast<double>(first));
    }
    i += len;
  }
  std::sort(r.witnesses.begin(), r.witnesses.end());
  return r;
}

// ---------------------------------------------------------------------------
// Sampled derivative tables for chains of segments and arcs.
// ---------------------------------------------------------------------------

/// Velocities of a chain sampled on a grid: one sample per segment, grid
/// nodes (both endpoints included) per arc. Counting maxima of the projection
/// reduces to counting + to - transitions of the sampled derivative signs,
/// with local refinement wherever the grid might hide a pair of roots.
class DerivativeTable {
 public:
  /// `host` maps piece k, tau to a native parameter lo_k + tau (hi_k - lo_k).
  DerivativeTable(Chain chain, bool closed, std::vector<std::pair<double, double>> host = {},
                  double density = 1.0)
      : chain_(std::move(chain)), closed_(closed), host_(std::move(host)) {
    if (chain_.empty()) throw ParameterError("empty chain");
    if (host_.empty()) {
      for (std::size_t k = 0; k < chain_.size(); ++k) {
        host_.emplace_back(static_cast<double>(k), static_cast<double>(k + 1));
      }
    }
    for (std::uint32_t k = 0; k < chain_.size(); ++k) {
      const Piece& p = chain_[k];
      if (p.is_segment()) {
        push(p.velocity(0.5), k, 0.5, true);
        continue;
      }
      const int m = p.grid_intervals(density);
      for (int i = 0; i <= m; ++i) {
        const double tau = static_cast<double>(i) / m;
        push(p.velocity(tau), k, tau, false);
      }
    }
    for (std::size_t i = 0; i < dx_.size(); ++i) {
      scale_ = std::max(scale_, std::sqrt(dx_[i] * dx_[i] + dy_[i] * dy_[i] + dz_[i] * dz_[i]));
    }
    tol_.resize(dx_.size());
    for (std::size_t i = 0; i < dx_.size(); ++i) tol_[i] = segment_[i] ? kPlateauTol : 1e-15 * scale_;
  }

  const Chain& chain() const noexcept { return chain_; }
  std::size_t samples() const noexcept { return dx_.size(); }

  CountResult count(const Direction& v) const { return run(v, nullptr); }

  CrookednessReport report(const Direction& v) const {
    CrookednessReport r{v, 0, {}, false};
    const CountResult c = run(v, &r.witnesses);
    r.count = c.count;
    r.degenerate = c.degenerate;
    std::sort(r.witnesses.begin(), r.witnesses.end());
    return r;
  }

  /// True when every sample of the projection derivative is zero.
  bool constant(const Direction& v) const {
    std::vector<double> d;
    std::vector<std::int8_t> sg;
    signs(v, d, sg);
    return std::all_of(sg.begin(), sg.end(), [](std::int8_t x) { return x == 0; });
  }

 private:
  void push(const Vec3& vel, std::uint32_t piece, double tau, bool seg) {
    dx_.push_back(vel.x());
    dy_.push_back(vel.y());
    dz_.push_back(vel.z());
    piece_.push_back(piece);
    tau_.push_back(tau);
    segment_.push_back(seg ? 1 : 0);
  }

  double host_param(std::uint32_t piece, double tau) const {
    const auto& [lo, hi] = host_[piece];
    return lo + tau * (hi - lo);
  }

  double derivative_at(std::uint32_t piece, double tau, const Direction& v) const {
    return v.dot(chain_[piece].velocity(tau));
  }

  /// Sampled derivative of the projection and its sign (0 within tolerance).
  void signs(const Direction& v, std::vector<double>& d, std::vector<std::int8_t>& sg) const {
    const std::size_t n = dx_.size();
    d.resize(n);
    sg.resize(n);
    const double a = v.v1(), b = v.v2(), c = v.v3();
    const double* x = dx_.data();
    const double* y = dy_.data();
    const double* z = dz_.data();
    const double* tol = tol_.data();
    double* out = d.data();
    std::int8_t* sgn = sg.data();
    for (std::size_t i = 0; i < n; ++i) {
      const double di = a * x[i] + b * y[i] + c * z[i];
      out[i] = di;
      sgn[i] = static_cast<std::int8_t>((di > tol[i]) - (di < -tol[i]));
    }
  }

  bool same_arc(std::size_t i, std::size_t j) const {
    return !segment_[i] && !segment_[j] && piece_[i] == piece_[j];
  }

  double bisect(std::uint32_t piece, double lo, double hi, const Direction& v) const {
    const double flo = derivative_at(piece, lo, v);
    return detail::bisect_root([&](double t) { return derivative_at(piece, t, v); }, lo, hi, flo,
                               1e-15);
  }

  /// Witness location for a + sample i followed (after zeros) by a - sample j.
  double witness(std::size_t i, std::size_t j, const Direction& v) const {
    const std::size_t n = dx_.size();
    if ((i + 1) % n == j && same_arc(i, j)) {
      return host_param(piece_[i], bisect(piece_[i], tau_[i], tau_[j], v));
    }
    if (piece_[i] != piece_[j]) {
      // Junction right after piece i (the maximum sits at a corner).
      return host_param(piece_[i], 1.0);
    }
    // Zero samples between i and j: take the middle one.
    const std::size_t k = (i + ((j + n - i) % n) / 2) % n;
    return host_param(piece_[k], tau_[k]);
  }

  CountResult run(const Direction& v, std::vector<double>* wit) const {
    if (!wit) return fast_count(v);
    thread_local std::vector<double> d;
    thread_local std::vector<std::int8_t> sg;
    signs(v, d, sg);
    const std::size_t n = d.size();

    CountResult res;
    // + to - transitions between consecutive nonzero samples.
    std::size_t first_nz = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (sg[i] != 0) {
        first_nz = i;
        break;
      }
    }
    if (first_nz == n) {
      res.count = 1;
      wit->push_back(host_param(0, 0.0));
      return res;
    }
    std::size_t prev = first_nz;
    int prev_sign = sg[prev];
    auto step = [&](std::size_t i) {
      const int s = sg[i];
      if (s == 0) return;
      if (prev_sign > 0 && s < 0) {
        ++res.count;
        wit->push_back(witness(prev, i, v));
      }
      prev = i;
      prev_sign = s;
    };
    for (std::size_t i = first_nz + 1; i < n; ++i) step(i);
    if (closed_) {
      for (std::size_t i = 0; i <= first_nz; ++i) step(i);
    }
    const double near = 1e-3 * scale_;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(d[i]) < near) hidden_pair(i, v, res, wit);
    }
    return res;
  }

  /// Count-only pass: one sweep over the samples, no scratch arrays.
  CountResult fast_count(const Direction& v) const {
    const std::size_t n = dx_.size();
    const double a = v.v1(), b = v.v2(), c = v.v3();
    const double* x = dx_.data();
    const double* y = dy_.data();
    const double* z = dz_.data();
    const double* tol = tol_.data();
    auto sign_at = [&](std::size_t i) {
      const double di = a * x[i] + b * y[i] + c * z[i];
      return (di > tol[i]) - (di < -tol[i]);
    };
    // Closed chains start from the last nonzero sign so that every cyclic
    // transition is seen once; open chains start neutral.
    int ps = 0;
    if (closed_) {
      for (std::size_t i = n; i-- > 0;) {
        if ((ps = sign_at(i)) != 0) break;
      }
    }
    CountResult res;
    const double near = 1e-3 * scale_;
    bool any_nz = false;
    int cnt = 0;
    thread_local std::vector<std::size_t> cand;
    cand.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const double di = a * x[i] + b * y[i] + c * z[i];
      const int s = (di > tol[i]) - (di < -tol[i]);
      cnt += (ps > 0) & (s < 0);
      ps = s != 0 ? s : ps;
      any_nz = any_nz || s != 0;
      if (std::abs(di) < near) cand.push_back(i);
    }
    if (!any_nz) return {1, false};
    res.count = cnt;
    for (std::size_t i : cand) hidden_pair(i, v, res, nullptr);
    return res;
  }

  /// Grid-hidden root pair or near-double root around sample i of an arc.
  void hidden_pair(std::size_t i, const Direction& v, CountResult& res, std::vector<double>* wit) const {
    const std::size_t n = dx_.size();
    if (segment_[i]) return;
    if (!closed_ && (i == 0 || i + 1 == n)) return;
    const std::size_t ip = i == 0 ? n - 1 : i - 1;
    const std::size_t in = i + 1 == n ? 0 : i + 1;
    if (!same_arc(ip, i) || !same_arc(i, in)) return;
    const double di = sample(i, v), dp = sample(ip, v), dn = sample(in, v);
    const int s = sign_of(i, di), sp = sign_of(ip, dp), sn = sign_of(in, dn);
    if (s == 0) {
      if (sp == sn && sp != 0) res.degenerate = true;
      return;
    }
    if (sp != s || sn != s) return;
    if (std::abs(di) > std::abs(dp) || std::abs(di) > std::abs(dn)) return;
    if (tau_[ip] > tau_[i] || tau_[in] < tau_[i]) return;
    const double flat = 1e-10 * scale_;
    const auto [tmin, fmin] = extremum(piece_[i], tau_[ip], tau_[in], s, v);
    if (fmin < -flat) {
      ++res.count;
      if (wit) {
        // s > 0: + - + , maximum at the first root; s < 0: - + -, at the second.
        const double root = s > 0 ? bisect(piece_[i], tau_[ip], tmin, v) : bisect(piece_[i], tmin, tau_[in], v);
        wit->push_back(host_param(piece_[i], root));
      }
    } else if (fmin <= flat) {
      res.degenerate = true;
    }
  }

  double sample(std::size_t i, const Direction& v) const {
    return v.v1() * dx_[i] + v.v2() * dy_[i] + v.v3() * dz_[i];
  }
  int sign_of(std::size_t i, double di) const { return (di > tol_[i]) - (di < -tol_[i]); }

  /// Golden-section minimum of s * d(tau) on [lo, hi]; returns (tau, s * d).
  std::pair<double, double> extremum(std::uint32_t piece, double lo, double hi, int s,
                                     const Direction& v) const {
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    auto f = [&](double t) { return s * derivative_at(piece, t, v); };
    double a = lo, b = hi;
    double c = b - g * (b - a), e = a + g * (b - a);
    double fc = f(c), fe = f(e);
    for (int it = 0; it < 80 && b - a > 1e-16; ++it) {
      if (fc < fe) {
        b = e;
        e = c;
        fe = fc;
        c = b - g * (b - a);
        fc = f(c);
      } else {
        a = c;
        c = e;
        fc = fe;
        e = a + g * (b - a);
        fe = f(e);
      }
    }
    const double t = 0.5 * (a + b);
    return {t, f(t)};
  }

  Chain chain_;
  bool closed_;
  std::vector<std::pair<double, double>> host_;
  std::vector<double> dx_, dy_, dz_, tau_, tol_;
  double scale_ = 0.0;  // largest sampled speed
  std::vector<std::uint32_t> piece_;
  std::vector<std::uint8_t> segment_;
};

// ---------------------------------------------------------------------------
// Whole curves
// ---------------------------------------------------------------------------

/// Counts maxima of the parametrized projection of a closed chain. Singular
/// knots and coverings are counted per passage of the parametrization.
inline CrookednessReport crook_path(const PiecewiseKnot& k, const Direction& v) {
  return DerivativeTable(k.pieces(), true).report(v);
}

namespace detail {

inline CrookednessReport smooth_report(const SmoothCurve& k, const Direction& v) {
  // Native parameter t in [0, 2 pi).
  DerivativeTable table(Chain{Arc{k, AffineMap::identity(), 0.0, kTwoPi}}, true,
                        {{0.0, kTwoPi}});
  if (table.constant(v)) throw DegenerateError("projection of the curve is constant");
  CrookednessReport r = table.report(v);
  for (auto& w : r.witnesses) w = std::fmod(w, kTwoPi);
  std::sort(r.witnesses.begin(), r.witnesses.end());
  return r;
}

}  // namespace detail

/// Smooth closed curve; witnesses are parameters t in [0, 2 pi).
inline CrookednessReport crook_smooth(const SmoothCurve& k, const Direction& v) {
  return detail::smooth_report(k, v);
}

inline CrookednessReport crook_trig(const TrigKnot& k, const Direction& v) {
  return detail::smooth_report(SmoothCurve(k), v);
}

// ---------------------------------------------------------------------------
// Subarcs
// ---------------------------------------------------------------------------

namespace detail {

struct HostedChain {
  Chain chain;
  std::vector<std::pair<double, double>> host;
};

inline void append_slice(const PiecewiseKnot& k, double a, double b, HostedChain& out) {
  for (std::size_t p = 0; p < k.size(); ++p) {
    const double lo = std::max(a, static_cast<double>(p));
    const double hi = std::min(b, static_cast<double>(p + 1));
    if (hi - lo <= 1e-15) continue;
    out.chain.push_back(k.pieces()[p].slice(lo - static_cast<double>(p), hi - static_cast<double>(p)));
    out.host.emplace_back(lo, hi);
  }
}

inline HostedChain hosted_subpath(const PiecewiseKnot& k, double s0, double s1) {
  s0 = k.wrap(s0);
  s1 = k.wrap(s1);
  HostedChain out;
  if (s0 < s1) {
    append_slice(k, s0, s1, out);
  } else {
    append_slice(k, s0, k.period(), out);
    const std::size_t mark = out.host.size();
    append_slice(k, 0.0, s1, out);
    for (std::size_t i = mark; i < out.host.size(); ++i) {
      out.host[i].first += k.period();
      out.host[i].second += k.period();
    }
  }
  if (out.chain.empty()) throw ParameterError("empty subarc");
  return out;
}

}  // namespace detail

/// Crookedness restricted to a fixed open subarc (or union of subarcs),
/// resolved once and reusable across directions. Witnesses are reported in
/// the host's native parameter.
class SubarcCounter {
 public:
  /// `native_period` is the host's parameter period (P for piecewise knots,
  /// n for polygons, 2 pi for smooth curves).
  SubarcCounter(const PiecewiseKnot& k, const SubarcSpec& spec, double native_period)
      : to_native_(native_period / k.period()), period_(k.period()) {
    const double to_pw = k.period() / native_period;
    std::vector<ParamInterval> parts;
    if (auto iv = std::get_if<ParamInterval>(&spec)) {
      parts.push_back({iv->s0 * to_pw, iv->s1 * to_pw});
    } else {
      const auto resolved = resolve_half_space(k, std::get<HalfSpace>(spec));
      if (!resolved) {
        tables_.emplace_back(k.pieces(), true);
        return;
      }
      parts = *resolved;
    }
    for (const auto& iv : parts) {
      detail::HostedChain hc = detail::hosted_subpath(k, iv.s0, iv.s1);
      tables_.emplace_back(std::move(hc.chain), false, std::move(hc.host));
    }
  }

  explicit SubarcCounter(const PolyKnot& k, const SubarcSpec& spec)
      : SubarcCounter(to_piecewise(k), spec, static_cast<double>(k.size())) {}
  explicit SubarcCounter(const SmoothCurve& k, const SubarcSpec& spec)
      : SubarcCounter(to_piecewise(k), spec, kTwoPi) {}
  explicit SubarcCounter(const PiecewiseKnot& k, const SubarcSpec& spec)
      : SubarcCounter(k, spec, k.period()) {}

  CountResult count(const Direction& v) const {
    CountResult r;
    for (const auto& t : tables_) {
      const CountResult c = t.count(v);
      r.count += c.count;
      r.degenerate = r.degenerate || c.degenerate;
    }
    return r;
  }

  CrookednessReport report(const Direction& v) const {
    CrookednessReport r{v, 0, {}, false};
    for (const auto& t : tables_) {
      const CrookednessReport part = t.report(v);
      r.count += part.count;
      r.degenerate = r.degenerate || part.degenerate;
      for (double w : part.witnesses) r.witnesses.push_back(std::fmod(w, period_) * to_native_);
    }
    std::sort(r.witnesses.begin(), r.witnesses.end());
    return r;
  }

 private:
  std::vector<DerivativeTable> tables_;
  double to_native_;
  double period_;
};

/// Crookedness of an open subarc (endpoints excluded). For a half-space the
/// subarc is the union of the open components inside it.
inline CrookednessReport crook_subarc(const PiecewiseKnot& k, const SubarcSpec& s,
                                      const Direction& v) {
  return SubarcCounter(k, s).report(v);
}

inline CrookednessReport crook_subarc(const PolyKnot& k, const SubarcSpec& s,
                                      const Direction& v) {
  return SubarcCounter(k, s).report(v);
}

/// Native parameter t in [0, 2 pi).
inline CrookednessReport crook_subarc(const SmoothCurve& k, const SubarcSpec& s,
                                      const Direction& v) {
  return SubarcCounter(k, s).report(v);
}

inline CrookednessReport crook_subarc(const TrigKnot& k, const SubarcSpec& s,
                                      const Direction& v) {
  return crook_subarc(SmoothCurve(k), s, v);
}

// ---------------------------------------------------------------------------
// Reusable counters for scanning many directions.
// ---------------------------------------------------------------------------

/// Anything that maps a direction to a crookedness count.
template <class C>
concept DirectionCounter = requires(const C& c, const Direction& v) {
  { c.count(v) } -> std::convertible_to<CountResult>;
};

class PolyCounter {
 public:
  explicit PolyCounter(PolyKnot k) : k_(std::move(k)) {}
  CountResult count(const Direction& v) const { return {crook_poly(k_, v).count, false}; }
  const PolyKnot& knot() const noexcept { return k_; }

 private:
  PolyKnot k_;
};

class PathCounter {
 public:
  explicit PathCounter(const PiecewiseKnot& k, double density = 1.0)
      : table_(k.pieces(), true, {}, density) {}
  explicit PathCounter(const SmoothCurve& k, double density = 1.0)
      : table_(Chain{Arc{k, AffineMap::identity(), 0.0, kTwoPi}}, true, {}, density) {}
  CountResult count(const Direction& v) const { return table_.count(v); }
  std::size_t samples() const noexcept { return table_.samples(); }

 private:
  DerivativeTable table_;
};

}  // namespace supbridge
