#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "supbridge/constructions.hpp"
#include "supbridge/crookedness.hpp"
#include "supbridge/knot_io.hpp"
#include "supbridge/region_n.hpp"
#include "supbridge/search.hpp"

namespace supbridge {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SuiteResult {
  std::string suite;
  bool passed = true;
  std::vector<CheckResult> checks;
  double seconds = 0.0;
};

struct VerifyOptions {
  std::size_t grid = 20000;  // directions per sphere scan
  std::uint64_t seed = 1;
};

inline json to_json(const SuiteResult& r) {
  json checks = json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  return {{"suite", r.suite}, {"passed", r.passed}, {"seconds", r.seconds}, {"checks", checks}};
}

namespace detail {

class SuiteBuilder {
 public:
  explicit SuiteBuilder(std::string name) : start_(std::chrono::steady_clock::now()) {
    r_.suite = std::move(name);
  }

  template <class... T>
  void check(const std::string& name, bool ok, const T&... detail) {
    std::ostringstream os;
    os.precision(12);
    (os << ... << detail);
    r_.checks.push_back({name, ok, os.str()});
    r_.passed = r_.passed && ok;
  }

  SuiteResult finish() {
    r_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    return r_;
  }

 private:
  SuiteResult r_;
  std::chrono::steady_clock::time_point start_;
};

inline Direction random_direction(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  for (;;) {
    const Vec3 v(g(rng), g(rng), g(rng));
    if (v.norm() > 1e-6) return Direction::normalized(v);
  }
}

inline Direction random_upper(std::mt19937_64& rng) {
  const Direction d = random_direction(rng);
  return d.v3() >= 0.0 ? d : -d;
}

/// Direction with v3 uniform in [lo, hi] (area-uniform on that band).
inline Direction random_band(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> z(lo, hi), a(0.0, kTwoPi);
  const double v3 = z(rng), phi = a(rng);
  const double r = std::sqrt(std::max(0.0, 1.0 - v3 * v3));
  return Direction::normalized(r * std::cos(phi), r * std::sin(phi), v3);
}

/// Random nonsingular map with condition number at most 50.
inline LinearMap random_linear(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  for (;;) {
    Mat3 m;
    for (int i = 0; i < 9; ++i) m(i / 3, i % 3) = g(rng);
    Eigen::JacobiSVD<Mat3> svd(m);
    const auto s = svd.singularValues();
    if (s(2) > 1e-3 && s(0) / s(2) < 50.0) return LinearMap(m);
  }
}

inline PolyKnot random_polygon(std::mt19937_64& rng, int lo, int hi) {
  std::uniform_int_distribution<int> count(lo, hi);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    std::vector<Vec3> v(static_cast<std::size_t>(count(rng)));
    for (auto& p : v) p = Vec3(u(rng), u(rng), u(rng));
    try {
      return PolyKnot(std::move(v));
    } catch (const StructuralError&) {
    }
  }
}

/// {n . x > c} pulled through x -> m(x).
inline HalfSpace map_half_space(const HalfSpace& h, const AffineMap& m) {
  const Vec3 n = m.linear().matrix().inverse().transpose() * h.normal;
  return {n, h.offset + n.dot(m.translation())};
}

inline double lambda_sup(const LambdaPair& lam) {
  double s = 0.0;
  for (int i = 0; i < 8192; ++i) s = std::max(s, lam.value(-kPi + kTwoPi * i / 8192).norm());
  return s;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

inline SuiteResult verify_eta(const VerifyOptions& o) {
  detail::SuiteBuilder s("eta");
  const TrigKnot e = eta();
  const int ck = crook_trig(e, Direction::normalized(0, 0, 1)).count;
  const int ci = crook_trig(e, Direction::normalized(1, 0, 0)).count;
  s.check("crook(eta, k) = 2", ck == 2, "count ", ck);
  s.check("crook(eta, i) = 1", ci == 1, "count ", ci);
  const PathCounter pc{SmoothCurve(e)};
  const SphereGrid g(o.grid);
  const int mx = scan_max(pc, g).extremal, mn = scan_min(pc, g).extremal;
  s.check("scan_max(eta) = 2", mx == 2, "scan max ", mx);
  s.check("scan_min(eta) = 1", mn == 1, "scan min ", mn);
  return s.finish();
}

inline SuiteResult verify_lemma5(const VerifyOptions& o) {
  detail::SuiteBuilder s("lemma5");
  const double lo = 1.0 / std::sqrt(2.0), hi = 2.0 / std::sqrt(5.0);
  const double x0 = xi(0.0), x4 = xi(kPi / 4);
  s.check("xi(0) = 2/sqrt5", std::abs(x0 - hi) <= 1e-9, "xi(0) = ", x0);
  s.check("xi(pi/4) = 1/sqrt2", std::abs(x4 - lo) <= 1e-9, "xi(pi/4) = ", x4);

  const RegionBoundary b = RegionBoundary::sample(3600);
  double mn = 1.0, mx = 0.0, sym = 0.0;
  for (std::size_t j = 0; j < b.size(); ++j) {
    mn = std::min(mn, b.xi[j]);
    mx = std::max(mx, b.xi[j]);
    sym = std::max(sym, std::abs(b.xi[j] - b.xi[(j + 1800) % 3600]));
    sym = std::max(sym, std::abs(b.xi[j] - b.xi[(900 + 3600 - j) % 3600]));
  }
  s.check("xi in [1/sqrt2, 2/sqrt5]", mn >= lo - 1e-12 && mx <= hi + 1e-12, "range [", mn, ", ", mx, "]");
  s.check("xi extremes attained", std::abs(mn - lo) <= 1e-9 && std::abs(mx - hi) <= 1e-9, "range [", mn, ", ",
          mx, "]");
  s.check("xi symmetric under alpha+pi and pi/2-alpha", sym <= 1e-6, "max asymmetry ", sym);

  const double g0 = g_eval(hi, 0.0, kPi), g1 = g_eval_d(hi, 0.0, kPi), g2 = g_eval_dd(hi, 0.0, kPi);
  s.check("triple root of G at (2/sqrt5, 0, pi)",
          std::abs(g0) <= 1e-12 && std::abs(g1) <= 1e-12 && std::abs(g2) <= 1e-12, "G, G', G'' = ", g0, ", ",
          g1, ", ", g2);

  int flips = 0;
  for (int j = 0; j < 360; ++j) {
    const double a = kTwoPi * j / 360.0;
    const double x = xi(a);
    const bool inside = in_n(Direction::polar_upper(x - 1e-3, a)) == Membership::Inside;
    const bool outside = in_n(Direction::polar_upper(x + 1e-3, a)) == Membership::Outside;
    if (inside && outside) ++flips;
  }
  s.check("boundary separation at 360 angles", flips == 360, flips, "/360 angles flip");

  std::mt19937_64 rng(o.seed);
  int in_cap = 0;
  for (int i = 0; i < 1000; ++i) {
    if (in_n(detail::random_band(rng, 1.0 / std::sqrt(2.0) + 1e-9, 1.0)) == Membership::Inside) ++in_cap;
  }
  s.check("v3 > 1/sqrt2 implies v in N", in_cap == 1000, in_cap, "/1000");
  return s.finish();
}

inline SuiteResult verify_lemma6(const VerifyOptions& o) {
  detail::SuiteBuilder s("lemma6");
  const SubarcCounter plus(SmoothCurve(eta()), HalfSpace::x_positive());
  s.check("class(k) = 1", eta_plus_class(Direction::normalized(0, 0, 1)) == 1);
  s.check("class(-0.8, 0, 0.6) = 1", eta_plus_class(Direction::normalized(-0.8, 0, 0.6)) == 1);
  s.check("class(-0.95, 0, 0.31225) = 0", eta_plus_class(Direction::normalized(-0.95, 0, 0.31225)) == 0);
  s.check("subarc(-0.95, 0, 0.31225) = 0", plus.count(Direction::normalized(-0.95, 0, 0.31225)).count == 0);

  std::mt19937_64 rng(o.seed);
  int tested = 0, mismatches = 0;
  while (tested < 10000) {
    const Direction v = detail::random_upper(rng);
    if (!(v.v3() > 0.0) || std::abs(v.v1()) < 1e-3) continue;
    if (std::abs(v.rho() - xi(v.alpha())) < 1e-3) continue;
    ++tested;
    if (eta_plus_class(v) != plus.count(v).count) ++mismatches;
  }
  s.check("classifier agrees with subarc counting", mismatches == 0, mismatches, " mismatches in ", tested);
  return s.finish();
}

/// One admissible family member: (n-or-0) on 1000 directions, the count n on
/// 500 directions with |v3| < 0.05 and the sphere-scan maximum 2n. Epsilon
/// starts at 0.01 and is halved (at most 4 times) until all three hold.
inline SuiteResult verify_prop7(const VerifyOptions& o) {
  detail::SuiteBuilder s("prop7");
  std::mt19937_64 rng(o.seed);
  for (int n : {2, 3}) {
    for (int trial = 0; trial < 3; ++trial) {
      const LambdaPair lam = make_lambda(random_braid_params(n, rng));
      const double sup = detail::lambda_sup(lam);
      const std::uint64_t dir_seed = rng();
      double eps = 0.01;
      bool ok = false;
      std::ostringstream why;
      for (int halving = 0; halving <= 4 && !ok; ++halving, eps *= 0.5) {
        const SmoothCurve k(braided(lam, eps));
        const SubarcCounter plus(k, HalfSpace::x_positive());
        const PathCounter whole(k);
        std::mt19937_64 drng(dir_seed);
        const double tube = 1e-3 + eps * sup;
        int tested = 0, bad_split = 0;
        while (tested < 1000) {
          const Direction v = detail::random_upper(drng);
          if (std::abs(v.v1()) < tube || std::abs(v.rho() - xi(v.alpha())) < tube) continue;
          ++tested;
          const int expect = (v.rho() < xi(v.alpha()) || v.v1() > 0.0) ? n : 0;
          if (plus.count(v).count != expect) ++bad_split;
        }
        int bad_band = 0;
        for (int i = 0; i < 500; ++i) {
          if (whole.count(detail::random_band(drng, -0.05, 0.05)).count != n) ++bad_band;
        }
        const int mx = scan_max(whole, SphereGrid(o.grid)).extremal;
        ok = bad_split == 0 && bad_band == 0 && mx == 2 * n;
        why.str("");
        why << "eps " << eps << ": split mismatches " << bad_split << "/1000, band " << bad_band
            << "/500, scan max " << mx;
      }
      s.check("n = " + std::to_string(n) + ", family member " + std::to_string(trial + 1), ok, why.str());
    }
  }
  return s.finish();
}

inline SuiteResult verify_thm1(const VerifyOptions& o) {
  detail::SuiteBuilder s("thm1");
  const BraidedKnot k = braided(make_lambda(default_braid_params(2)), 0.01);
  const ConnectedSum cs = connected_sum(summand(k), summand(k), 0.125);
  const PiecewiseKnot bar = bar_k_lambda(cs);
  const CertifyReport r = certify_bound(PathCounter(bar), 5, SphereGrid(o.grid));
  s.check("K-bar bound 5 (n1 = n2 = 2)", r.passed, "observed max ", r.observed_max, " over ", r.evaluated,
          " directions, ", r.degenerate, " degenerate");
  const PiecewiseKnot chk = check_k_lambda(cs, bar);
  const CertifyReport rc = certify_bound(PathCounter(chk), 5, SphereGrid(o.grid));
  s.check("straightened K-check bound 5", rc.passed, "observed max ", rc.observed_max);
  return s.finish();
}

inline SuiteResult verify_thm2_case2(const VerifyOptions& o) {
  detail::SuiteBuilder s("thm2-case2");
  const PolyKnot t = torus_polygon({2, 3, 0.0});
  const PiecewiseKnot bar = bar_k_lambda(connected_sum(summand(t), summand(t), 0.125));
  const PathCounter pc(bar);
  const CertifyReport r = certify_bound(pc, 4, SphereGrid(o.grid));
  s.check("tau(2,3) # tau(2,3) bound 4", r.passed, "observed max ", r.observed_max, " over ", r.evaluated,
          " directions");
  const int mx = scan_max(pc, SphereGrid(o.grid)).extremal;
  s.check("scan_max = 4", mx == 4, "scan max ", mx);
  return s.finish();
}

inline SuiteResult verify_invariance(const VerifyOptions& o) {
  detail::SuiteBuilder s("invariance");
  std::mt19937_64 rng(o.seed);
  double round_trip = 0.0, post = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Direction v = detail::random_direction(rng);
    const LinearMap phi = detail::random_linear(rng);
    const Direction u = transport_direction(v, phi);
    round_trip = std::max(round_trip, (transport_direction(u, phi.inverse()).vec() - v.vec()).norm());
    const Vec3 w1 = v.vec().unitOrthogonal(), w2 = v.vec().cross(w1);
    post = std::max({post, std::abs(u.dot(phi(w1))), std::abs(u.dot(phi(w2)))});
    if (!(phi(v.vec()).dot(u.vec()) > 0.0)) post = std::max(post, 1.0);
  }
  s.check("transport round trip", round_trip <= 1e-9, "max error ", round_trip);
  s.check("transport post-conditions", post <= 1e-9, "max residual ", post);

  const std::vector<AnyKnot> fixed = {AnyKnot(SmoothCurve(eta())), AnyKnot(torus_polygon({2, 3, 0.0})),
                                      AnyKnot(nine_gon())};
  int mismatches = 0, sub_mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    const AnyKnot k = i % 4 == 3 ? AnyKnot(detail::random_polygon(rng, 5, 12)) : fixed[i % 3];
    const AffineMap m(detail::random_linear(rng), Vec3(0.3, -0.2, 0.1));
    const Direction v = detail::random_direction(rng);
    const Direction u = transport_direction(v, m);
    const AnyKnot mk = std::visit([&](const auto& x) { return AnyKnot(apply_map(x, m)); }, k);
    if (crook(k, v).count != crook(mk, u).count) ++mismatches;
    const HalfSpace h{detail::random_direction(rng).vec(), 0.0};
    try {
      const int a = std::visit([&](const auto& x) { return crook_subarc(x, h, v).count; }, k);
      const int b = std::visit(
          [&](const auto& x) { return crook_subarc(x, detail::map_half_space(h, m), u).count; }, mk);
      if (a != b) ++sub_mismatches;
    } catch (const ParameterError&) {
      // half-space misses the knot
    }
  }
  s.check("crook invariant under transport", mismatches == 0, mismatches, " mismatches in 1000");
  s.check("subarc crook invariant under transport", sub_mismatches == 0, sub_mismatches, " mismatches");
  return s.finish();
}

inline SuiteResult verify_straighten(const VerifyOptions& o) {
  detail::SuiteBuilder s("straighten");
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int violations = 0, polygons = 0, attempts = 0;
  while (polygons < 50) {
    if (++attempts > 5000) break;
    const PolyKnot k = detail::random_polygon(rng, 7, 14);
    const double n = static_cast<double>(k.size());
    const double s0 = n * u(rng);
    const double len = 1.2 + (n - 4.0) * u(rng);
    PolyKnot st = k;
    try {
      st = straighten(k, ParamInterval{s0, s0 + len});
    } catch (const Error&) {
      continue;
    }
    ++polygons;
    for (int i = 0; i < 1000; ++i) {
      const Direction v = detail::random_direction(rng);
      if (crook_poly(st, v).count > crook_poly(k, v).count) ++violations;
    }
  }
  s.check("50 straightened polygons", polygons == 50, polygons, " polygons");
  s.check("counts never increase", violations == 0, violations, " violations in ", polygons * 1000);
  return s.finish();
}

inline SuiteResult verify_table1(const VerifyOptions& o) {
  detail::SuiteBuilder s("table1-bounds");
  struct Row {
    std::string name;
    TorusSpec a, b;
    int sup, bridge;
  };
  const std::vector<Row> rows = {{"3_1 3_1", {2, 3, 0.0}, {2, 3, 0.0}, 4, 3},
                                 {"3_1 8_19", {2, 3, 0.0}, {3, 4, 0.0}, 5, 4},
                                 {"8_19 8_19", {3, 4, 0.0}, {3, 4, 0.0}, 6, 5}};
  const SphereGrid g(o.grid);
  auto row = [&](const std::string& name, const auto& counter, int sup, int bridge) {
    const CertifyReport c = certify_bound(counter, sup, g);
    const int mx = scan_max(counter, g).extremal;
    const int mn = scan_min(counter, g).extremal;
    s.check(name, c.passed && mx > bridge - 1 && mn >= bridge, "certified max ", c.observed_max, " <= ", sup,
            ", scan max ", mx, " > ", bridge - 1, ", scan min ", mn, " >= ", bridge);
  };
  for (const auto& r : rows) {
    const PiecewiseKnot bar =
        bar_k_lambda(connected_sum(summand(torus_polygon(r.a)), summand(torus_polygon(r.b)), 0.125));
    row(r.name, PathCounter(bar), r.sup, r.bridge);
  }
  row("3_1 4_1 (nine-gon)", PolyCounter(nine_gon()), 4, 3);
  return s.finish();
}

inline SuiteResult verify_torus(const VerifyOptions& o) {
  detail::SuiteBuilder s("torus");
  for (auto [p, q] : {std::pair{2, 3}, {3, 4}, {2, 5}}) {
    const TorusSpec spec{p, q, 0.0};
    const PolyKnot k = torus_polygon(spec);
    const std::string tag = "(" + std::to_string(p) + "," + std::to_string(q) + ")";
    const double res = torus_residual(k, spec);
    s.check(tag + " on torus", k.size() == static_cast<std::size_t>(2 * q) && res <= 1e-6, "residual ", res);
    const int ck = crook_poly(k, Direction::normalized(0, 0, 1)).count;
    s.check(tag + " crook(k) = q", ck == q, "count ", ck);
    const SphereGrid g(o.grid);
    const int mn = scan_min(k, g).extremal, mx = scan_max(k, g).extremal;
    s.check(tag + " scan (min, max) = (p, q)", mn == p && mx == q, "(", mn, ", ", mx, ")");
  }
  return s.finish();
}

inline SuiteResult verify_nine_gon(const VerifyOptions& o) {
  detail::SuiteBuilder s("nine-gon");
  const PolyKnot k = nine_gon();
  s.check("9 vertices", k.size() == 9);
  const int ck = crook_poly(k, Direction::normalized(0, 0, 1)).count;
  s.check("crook(k) = 3", ck == 3, "count ", ck);
  const SphereGrid g(o.grid);
  const int mx = scan_max(k, g).extremal, mn = scan_min(k, g).extremal;
  s.check("scan_max = 4", mx == 4, "scan max ", mx);
  s.check("scan_min = 3", mn == 3, "scan min ", mn);
  s.check("2 s <= p = 9", 2 * mx <= 9, "2 * ", mx);
  return s.finish();
}

inline SuiteResult verify_w_bound(const VerifyOptions& o) {
  detail::SuiteBuilder s("w-bound");
  const double lambda = 0.25;
  const double bound = w_pm_bound();
  const double cap = w_pm_cap(lambda);
  std::mt19937_64 rng(o.seed);
  double worst_plus = 1e9, worst_minus = -1e9;
  for (int i = 0; i < 100000; ++i) {
    const auto [wp, wm] = w_pm_sign_check(lambda, detail::random_band(rng, cap, 1.0));
    worst_plus = std::min(worst_plus, wp);
    worst_minus = std::max(worst_minus, wm);
  }
  s.check("w+ . v >= bound on the cap", worst_plus >= bound - 1e-12, "min ", worst_plus, " vs ", bound);
  s.check("w- . v <= -bound on the cap", worst_minus <= -bound + 1e-12, "max ", worst_minus);
  const Direction eq = Direction::normalized(-std::sqrt(5.0 / 89.0), -8.0 / std::sqrt(445.0), 2.0 / std::sqrt(5.0));
  const double at = w_pm_sign_check(lambda, eq).first;
  s.check("equality direction", std::abs(at - bound) <= 1e-12, "w+ . v = ", at);
  const auto [kp, km] = w_pm_sign_check(lambda, Direction::normalized(0, 0, 1));
  s.check("v = k gives (5/4, -5/4)", std::abs(kp - 1.25) <= 1e-15 && std::abs(km + 1.25) <= 1e-15);
  return s.finish();
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"eta",        "lemma5",     "lemma6",        "prop7",
                                                 "thm1",       "thm2-case2", "invariance",    "straighten",
                                                 "table1-bounds", "torus",   "nine-gon",      "w-bound"};
  return names;
}

inline SuiteResult run_suite(const std::string& name, const VerifyOptions& o = {}) {
  if (name == "eta") return verify_eta(o);
  if (name == "lemma5") return verify_lemma5(o);
  if (name == "lemma6") return verify_lemma6(o);
  if (name == "prop7") return verify_prop7(o);
  if (name == "thm1") return verify_thm1(o);
  if (name == "thm2-case2") return verify_thm2_case2(o);
  if (name == "invariance") return verify_invariance(o);
  if (name == "straighten") return verify_straighten(o);
  if (name == "table1-bounds") return verify_table1(o);
  if (name == "torus") return verify_torus(o);
  if (name == "nine-gon") return verify_nine_gon(o);
  if (name == "w-bound") return verify_w_bound(o);
  throw ParameterError("unknown suite \"" + name + "\"");
}

}  // namespace supbridge
