#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "supbridge/constructions.hpp"
#include "supbridge/crookedness.hpp"
#include "supbridge/curves.hpp"
#include "supbridge/errors.hpp"
#include "supbridge/search.hpp"

namespace supbridge {

using json = nlohmann::json;

/// Any knot the tools can count on.
using AnyKnot = std::variant<PolyKnot, SmoothCurve, PiecewiseKnot>;

/// Serialized knot. `kind` is "polygonal", "trig", "piecewise" or
/// "construction"; explicit geometry lives in `data`, construction
/// parameters in `params` (with the construction keyword in `name`).
struct KnotDocument {
  std::string kind;
  std::string name;
  json params = json::object();
  json data = json::object();
  std::string note;

  bool operator==(const KnotDocument&) const = default;
};

inline json to_json(const KnotDocument& d) {
  json j;
  j["kind"] = d.kind;
  if (!d.name.empty()) j["name"] = d.name;
  if (!d.params.empty()) j["params"] = d.params;
  if (!d.data.empty()) j["data"] = d.data;
  if (!d.note.empty()) j["note"] = d.note;
  return j;
}

inline KnotDocument document_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw ParameterError("knot document needs a string \"kind\"");
  }
  KnotDocument d;
  d.kind = j["kind"].get<std::string>();
  if (j.contains("name")) d.name = j["name"].get<std::string>();
  if (j.contains("params")) d.params = j["params"];
  if (j.contains("data")) d.data = j["data"];
  if (j.contains("note")) d.note = j["note"].get<std::string>();
  if (d.kind != "polygonal" && d.kind != "trig" && d.kind != "piecewise" && d.kind != "construction") {
    throw ParameterError("unknown knot kind \"" + d.kind + "\"");
  }
  return d;
}

inline std::string print(const KnotDocument& d) { return to_json(d).dump(2); }

inline KnotDocument parse(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParameterError(std::string("malformed knot document: ") + e.what());
  }
  return document_from_json(j);
}

inline KnotDocument load_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

// ---------------------------------------------------------------------------
// Explicit geometry
// ---------------------------------------------------------------------------

namespace detail {

inline json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

inline Vec3 json_vec(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ParameterError("expected a point [x, y, z]");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

inline json vec_list(const std::vector<Vec3>& vs) {
  json a = json::array();
  for (const auto& v : vs) a.push_back(vec_json(v));
  return a;
}

inline std::vector<Vec3> json_vec_list(const json& j) {
  if (!j.is_array()) throw ParameterError("expected a list of points");
  std::vector<Vec3> out;
  for (const auto& e : j) out.push_back(json_vec(e));
  return out;
}

inline json map_json(const AffineMap& m) {
  json rows = json::array();
  for (int r = 0; r < 3; ++r) {
    rows.push_back(json::array({m.linear().matrix()(r, 0), m.linear().matrix()(r, 1),
                                m.linear().matrix()(r, 2)}));
  }
  return {{"linear", rows}, {"translation", vec_json(m.translation())}};
}

inline AffineMap json_map(const json& j) {
  Mat3 m;
  const json& rows = j.at("linear");
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) m(r, c) = rows.at(r).at(c).get<double>();
  }
  return AffineMap(LinearMap(m), json_vec(j.at("translation")));
}

}  // namespace detail

inline KnotDocument to_document(const PolyKnot& k) {
  KnotDocument d;
  d.kind = "polygonal";
  d.data = {{"vertices", detail::vec_list(k.vertices())}};
  return d;
}

inline KnotDocument to_document(const TrigKnot& k) {
  KnotDocument d;
  d.kind = "trig";
  d.data = {{"constant", detail::vec_json(k.constant())},
            {"cos", detail::vec_list(k.cos_coefficients())},
            {"sin", detail::vec_list(k.sin_coefficients())}};
  return d;
}

/// Arcs must run along trigonometric curves to be written out explicitly.
inline KnotDocument to_document(const PiecewiseKnot& k) {
  json pieces = json::array();
  for (const auto& p : k.pieces()) {
    if (auto s = p.segment()) {
      pieces.push_back({{"segment", {detail::vec_json(s->a), detail::vec_json(s->b)}}});
      continue;
    }
    const Arc& a = *p.arc();
    const TrigKnot* t = a.curve.as<TrigKnot>();
    if (!t) throw ParameterError("only trigonometric arcs can be serialized explicitly");
    pieces.push_back({{"arc",
                       {{"curve", to_document(*t).data},
                        {"map", detail::map_json(a.map)},
                        {"t0", a.t0},
                        {"t1", a.t1}}}});
  }
  KnotDocument d;
  d.kind = "piecewise";
  d.data = {{"pieces", pieces}, {"singular", detail::vec_list(k.singular_points())}};
  return d;
}

namespace detail {

inline TrigKnot trig_from_data(const json& data) {
  return TrigKnot(json_vec(data.at("constant")), json_vec_list(data.at("cos")),
                  json_vec_list(data.at("sin")));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Named constructions
// ---------------------------------------------------------------------------

inline KnotDocument construction_document(const std::string& name, json params = json::object()) {
  KnotDocument d;
  d.kind = "construction";
  d.name = name;
  d.params = std::move(params);
  return d;
}

namespace detail {

inline double param_or(const json& p, const char* key, double fallback) {
  return p.contains(key) ? p[key].get<double>() : fallback;
}

inline int int_param_or(const json& p, const char* key, int fallback) {
  return p.contains(key) ? p[key].get<int>() : fallback;
}

inline BraidLambdaParams braid_params_from(const json& p) {
  const int n = int_param_or(p, "n", 2);
  BraidLambdaParams b;
  if (p.contains("seed")) {
    std::mt19937_64 rng(p["seed"].get<std::uint64_t>());
    b = random_braid_params(n, rng);
  } else {
    b = default_braid_params(n, int_param_or(p, "twists", 1));
  }
  if (p.contains("a")) b.a = p["a"].get<double>();
  if (p.contains("theta")) b.theta = p["theta"].get<std::vector<double>>();
  return b;
}

}  // namespace detail

inline AnyKnot realize(const KnotDocument& d);

namespace detail {

inline Summand summand_from(const KnotDocument& d) {
  if (d.kind == "construction" && d.name == "braided") {
    const json& p = d.params;
    return summand(braided(make_lambda(braid_params_from(p)), param_or(p, "epsilon", 0.01)));
  }
  AnyKnot k = realize(d);
  if (auto poly = std::get_if<PolyKnot>(&k)) return summand(*poly);
  if (auto smooth = std::get_if<SmoothCurve>(&k)) {
    return summand(*smooth, int_param_or(d.params, "strands", 1));
  }
  throw ParameterError("connected-sum summands must be polygons or smooth curves");
}

inline ConnectedSum sum_from(const json& p) {
  if (!p.contains("first") || !p.contains("second")) {
    throw ParameterError("connected sum needs \"first\" and \"second\" summands");
  }
  return connected_sum(summand_from(document_from_json(p["first"])),
                       summand_from(document_from_json(p["second"])),
                       param_or(p, "lambda", 0.125));
}

}  // namespace detail

/// Builds the knot a document describes.
inline AnyKnot realize(const KnotDocument& d) {
  try {
    if (d.kind == "polygonal") return PolyKnot(detail::json_vec_list(d.data.at("vertices")));
    if (d.kind == "trig") return SmoothCurve(detail::trig_from_data(d.data));
    if (d.kind == "piecewise") {
      Chain c;
      for (const auto& p : d.data.at("pieces")) {
        if (p.contains("segment")) {
          c.push_back(Segment{detail::json_vec(p["segment"].at(0)), detail::json_vec(p["segment"].at(1))});
        } else {
          const json& a = p.at("arc");
          c.push_back(Arc{SmoothCurve(detail::trig_from_data(a.at("curve"))), detail::json_map(a.at("map")),
                          a.at("t0").get<double>(), a.at("t1").get<double>()});
        }
      }
      std::vector<Vec3> sing;
      if (d.data.contains("singular")) sing = detail::json_vec_list(d.data["singular"]);
      return PiecewiseKnot(std::move(c), std::move(sing));
    }
    const json& p = d.params;
    if (d.name == "eta") return SmoothCurve(eta());
    if (d.name == "nine-gon") return nine_gon();
    if (d.name == "torus-polygon") {
      return torus_polygon({detail::int_param_or(p, "p", 2), detail::int_param_or(p, "q", 3),
                            detail::param_or(p, "alpha", 0.0)});
    }
    if (d.name == "braided") {
      return SmoothCurve(braided(make_lambda(detail::braid_params_from(p)),
                                 detail::param_or(p, "epsilon", 0.01)));
    }
    if (d.name == "connected-sum") return detail::sum_from(p).knot;
    if (d.name == "bar-k-lambda") {
      return bar_k_lambda(detail::sum_from(p), detail::param_or(p, "corner", 0.5));
    }
    if (d.name == "check-k-lambda") {
      const ConnectedSum cs = detail::sum_from(p);
      return check_k_lambda(cs, bar_k_lambda(cs), detail::param_or(p, "tail", 0.05));
    }
    throw ParameterError("unknown construction \"" + d.name + "\"");
  } catch (const json::exception& e) {
    throw ParameterError(std::string("malformed knot document: ") + e.what());
  }
}

/// Default document for a construction keyword, with the summands of the
/// connected-sum family taken to be two (2,3) torus polygons.
inline KnotDocument named_construction(const std::string& name) {
  if (name == "connected-sum" || name == "bar-k-lambda" || name == "check-k-lambda") {
    const json t = to_json(construction_document("torus-polygon", {{"p", 2}, {"q", 3}}));
    json p = {{"lambda", 0.125}, {"first", t}, {"second", t}};
    if (name == "check-k-lambda") {
      const json b = to_json(construction_document("braided", {{"n", 2}, {"epsilon", 0.01}}));
      p["first"] = b;
      p["second"] = b;
    }
    return construction_document(name, p);
  }
  return construction_document(name);
}

// ---------------------------------------------------------------------------
// Dispatch over AnyKnot
// ---------------------------------------------------------------------------

inline CrookednessReport crook(const AnyKnot& k, const Direction& v) {
  if (auto p = std::get_if<PolyKnot>(&k)) return crook_poly(*p, v);
  if (auto s = std::get_if<SmoothCurve>(&k)) return crook_smooth(*s, v);
  return crook_path(std::get<PiecewiseKnot>(k), v);
}

inline ScanResult scan_any(const AnyKnot& k, const SphereGrid& g, ScanMode mode) {
  if (auto p = std::get_if<PolyKnot>(&k)) return scan(PolyCounter(*p), g, mode);
  if (auto s = std::get_if<SmoothCurve>(&k)) return scan(PathCounter(*s), g, mode);
  return scan(PathCounter(std::get<PiecewiseKnot>(k)), g, mode);
}

inline CertifyReport certify_any(const AnyKnot& k, int bound, const SphereGrid& g) {
  if (auto p = std::get_if<PolyKnot>(&k)) return certify_bound(PolyCounter(*p), bound, g);
  if (auto s = std::get_if<SmoothCurve>(&k)) return certify_bound(PathCounter(*s), bound, g);
  return certify_bound(PathCounter(std::get<PiecewiseKnot>(k)), bound, g);
}

inline json direction_json(const Direction& v) { return detail::vec_json(v.vec()); }

inline json to_json(const CrookednessReport& r) {
  return {{"direction", direction_json(r.direction)},
          {"count", r.count},
          {"witnesses", r.witnesses},
          {"degenerate", r.degenerate}};
}

inline json to_json(const ScanResult& r) {
  json hist = json::object();
  for (const auto& [c, n] : r.histogram) hist[std::to_string(c)] = n;
  json wit = json::array();
  for (const auto& w : r.witnesses) wit.push_back(direction_json(w));
  return {{"mode", r.mode == ScanMode::Max ? "max" : "min"},
          {"extremal", r.extremal},
          {"witness", direction_json(r.witness)},
          {"witnesses", wit},
          {"histogram", hist},
          {"degenerate", r.degenerate},
          {"evaluated", r.evaluated},
          {"unstable", r.unstable}};
}

inline json to_json(const CertifyReport& r) {
  json viol = json::array();
  for (const auto& w : r.violations) viol.push_back(direction_json(w));
  return {{"bound", r.bound},         {"passed", r.passed},         {"observed_max", r.observed_max},
          {"violations", viol},       {"evaluated", r.evaluated}, {"degenerate", r.degenerate}};
}

}  // namespace supbridge
