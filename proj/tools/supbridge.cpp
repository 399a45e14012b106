// Command-line front end: crookedness, sphere scans, region N data,
// constructions and verification suites.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "supbridge/supbridge.hpp"

namespace fs = std::filesystem;
using namespace supbridge;

namespace {

enum Exit { kOk = 0, kVerifyFailed = 1, kUsage = 2, kDegenerate = 3, kNumerical = 4 };

struct KnotArgs {
  std::string construct;
  std::string file;
  int p = 2, q = 3, p2 = 0, q2 = 0;
  double alpha = 0.0;
  double lambda = 0.125;
  double epsilon = 0.01;
  int n = 2;
  int twists = 1;
  long seed = -1;
  std::string first = "torus-polygon";
  std::string second = "torus-polygon";
};

void add_knot_options(CLI::App* cmd, KnotArgs& a) {
  auto* c = cmd->add_option("--construct", a.construct,
                            "eta | nine-gon | torus-polygon | braided | connected-sum | bar-k-lambda | check-k-lambda");
  auto* f = cmd->add_option("--file", a.file, "knot document (JSON)");
  c->excludes(f);
  f->excludes(c);
  cmd->add_option("--p", a.p, "torus type p");
  cmd->add_option("--q", a.q, "torus type q");
  cmd->add_option("--p2", a.p2, "torus type p of the second summand (default --p)");
  cmd->add_option("--q2", a.q2, "torus type q of the second summand (default --q)");
  cmd->add_option("--alpha", a.alpha, "descending edge angle, in (pi p/q, pi); 0 picks the midpoint");
  cmd->add_option("--lambda", a.lambda, "connected-sum scale, in (0, 1/4]");
  cmd->add_option("--epsilon", a.epsilon, "braid perturbation size, in [0, 1]");
  cmd->add_option("--n", a.n, "braid strands");
  cmd->add_option("--twists", a.twists, "full twists per braiding wedge");
  cmd->add_option("--seed", a.seed, "pick a random admissible perturbation with this seed");
  cmd->add_option("--first", a.first, "first summand: torus-polygon | braided | eta");
  cmd->add_option("--second", a.second, "second summand: torus-polygon | braided | eta");
}

json summand_doc(const std::string& kind, const KnotArgs& a, bool second) {
  if (kind == "torus-polygon") {
    json p = {{"p", second && a.p2 ? a.p2 : a.p}, {"q", second && a.q2 ? a.q2 : a.q}};
    if (a.alpha != 0.0) p["alpha"] = a.alpha;
    return to_json(construction_document(kind, p));
  }
  if (kind == "braided") {
    json p = {{"n", a.n}, {"epsilon", a.epsilon}, {"twists", a.twists}};
    if (a.seed >= 0) p["seed"] = a.seed;
    return to_json(construction_document(kind, p));
  }
  if (kind == "eta") return to_json(construction_document(kind));
  throw ParameterError("unknown summand \"" + kind + "\"");
}

KnotDocument knot_document(const KnotArgs& a) {
  if (!a.file.empty()) return load_document(a.file);
  if (a.construct.empty()) throw ParameterError("need --construct or --file");
  const std::string& c = a.construct;
  if (c == "eta" || c == "nine-gon") return construction_document(c);
  if (c == "torus-polygon" || c == "braided") {
    KnotDocument d = document_from_json(summand_doc(c, a, false));
    return d;
  }
  if (c == "connected-sum" || c == "bar-k-lambda" || c == "check-k-lambda") {
    return construction_document(c, {{"lambda", a.lambda},
                                     {"first", summand_doc(a.first, a, false)},
                                     {"second", summand_doc(a.second, a, true)}});
  }
  throw ParameterError("unknown construction \"" + c + "\"");
}

Direction parse_direction(const std::string& s) {
  std::stringstream ss(s);
  std::string item;
  std::vector<double> xs;
  while (std::getline(ss, item, ',')) {
    try {
      xs.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ParameterError("bad direction component \"" + item + "\"");
    }
  }
  if (xs.size() != 3) throw ParameterError("direction must be x,y,z");
  const Vec3 v(xs[0], xs[1], xs[2]);
  if (std::abs(v.norm() - 1.0) > 1e-6) {
    std::cerr << "warning: direction normalized (norm was " << v.norm() << ")\n";
  }
  return Direction::normalized(v);
}

int cmd_crook(const KnotArgs& a, const std::string& dir, bool as_json) {
  const AnyKnot k = realize(knot_document(a));
  const CrookednessReport r = crook(k, parse_direction(dir));
  if (as_json) {
    std::cout << to_json(r).dump(2) << "\n";
  } else {
    std::cout << "count " << r.count << "\nwitnesses";
    for (double w : r.witnesses) std::cout << " " << w;
    std::cout << "\ndegenerate " << (r.degenerate ? "yes" : "no") << "\n";
  }
  return r.degenerate ? kDegenerate : kOk;
}

int cmd_scan(const KnotArgs& a, const std::string& mode, std::size_t m, bool as_json) {
  if (m < 100) throw ParameterError("-M must be at least 100");
  if (mode != "max" && mode != "min") throw ParameterError("--mode must be max or min");
  const AnyKnot k = realize(knot_document(a));
  const ScanResult r = scan_any(k, SphereGrid(m), mode == "max" ? ScanMode::Max : ScanMode::Min);
  if (as_json) {
    std::cout << to_json(r).dump(2) << "\n";
  } else {
    const Vec3& w = r.witness.vec();
    std::cout << mode << " " << r.extremal << "\nwitness " << w.x() << "," << w.y() << "," << w.z()
              << "\nevaluated " << r.evaluated << "\ndegenerate " << r.degenerate
              << (r.unstable ? "\nunstable\n" : "\n");
  }
  return kOk;
}

int cmd_region_n(int resolution, const std::string& out, bool as_json) {
  if (resolution < 90) throw ParameterError("--resolution must be at least 90");
  const fs::path dir(out.empty() ? "." : out);
  fs::create_directories(dir);
  const RegionBoundary b = RegionBoundary::sample(resolution);
  {
    std::ofstream f(dir / "boundary.csv");
    f.precision(12);
    f << "alpha,xi,x,y\n";
    for (std::size_t j = 0; j < b.size(); ++j) {
      f << b.alpha[j] << "," << b.xi[j] << "," << b.xi[j] * std::cos(b.alpha[j]) << ","
        << b.xi[j] * std::sin(b.alpha[j]) << "\n";
    }
  }
  {
    // Projection of the upper hemisphere to the unit disk; 1 marks N.
    std::ofstream f(dir / "membership.csv");
    f << "x,y,in_n\n";
    const int cells = resolution;
    for (int i = 0; i <= cells; ++i) {
      for (int j = 0; j <= cells; ++j) {
        const double x = -1.0 + 2.0 * i / cells, y = -1.0 + 2.0 * j / cells;
        if (x * x + y * y >= 1.0) continue;
        const Direction v = Direction::normalized(x, y, std::sqrt(1.0 - x * x - y * y));
        f << x << "," << y << "," << (in_n_polar(v) == Membership::Inside ? 1 : 0) << "\n";
      }
    }
  }
  const auto [lo, hi] = std::minmax_element(b.xi.begin(), b.xi.end());
  if (as_json) {
    std::cout << json{{"rows", b.size()}, {"xi_min", *lo}, {"xi_max", *hi},
                      {"boundary", (dir / "boundary.csv").string()},
                      {"membership", (dir / "membership.csv").string()}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << "rows " << b.size() << "\nxi range [" << *lo << ", " << *hi << "]\nwrote "
              << (dir / "boundary.csv").string() << ", " << (dir / "membership.csv").string() << "\n";
  }
  return kOk;
}

int cmd_construct(const KnotArgs& a, const std::string& out, bool explicit_geometry) {
  KnotDocument d = knot_document(a);
  if (explicit_geometry) {
    const AnyKnot k = realize(d);
    if (auto p = std::get_if<PolyKnot>(&k)) {
      d = to_document(*p);
    } else if (auto pw = std::get_if<PiecewiseKnot>(&k)) {
      d = to_document(*pw);
    } else if (auto t = std::get<SmoothCurve>(k).as<TrigKnot>()) {
      d = to_document(*t);
    } else {
      throw ParameterError("this construction has no explicit trigonometric form");
    }
  }
  const std::string text = print(d);
  if (out.empty()) {
    std::cout << text << "\n";
  } else {
    std::ofstream(out) << text << "\n";
    std::cout << "wrote " << out << "\n";
  }
  return kOk;
}

int cmd_verify(const std::string& suite, std::size_t m, std::uint64_t seed, bool as_json) {
  VerifyOptions o;
  o.grid = m;
  o.seed = seed;
  std::vector<std::string> names;
  if (suite == "all") {
    names = suite_names();
  } else {
    names.push_back(suite);
  }
  bool all = true;
  json results = json::array();
  for (const auto& name : names) {
    const SuiteResult r = run_suite(name, o);
    all = all && r.passed;
    if (as_json) {
      results.push_back(to_json(r));
      continue;
    }
    std::cout << name << ": " << (r.passed ? "pass" : "FAIL") << " (" << r.seconds << " s)\n";
    for (const auto& c : r.checks) {
      std::cout << "  [" << (c.passed ? "ok" : "FAIL") << "] " << c.name;
      if (!c.detail.empty()) std::cout << ": " << c.detail;
      std::cout << "\n";
    }
  }
  if (as_json) std::cout << json{{"passed", all}, {"suites", results}}.dump(2) << "\n";
  return all ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Directional crookedness and superbridge estimates for embedded knots"};
  app.require_subcommand(1);
  bool as_json = false;
  app.add_flag("--json", as_json, "machine-readable output");

  KnotArgs crook_args, scan_args, construct_args;
  std::string dir = "0,0,1";
  auto* crook = app.add_subcommand("crook", "count maxima of the projection onto one direction");
  add_knot_options(crook, crook_args);
  crook->add_option("--dir", dir, "direction x,y,z (normalized if needed)");
  crook->add_flag("--json", as_json, "machine-readable output");

  std::string mode = "max";
  std::size_t m = 20000;
  auto* scan = app.add_subcommand("scan", "extremal crookedness over a sphere grid");
  add_knot_options(scan, scan_args);
  scan->add_option("--mode", mode, "max or min");
  scan->add_option("-M", m, "grid size");
  scan->add_flag("--json", as_json, "machine-readable output");

  int resolution = 360;
  std::string out;
  auto* region = app.add_subcommand("region-n", "boundary curve and membership raster of the region N");
  region->add_option("--resolution", resolution, "boundary rows and raster cells per side");
  region->add_option("--out", out, "output directory");
  region->add_flag("--json", as_json, "machine-readable output");

  std::string construct_out;
  bool explicit_geometry = false;
  auto* construct = app.add_subcommand("construct", "emit a knot document");
  add_knot_options(construct, construct_args);
  construct->add_option("--out", construct_out, "output file");
  construct->add_flag("--explicit", explicit_geometry, "write vertices or coefficients instead of parameters");

  std::string suite;
  std::size_t verify_m = 20000;
  std::uint64_t verify_seed = 1;
  auto* verify = app.add_subcommand("verify", "run a verification suite (or all)");
  verify->add_option("suite", suite, "suite name or all")->required();
  verify->add_option("-M", verify_m, "grid size for sphere scans");
  verify->add_option("--seed", verify_seed, "random seed");
  verify->add_flag("--json", as_json, "machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*crook) return cmd_crook(crook_args, dir, as_json);
    if (*scan) return cmd_scan(scan_args, mode, m, as_json);
    if (*region) return cmd_region_n(resolution, out, as_json);
    if (*construct) return cmd_construct(construct_args, construct_out, explicit_geometry);
    if (*verify) {
      const auto& names = suite_names();
      if (suite != "all" && std::find(names.begin(), names.end(), suite) == names.end()) {
        std::cerr << "unknown suite \"" << suite << "\"\n";
        return kUsage;
      }
      return cmd_verify(suite, verify_m, verify_seed, as_json);
    }
  } catch (const DegenerateError& e) {
    std::cerr << "degenerate: " << e.what() << "\n";
    return kDegenerate;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
