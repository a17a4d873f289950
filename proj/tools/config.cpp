#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "dropinv/eigensys.hpp"

namespace dropinv::cli {

using nlohmann::json;

json to_json(const RunConfig& c) {
  const auto& s = c.solver;
  return json{
      {"medium", {{"preset", c.medium},
                  {"custom", {{"a0", c.custom.a0}, {"a1", c.custom.a1}, {"b0", c.custom.b0}, {"b1", c.custom.b1}}}}},
      {"droplet", {{"eps", c.droplet.eps}, {"h", c.droplet.h}, {"kbar1", c.droplet.kbar1}}},
      {"mode", c.mode},
      {"theta", {c.theta[0], c.theta[1], c.theta[2]}},
      {"collocation",
       {{"n", c.n},
        {"seed", c.seed},
        {"interior_radius", c.colloc.interior_radius},
        {"shell_fraction", c.colloc.shell_fraction},
        {"shell_radius", c.colloc.shell_radius},
        {"exclusion_factor", c.colloc.exclusion_factor}}},
      {"quadrature",
       {{"boundary_order", s.boundary.base_order},
        {"kappa", s.boundary.kappa},
        {"max_order", s.boundary.max_order},
        {"droplet_order", s.droplet_order},
        {"droplet_kappa", s.droplet_kappa},
        {"droplet_ball", {s.droplet_ball_radial, s.droplet_ball_angular}},
        {"far_ball", {s.far_ball_radial, s.far_ball_angular}},
        {"cond_limit", s.cond_limit}}},
      {"background_route", c.background_route},
      {"xi_formula", c.xi_formula},
      {"grid",
       {{"kind", c.grid.kind}, {"points", c.grid.points}, {"half", c.grid.half}, {"x3", c.grid.x3},
        {"layers", c.grid.layers}, {"collocation_inner_radius", c.grid.collocation_inner_radius}}},
      {"inversion",
       {{"taus", c.inversion.taus},
        {"noise_law", c.inversion.noise_law},
        {"noise_seed", c.inversion.noise_seed},
        {"delta", c.inversion.delta},
        {"fine_points", c.inversion.fine_points},
        {"slice_x3", c.inversion.slice_x3},
        {"floor_rel", c.inversion.floor_rel}}},
      {"workers", c.workers},
  };
}

namespace {

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) throw ConfigError(where + ": unknown key '" + it.key() + "'");
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

void read_pair(const json& j, const char* key, int& a, int& b, const std::string& where) {
  if (!j.contains(key)) return;
  std::vector<int> v;
  read(j, key, v, where);
  if (v.size() != 2) throw ConfigError(where + "." + key + ": expected [radial, angular]");
  a = v[0];
  b = v[1];
}

}  // namespace

RunConfig from_json(const json& j) {
  RunConfig c;
  check_keys(j, "config",
             {"medium", "droplet", "mode", "theta", "collocation", "quadrature", "background_route", "xi_formula", "grid",
              "inversion", "workers"});
  if (j.contains("medium")) {
    const json& m = j["medium"];
    check_keys(m, "medium", {"preset", "custom"});
    read(m, "preset", c.medium, "medium");
    if (m.contains("custom")) {
      const json& cu = m["custom"];
      check_keys(cu, "medium.custom", {"a0", "a1", "b0", "b1"});
      read(cu, "a0", c.custom.a0, "medium.custom");
      read(cu, "a1", c.custom.a1, "medium.custom");
      read(cu, "b0", c.custom.b0, "medium.custom");
      read(cu, "b1", c.custom.b1, "medium.custom");
    }
  }
  if (j.contains("droplet")) {
    const json& d = j["droplet"];
    check_keys(d, "droplet", {"eps", "h", "kbar1"});
    read(d, "eps", c.droplet.eps, "droplet");
    read(d, "h", c.droplet.h, "droplet");
    read(d, "kbar1", c.droplet.kbar1, "droplet");
  }
  read(j, "mode", c.mode, "config");
  if (j.contains("theta")) {
    std::vector<double> t;
    read(j, "theta", t, "config");
    if (t.size() != 3) throw ConfigError("config.theta: expected three components");
    c.theta = Eigen::Vector3d(t[0], t[1], t[2]);
  }
  if (j.contains("collocation")) {
    const json& k = j["collocation"];
    check_keys(k, "collocation", {"n", "seed", "interior_radius", "shell_fraction", "shell_radius", "exclusion_factor"});
    read(k, "n", c.n, "collocation");
    read(k, "seed", c.seed, "collocation");
    read(k, "interior_radius", c.colloc.interior_radius, "collocation");
    read(k, "shell_fraction", c.colloc.shell_fraction, "collocation");
    read(k, "shell_radius", c.colloc.shell_radius, "collocation");
    read(k, "exclusion_factor", c.colloc.exclusion_factor, "collocation");
  }
  if (j.contains("quadrature")) {
    const json& q = j["quadrature"];
    check_keys(q, "quadrature",
               {"boundary_order", "kappa", "max_order", "droplet_order", "droplet_kappa", "droplet_ball", "far_ball", "cond_limit"});
    read(q, "boundary_order", c.solver.boundary.base_order, "quadrature");
    read(q, "kappa", c.solver.boundary.kappa, "quadrature");
    read(q, "max_order", c.solver.boundary.max_order, "quadrature");
    read(q, "droplet_order", c.solver.droplet_order, "quadrature");
    read(q, "droplet_kappa", c.solver.droplet_kappa, "quadrature");
    read_pair(q, "droplet_ball", c.solver.droplet_ball_radial, c.solver.droplet_ball_angular, "quadrature");
    read_pair(q, "far_ball", c.solver.far_ball_radial, c.solver.far_ball_angular, "quadrature");
    read(q, "cond_limit", c.solver.cond_limit, "quadrature");
  }
  read(j, "background_route", c.background_route, "config");
  read(j, "xi_formula", c.xi_formula, "config");
  if (j.contains("grid")) {
    const json& g = j["grid"];
    check_keys(g, "grid", {"kind", "points", "half", "x3", "layers", "collocation_inner_radius"});
    read(g, "kind", c.grid.kind, "grid");
    read(g, "points", c.grid.points, "grid");
    read(g, "half", c.grid.half, "grid");
    read(g, "x3", c.grid.x3, "grid");
    read(g, "layers", c.grid.layers, "grid");
    read(g, "collocation_inner_radius", c.grid.collocation_inner_radius, "grid");
  }
  if (j.contains("inversion")) {
    const json& v = j["inversion"];
    check_keys(v, "inversion", {"taus", "noise_law", "noise_seed", "delta", "fine_points", "slice_x3", "floor_rel"});
    read(v, "taus", c.inversion.taus, "inversion");
    read(v, "noise_law", c.inversion.noise_law, "inversion");
    read(v, "noise_seed", c.inversion.noise_seed, "inversion");
    read(v, "delta", c.inversion.delta, "inversion");
    read(v, "fine_points", c.inversion.fine_points, "inversion");
    read(v, "slice_x3", c.inversion.slice_x3, "inversion");
    read(v, "floor_rel", c.inversion.floor_rel, "inversion");
  }
  read(j, "workers", c.workers, "config");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DomainError("cannot open config file " + path);
  json j;
  try {
    j = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  return from_json(j);
}

void validate(const RunConfig& c) {
  static const std::set<std::string> media{"homogeneous", "rational2", "complex_rational", "custom"};
  if (!media.count(c.medium)) throw DomainError("medium.preset: unknown preset '" + c.medium + "'");
  Droplet probe{Point::Zero(), c.droplet.eps, c.droplet.h, c.droplet.kbar1, false};
  probe.validate();
  if (c.mode < 1) throw DomainError("mode must be >= 1");
  if (!(c.theta.norm() > 0)) throw DomainError("theta must be nonzero");
  if (c.n < 1) throw DomainError("collocation.n must be >= 1");
  if (c.background_route != "consistent" && c.background_route != "unperturbed")
    throw DomainError("background_route must be 'consistent' or 'unperturbed'");
  if (c.xi_formula != "reciprocity" && c.xi_formula != "far_field")
    throw DomainError("xi_formula must be 'reciprocity' or 'far_field'");
  if (c.grid.kind != "slab" && c.grid.kind != "cube") throw DomainError("grid.kind must be 'slab' or 'cube'");
  if (c.grid.points < 2 || !(c.grid.half > 0)) throw DomainError("grid: need points >= 2 and half > 0");
  if (c.grid.kind == "slab" && c.grid.layers < 1) throw DomainError("grid.layers must be >= 1");
  if (!(c.grid.collocation_inner_radius >= 0 && c.grid.collocation_inner_radius < c.colloc.interior_radius))
    throw DomainError("grid.collocation_inner_radius must lie in [0, collocation.interior_radius)");
  for (double t : c.inversion.taus)
    if (!(t >= 0)) throw DomainError("inversion.taus must be >= 0");
  noise_law_from_string(c.inversion.noise_law);
  if (!(c.inversion.delta > 0)) throw DomainError("inversion.delta must be positive");
  if (c.inversion.fine_points < c.grid.points) throw DomainError("inversion.fine_points must be >= grid.points");
  if (c.workers < 1) throw DomainError("workers must be >= 1");
}

std::string hash_json(const json& j) {
  const std::string s = j.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_hash(const RunConfig& c) {
  json j = to_json(c);
  j.erase("workers");
  return hash_json(j);
}

MediumField make_medium(const RunConfig& c) {
  if (c.medium == "homogeneous") return MediumField::homogeneous();
  if (c.medium == "rational2") return MediumField::rational2();
  if (c.medium == "complex_rational") return MediumField::complex_rational();
  if (c.medium == "custom") {
    CustomMedium m = c.custom;
    return MediumField::custom(
        [m](const Point& x) {
          double s = x.squaredNorm();
          return cplx((m.b0 + m.b1 * s) / (m.a0 + m.a1 * s));
        },
        "custom");
  }
  throw DomainError("unknown medium preset '" + c.medium + "'");
}

GridGeometry make_grid(const RunConfig& c) {
  const std::size_t layers = c.grid.kind == "cube" ? c.grid.points : c.grid.layers;
  const double center = c.grid.kind == "cube" ? 0.0 : c.grid.x3;
  return slab_geometry(c.grid.points, c.grid.half, center, layers);
}

ScanOptions make_scan_options(const RunConfig& c) {
  ScanOptions o;
  o.n = c.n;
  o.seed = c.seed;
  o.colloc = c.colloc;
  o.colloc.inner_radius = c.grid.collocation_inner_radius;
  o.solver = c.solver;
  o.route = c.background_route == "unperturbed" ? BackgroundRoute::unperturbed : BackgroundRoute::consistent;
  o.formula = c.xi_formula == "far_field" ? XiFormula::far_field : XiFormula::reciprocity;
  o.workers = c.workers;
  return o;
}

double frequency(const RunConfig& c) { return eigen_mode(c.mode).mu; }

}  // namespace dropinv::cli
