#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "dropinv/eigensys.hpp"
#include "dropinv/manufactured.hpp"

namespace dropinv::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_text(const fs::path& p, const std::string& text, bool force) {
  ensure_fresh(p, force);
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  if (!os) throw DomainError("cannot write " + p.string());
  os << text;
}

// Timestamps live only here so the artifacts stay byte-reproducible.
void append_log(const fs::path& artifact, const std::string& line) {
  std::ofstream os(artifact.string() + ".log", std::ios::app);
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", std::gmtime(&now));
  os << buf << " " << line << "\n";
}

std::string tau_tag(double tau) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", tau);
  return buf;
}

}  // namespace

void ensure_fresh(const fs::path& p, bool force) {
  if (!force && fs::exists(p)) throw DomainError("output " + p.string() + " already exists (use --force)");
}

RunConfig resolve_config(const Common& common) {
  RunConfig c = common.config_path ? load_config(*common.config_path) : RunConfig{};
  if (const char* env = std::getenv("DROPINV_WORKERS")) {
    try {
      c.workers = std::stoi(env);
    } catch (const std::exception&) {
      throw ConfigError(std::string("DROPINV_WORKERS is not an integer: ") + env);
    }
  }
  if (common.workers) c.workers = *common.workers;
  validate(c);
  return c;
}

int cmd_eig_table(int n_max, const std::optional<std::string>& out, const Common& common, std::ostream& os) {
  if (n_max < 1) throw DomainError("--n-max must be >= 1");
  std::ostringstream csv;
  csv << "n,mu,lambda,omega_sq,e_integral\n";
  for (int n = 1; n <= n_max; ++n) {
    EigenMode m = eigen_mode(n);
    csv << n << "," << fmt12(m.mu) << "," << fmt12(m.lambda) << "," << fmt12(m.omega_sq) << ","
        << fmt12(m.e_integral) << "\n";
  }
  csv << "# config_hash=" << hash_json(json{{"command", "eig-table"}, {"n_max", n_max}}) << "\n";
  if (out)
    write_text(*out, csv.str(), common.force);
  else
    os << csv.str();
  return 0;
}

int cmd_validate_forward(const std::string& which, std::optional<int> n, std::optional<std::uint64_t> seed,
                         const std::optional<std::string>& out, const Common& common, std::ostream& os) {
  RunConfig c = resolve_config(common);
  if (n) c.n = *n;
  if (seed) c.seed = *seed;
  validate(c);
  const double omega = frequency(c);
  const Point theta = c.theta.normalized();
  std::vector<std::pair<std::string, double>> rows;
  if (which == "unperturbed") {
    c.medium = "rational2";
    UnperturbedCase uc;
    CollocationSet colloc = sample_collocation(c.n, c.seed, std::nullopt, c.colloc);
    FieldFn src = [&](const Point& x) { return manufactured_theta_unperturbed(x, omega, c.solver.boundary, uc); };
    DrmSolution sol = solve_unperturbed(MediumField::rational2(), colloc, omega, theta, src, c.solver);
    FieldFn exact = [&](const Point& x) { return uc.vstar(x); };
    FieldFn num = [&](const Point& x) { return sol.expansion(x); };
    rows = {{"l2_error", l2_error(exact, num)},
            {"max_error_r0.3", max_error_on_sphere(exact, num, Point::Zero(), 0.3)},
            {"max_error_r0.6", max_error_on_sphere(exact, num, Point::Zero(), 0.6)}};
  } else if (which == "perturbed") {
    c.medium = "complex_rational";
    PerturbedCase pc;
    pc.droplet.eps = c.droplet.eps;
    pc.droplet.h = c.droplet.h;
    pc.droplet.kbar1 = c.droplet.kbar1;
    CollocationSet colloc = sample_collocation(c.n, c.seed, pc.droplet, c.colloc);
    FieldFn src = [&](const Point& x) { return manufactured_theta_perturbed(x, omega, pc); };
    DrmSolution sol = solve_perturbed(pc.medium(), pc.droplet, colloc, omega, theta, src, c.solver);
    FieldFn exact = [&](const Point& x) { return pc.u(x); };
    FieldFn num = [&](const Point& x) { return sol.expansion(x); };
    const Point probe(0.1, 0.0, 0.0);
    rows = {{"l2_error", l2_error(exact, num)},
            {"max_error_r0.2", max_error_on_sphere(exact, num, probe, 0.2)},
            {"max_error_r0.4", max_error_on_sphere(exact, num, probe, 0.4)}};
  } else {
    throw DomainError("--case must be 'unperturbed' or 'perturbed'");
  }
  std::ostringstream csv;
  csv << "case,n,seed,quantity,value\n";
  for (const auto& [k, v] : rows) csv << which << "," << c.n << "," << c.seed << "," << k << "," << fmt12(v) << "\n";
  json echo = to_json(c);
  echo.erase("workers");
  csv << "# config_hash=" << hash_json(json{{"command", "validate-forward"}, {"case", which}, {"config", echo}})
      << "\n";
  if (out)
    write_text(*out, csv.str(), common.force);
  else
    os << csv.str();
  return 0;
}

int cmd_scan(const std::string& out, const Common& common) {
  RunConfig c = resolve_config(common);
  const fs::path out_path(out);
  const fs::path meta_path = out + ".json";
  ensure_fresh(out_path, common.force);
  ensure_fresh(meta_path, common.force);
  ScanOptions opts = make_scan_options(c);
  if (!common.quiet) {
    opts.progress = [](std::size_t done, std::size_t total) {
      if (done % 500 == 0 || done == total) std::cerr << "scan " << done << "/" << total << "\n";
    };
  }
  append_log(out_path, "scan start hash=" + config_hash(c) + " workers=" + std::to_string(c.workers));
  ScanResult r = scan_contrast(make_medium(c), c.droplet, make_grid(c), frequency(c), c.theta, opts);
  write_xig1(out_path, r.xi);
  json meta{{"artifact", "xi"},
            {"config", to_json(c)},
            {"config_hash", config_hash(c)},
            {"vinf", {r.vinf.real(), r.vinf.imag()}},
            {"reduced_points", r.reduced_points}};
  meta["config"].erase("workers");
  write_text(meta_path, meta.dump(2) + "\n", common.force);
  append_log(out_path, "scan done");
  return 0;
}

namespace {

std::string slice_csv(const RealGrid3& k0, const RealGrid3& pre, const RealGrid3& imag,
                      const std::vector<std::uint8_t>& mask, const MediumField& medium) {
  std::ostringstream os;
  os << "x1,x2,x3,k0_exact,k0_num,pre,imag_residual\n";
  const GridGeometry& g = k0.geometry;
  for (std::size_t i = 0; i < g.dims[0]; ++i)
    for (std::size_t j = 0; j < g.dims[1]; ++j) {
      const std::size_t f = g.index(i, j, 0);
      if (!mask[f]) continue;
      const Point p = g.point(f);
      os << fmt12(p[0]) << "," << fmt12(p[1]) << "," << fmt12(p[2]) << "," << fmt12(medium.k0(p).real()) << ","
         << fmt12(k0.values[f]) << "," << fmt12(pre.values[f]) << "," << fmt12(imag.values[f]) << "\n";
    }
  return os.str();
}

}  // namespace

int cmd_invert(const std::string& input, std::optional<double> tau, std::optional<double> delta,
               const std::string& out, const Common& common, std::ostream& os) {
  RunConfig c = resolve_config(common);
  if (!fs::exists(input)) throw DomainError("input grid not found: " + input);
  if (tau) c.inversion.taus = {*tau};
  if (c.inversion.taus.size() != 1) throw DomainError("invert needs exactly one tau (use --tau)");
  if (delta) c.inversion.delta = *delta;
  validate(c);
  const double t = c.inversion.taus[0];

  const fs::path out_path(out);
  const std::string stem = (out_path.parent_path() / out_path.stem()).string();
  const fs::path k0_path = stem + ".k0.xig1", pre_path = stem + ".pre.xig1", slice_path = stem + ".slice.csv";
  for (const auto& p : {out_path, k0_path, pre_path, slice_path}) ensure_fresh(p, common.force);

  ScalarGrid3 xi = read_xig1(input);
  const MediumField medium = make_medium(c);
  const double omega = frequency(c);
  ScalarGrid3 noisy = synth_noise(xi, t, c.inversion.noise_seed, noise_law_from_string(c.inversion.noise_law));
  const double factor =
      static_cast<double>(c.inversion.fine_points - 1) / static_cast<double>(xi.geometry.dims[0] - 1);
  ScalarGrid3 fine = refine(noisy, factor);
  ReconstructionReport rep = reconstruct_k0(fine, c.inversion.delta, omega, c.inversion.floor_rel);
  apply_metrics(rep, medium);

  std::size_t layer = 0;
  RealGrid3 k0s = slice_axis3(rep.k0_num, c.inversion.slice_x3, &layer);
  RealGrid3 pres = slice_axis3(rep.pre, c.inversion.slice_x3);
  RealGrid3 ims = slice_axis3(rep.k0_imag_residual, c.inversion.slice_x3);
  auto mask = slice_mask_axis3(rep.geometry, rep.valid, layer);
  Metrics ms = metrics(k0s, mask, medium);
  double pre_max = 0, imag_max = 0;
  for (std::size_t f = 0; f < mask.size(); ++f)
    if (mask[f]) {
      pre_max = std::max(pre_max, pres.values[f]);
      imag_max = std::max(imag_max, ims.values[f]);
    }

  const std::string hash = config_hash(c);
  json echo = to_json(c);
  echo.erase("workers");
  // Link back to the scan that produced the input when its sidecar is present.
  json scan_hash = nullptr;
  if (std::ifstream side(input + ".json"); side) {
    json meta = json::parse(side, nullptr, false);
    if (meta.is_object() && meta.contains("config_hash")) scan_hash = meta["config_hash"];
  }
  json report{{"artifact", "reconstruction"},
              {"config", echo},
              {"config_hash", hash},
              {"scan_config_hash", scan_hash},
              {"input", fs::path(input).filename().string()},
              {"tau", t},
              {"delta", c.inversion.delta},
              {"omega", omega},
              {"gre", rep.gre},
              {"gre_slice", ms.gre},
              {"pre_max_slice", pre_max},
              {"imag_residual_max_slice", imag_max},
              {"slice_x3", rep.geometry.origin[2] + layer * rep.geometry.spacing[2]},
              {"valid_points", std::count(rep.valid.begin(), rep.valid.end(), 1)},
              {"excluded_fraction", 1.0 - static_cast<double>(std::count(rep.valid.begin(), rep.valid.end(), 1)) /
                                              static_cast<double>(rep.input_points)},
              {"geometry",
               {{"dims", rep.geometry.dims},
                {"origin", {rep.geometry.origin[0], rep.geometry.origin[1], rep.geometry.origin[2]}},
                {"spacing", {rep.geometry.spacing[0], rep.geometry.spacing[1], rep.geometry.spacing[2]}}}},
              {"k0_grid", k0_path.filename().string()},
              {"pre_grid", pre_path.filename().string()},
              {"slice_csv", slice_path.filename().string()}};
  write_xig1(k0_path, rep.k0_num);
  write_xig1(pre_path, rep.pre);
  write_text(slice_path, slice_csv(k0s, pres, ims, mask, medium) + "# config_hash=" + hash + "\n", common.force);
  write_text(out_path, report.dump(2) + "\n", common.force);
  append_log(out_path, "invert tau=" + tau_tag(t) + " hash=" + hash);
  if (!common.quiet)
    os << "tau=" << tau_tag(t) << " gre=" << fmt12(rep.gre) << " gre_slice=" << fmt12(ms.gre)
       << " pre_max_slice=" << fmt12(pre_max) << "\n";
  return 0;
}

int cmd_report(const std::vector<std::string>& inputs, const std::string& out_dir, const Common& common,
               std::ostream& os) {
  if (inputs.empty()) throw DomainError("report: no input reports given");
  struct Entry {
    double tau;
    json j;
    fs::path path;
  };
  std::vector<Entry> entries;
  for (const auto& p : inputs) {
    if (!fs::exists(p)) throw DomainError("report: input not found: " + p);
    std::ifstream is(p);
    json j;
    try {
      j = json::parse(is);
    } catch (const json::parse_error& e) {
      throw ConfigError("report " + p + ": " + e.what());
    }
    if (j.value("artifact", "") != "reconstruction") throw DomainError("report: " + p + " is not a reconstruction");
    entries.push_back({j.at("tau").get<double>(), j, p});
  }
  for (const auto& e : entries)
    if (e.j.at("geometry") != entries.front().j.at("geometry"))
      throw DomainError("report: geometry mismatch between " + entries.front().path.string() + " and " +
                        e.path.string());
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.tau < b.tau; });

  fs::create_directories(out_dir);
  json hashes = json::array();
  for (const auto& e : entries) hashes.push_back(e.j.at("config_hash"));
  const std::string hash = hash_json(json{{"command", "report"}, {"inputs", hashes}});

  std::ostringstream table;
  table << "tau,gre,gre_slice,pre_max_slice,imag_residual_max_slice,delta,config_hash\n";
  for (const auto& e : entries)
    table << fmt12(e.tau) << "," << fmt12(e.j.at("gre").get<double>()) << ","
          << fmt12(e.j.at("gre_slice").get<double>()) << "," << fmt12(e.j.at("pre_max_slice").get<double>()) << ","
          << fmt12(e.j.at("imag_residual_max_slice").get<double>()) << "," << fmt12(e.j.at("delta").get<double>())
          << "," << e.j.at("config_hash").get<std::string>() << "\n";
  table << "# config_hash=" << hash << "\n";
  write_text(fs::path(out_dir) / "gre_table.csv", table.str(), common.force);

  for (const auto& e : entries) {
    const fs::path src = e.path.parent_path() / e.j.at("slice_csv").get<std::string>();
    std::ifstream is(src);
    if (!is) throw DomainError("report: slice file not found: " + src.string());
    std::ostringstream body;
    body << is.rdbuf();
    write_text(fs::path(out_dir) / ("slice_tau" + tau_tag(e.tau) + ".csv"), body.str(), common.force);
  }
  if (!common.quiet) os << table.str();
  return 0;
}

}  // namespace dropinv::cli
