#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "config.hpp"

using namespace dropinv;
using namespace dropinv::cli;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path work_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "dropinv_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Run run(const std::string& args, const std::string& env = "") {
  fs::path err = work_dir() / "stderr.txt";
  std::string cmd = env + " " + DROPINV_CLI_PATH + " " + args + " 2>" + err.string();
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = slurp(err);
  return r;
}

fs::path write_json(const std::string& name, const json& j) {
  fs::path p = work_dir() / name;
  std::ofstream(p) << j.dump(2);
  return p;
}

// Small problem that runs in seconds: 5x5x5 droplet positions, 60 collocation points.
json tiny_config() {
  json j = to_json(RunConfig{});
  j.erase("workers");
  j["collocation"]["n"] = 60;
  j["grid"] = {{"kind", "slab"}, {"points", 5}, {"half", 0.05}, {"x3", 0.1}, {"layers", 5}};
  j["inversion"]["fine_points"] = 25;
  j["inversion"]["delta"] = 0.0125;
  j["inversion"]["slice_x3"] = 0.1;
  return j;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("eig-table prints the eigen table with a hash trailer") {
    Run r = run("eig-table --n-max 5");
    REQUIRE(r.code == 0);
    std::istringstream is(r.out);
    std::string line;
    std::getline(is, line);
    CHECK(line == "n,mu,lambda,omega_sq,e_integral");
    std::getline(is, line);
    CHECK(line.rfind("1,1.83659720315,0.2964641357", 0) == 0);
    int rows = 1;
    while (std::getline(is, line) && line[0] != '#') ++rows;
    CHECK(rows == 5);
    CHECK(line.rfind("# config_hash=", 0) == 0);
    CHECK(run("eig-table --n-max 5").out == r.out);
  }

  TEST_CASE("config parsing is strict and the hash ignores workers") {
    RunConfig d;
    RunConfig back = from_json(to_json(d));
    CHECK(to_json(back) == to_json(d));
    RunConfig w = d;
    w.workers = 8;
    CHECK(config_hash(w) == config_hash(d));
    RunConfig other = d;
    other.seed = 8;
    CHECK(config_hash(other) != config_hash(d));
    CHECK(config_hash(d).size() == 16);

    CHECK_THROWS_AS(from_json(json{{"bogus", 1}}), ConfigError);
    CHECK_THROWS_AS(from_json(json{{"droplet", {{"eps", "small"}}}}), ConfigError);
    CHECK_THROWS_AS(from_json(json{{"theta", {1, 2}}}), ConfigError);
    RunConfig bad = d;
    bad.droplet.h = 0.3;
    CHECK_THROWS_AS(validate(bad), DomainError);
    bad = d;
    bad.inversion.noise_law = "gauss";
    CHECK_THROWS_AS(validate(bad), DomainError);
    bad = d;
    bad.xi_formula = "born";
    CHECK_THROWS_AS(validate(bad), DomainError);
    bad = d;
    bad.grid.collocation_inner_radius = 0.95;
    CHECK_THROWS_AS(validate(bad), DomainError);
    CHECK(make_scan_options(d).colloc.inner_radius == d.grid.collocation_inner_radius);
    CHECK(make_scan_options(d).formula == XiFormula::reciprocity);

    Run defaults = run("--print-defaults eig-table --n-max 1");
    REQUIRE(defaults.code == 0);
    CHECK(json::parse(defaults.out) == to_json(d));
  }

  TEST_CASE("exit codes") {
    CHECK(run("no-such-command").code == 2);
    CHECK(run("eig-table").code == 2);
    fs::path unknown = write_json("unknown.json", json{{"colour", "blue"}});
    CHECK(run("--config " + unknown.string() + " scan --out " + (work_dir() / "x.xig1").string()).code == 2);
    fs::path broken = work_dir() / "broken.json";
    std::ofstream(broken) << "{ not json";
    CHECK(run("--config " + broken.string() + " scan --out " + (work_dir() / "x.xig1").string()).code == 2);
    fs::path wide = write_json("wide.json", json{{"droplet", {{"eps", 2.0}}}});
    CHECK(run("--config " + wide.string() + " scan --out " + (work_dir() / "x.xig1").string()).code == 3);

    Run missing = run("invert --tau 0 --input " + (work_dir() / "nowhere.xig1").string() + " --out " +
                      (work_dir() / "r.json").string());
    CHECK(missing.code == 3);
    CHECK(missing.err.find("nowhere.xig1") != std::string::npos);

    CHECK(run("report --out-dir " + (work_dir() / "rep_empty").string()).code == 3);
    CHECK(run("eig-table --n-max 0").code == 3);
    CHECK(run("validate-forward --case sideways").code == 3);
    CHECK(run("eig-table --n-max 2", "DROPINV_WORKERS=lots").code == 0);  // eig-table reads no config
    CHECK(run("scan --out " + (work_dir() / "y.xig1").string(), "DROPINV_WORKERS=lots").code == 2);
  }

  TEST_CASE("scan, invert and report on a tiny grid") {
    fs::path cfg = write_json("tiny.json", tiny_config());
    const std::string c = "--quiet --config " + cfg.string() + " ";
    fs::path xi1 = work_dir() / "xi1.xig1", xi2 = work_dir() / "xi2.xig1";
    REQUIRE(run(c + "scan --out " + xi1.string()).code == 0);
    REQUIRE(run(c + "--workers 2 scan --out " + xi2.string(), "DROPINV_WORKERS=3").code == 0);
    CHECK(slurp(xi1) == slurp(xi2));
    CHECK(slurp(xi1.string() + ".json") == slurp(xi2.string() + ".json"));
    CHECK(fs::exists(xi1.string() + ".log"));
    json meta = json::parse(slurp(xi1.string() + ".json"));
    CHECK(meta["config_hash"].get<std::string>().size() == 16);
    CHECK(!meta["config"].contains("workers"));
    CHECK(read_xig1(xi1).geometry.dims == std::array<std::size_t, 3>{5, 5, 5});

    // Outputs are never overwritten without --force.
    std::string before = slurp(xi1);
    CHECK(run(c + "scan --out " + xi1.string()).code == 3);
    CHECK(slurp(xi1) == before);

    fs::path r0 = work_dir() / "r0.json", r1 = work_dir() / "r1.json", r0b = work_dir() / "r0b.json";
    REQUIRE(run(c + "invert --tau 0.05 --input " + xi1.string() + " --out " + r1.string()).code == 0);
    REQUIRE(run(c + "invert --tau 0 --input " + xi1.string() + " --out " + r0.string()).code == 0);
    REQUIRE(run(c + "invert --tau 0 --input " + xi1.string() + " --out " + r0b.string()).code == 0);
    json j0 = json::parse(slurp(r0));
    json j0b = json::parse(slurp(r0b));
    CHECK(j0["gre"] == j0b["gre"]);
    CHECK(slurp(work_dir() / "r0.k0.xig1") == slurp(work_dir() / "r0b.k0.xig1"));
    CHECK(slurp(work_dir() / "r0.slice.csv") == slurp(work_dir() / "r0b.slice.csv"));
    CHECK(j0["scan_config_hash"] == meta["config_hash"]);
    CHECK(j0["config_hash"] != meta["config_hash"]);
    CHECK(j0["gre"].get<double>() >= 0);
    CHECK(j0["tau"].get<double>() == 0.0);
    CHECK(read_xig1_real(work_dir() / "r0.k0.xig1").geometry.dims[0] == 19);

    fs::path out = work_dir() / "report";
    Run rep = run(c + "report --inputs " + r1.string() + " " + r0.string() + " --out-dir " + out.string());
    REQUIRE(rep.code == 0);
    std::istringstream table(slurp(out / "gre_table.csv"));
    std::string line;
    std::getline(table, line);
    CHECK(line.rfind("tau,gre,", 0) == 0);
    std::getline(table, line);
    CHECK(line.rfind("0,", 0) == 0);
    std::getline(table, line);
    CHECK(line.rfind("0.05,", 0) == 0);
    CHECK(fs::exists(out / "slice_tau0.csv"));
    CHECK(fs::exists(out / "slice_tau0.05.csv"));

    json other = tiny_config();
    other["inversion"]["fine_points"] = 29;
    other["inversion"]["delta"] = 0.011;
    fs::path cfg2 = write_json("tiny2.json", other);
    fs::path r2 = work_dir() / "r2.json";
    REQUIRE(run("--quiet --config " + cfg2.string() + " invert --tau 0 --input " + xi1.string() + " --out " +
                r2.string())
                .code == 0);
    CHECK(run(c + "report --inputs " + r0.string() + " " + r2.string() + " --out-dir " +
              (work_dir() / "report2").string())
              .code == 3);
  }
}
