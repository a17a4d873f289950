#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

using namespace dropinv;
using namespace dropinv::cli;

namespace {
constexpr int kExitParse = 2;
constexpr int kExitPrecondition = 3;
constexpr int kExitNumerical = 4;
}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Droplet-probe reconstruction of a bulk modulus field from back-scattered far fields"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--config", common.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--workers", common.workers, "worker threads (overrides DROPINV_WORKERS)");
  app.add_flag("--force", common.force, "overwrite existing outputs");
  app.add_flag("--quiet", common.quiet, "suppress progress output");
  bool print_defaults = false;
  app.add_flag("--print-defaults", print_defaults, "print the default configuration and exit");

  int n_max = 5;
  std::optional<std::string> eig_out;
  auto* eig = app.add_subcommand("eig-table", "eigensystem table");
  eig->add_option("--n-max", n_max, "number of modes")->required();
  eig->add_option("--out", eig_out, "CSV path (default stdout)");

  std::string which;
  std::optional<int> vf_n;
  std::optional<std::uint64_t> vf_seed;
  std::optional<std::string> vf_out;
  auto* vf = app.add_subcommand("validate-forward", "manufactured-solution checks of the forward solvers");
  vf->add_option("--case", which, "unperturbed | perturbed")->required();
  vf->add_option("--n", vf_n, "collocation count");
  vf->add_option("--seed", vf_seed, "collocation seed");
  vf->add_option("--out", vf_out, "CSV path (default stdout)");

  std::string scan_out;
  auto* scan = app.add_subcommand("scan", "contrast field over droplet positions");
  scan->add_option("--out", scan_out, "XIG1 output path")->required();

  std::string inv_in, inv_out;
  std::optional<double> inv_tau, inv_delta;
  auto* inv = app.add_subcommand("invert", "reconstruct k0 from a contrast grid");
  inv->add_option("--input", inv_in, "XIG1 contrast grid")->required();
  inv->add_option("--tau", inv_tau, "noise level");
  inv->add_option("--delta", inv_delta, "mollifier radius");
  inv->add_option("--out", inv_out, "report JSON path")->required();

  std::vector<std::string> rep_in;
  std::string rep_dir;
  auto* rep = app.add_subcommand("report", "compare reconstruction reports");
  rep->add_option("--inputs", rep_in, "report JSON files");
  rep->add_option("--out-dir", rep_dir, "output directory")->required();

  // Subcommand options may also follow the subcommand name.
  for (auto* sub : {eig, vf, scan, inv, rep}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParse;
  }

  try {
    if (print_defaults) {
      std::cout << to_json(RunConfig{}).dump(2) << "\n";
      return 0;
    }
    if (*eig) return cmd_eig_table(n_max, eig_out, common, std::cout);
    if (*vf) return cmd_validate_forward(which, vf_n, vf_seed, vf_out, common, std::cout);
    if (*scan) return cmd_scan(scan_out, common);
    if (*inv) return cmd_invert(inv_in, inv_tau, inv_delta, inv_out, common, std::cout);
    if (*rep) return cmd_report(rep_in, rep_dir, common, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitParse;
  } catch (const DomainError& e) {
    std::cerr << "precondition violated: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
