#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "dropinv/invert.hpp"

namespace dropinv::cli {

/// Malformed or schema-violating configuration (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CustomMedium {
  // k0 = (a0 + a1 |x|^2) / (b0 + b1 |x|^2)
  double a0 = 2, a1 = 0, b0 = 1, b1 = 1;
};

struct GridConfig {
  std::string kind = "slab";  // slab | cube
  std::size_t points = 61;
  double half = 0.25;
  double x3 = 0.125;
  std::size_t layers = 31;  // slab only
  // Scans keep collocation nodes out of |x| < this radius, away from the droplet positions.
  double collocation_inner_radius = 0.5;
};

struct InversionConfig {
  std::vector<double> taus{0.0, 0.01, 0.05};
  std::string noise_law = "cubic";
  std::uint64_t noise_seed = 1;
  double delta = 0.1;
  std::size_t fine_points = 201;
  double slice_x3 = 0.125;
  double floor_rel = 1e-14;
};

struct RunConfig {
  std::string medium = "rational2";
  CustomMedium custom;
  DropletTemplate droplet;
  int mode = 1;
  Eigen::Vector3d theta = Eigen::Vector3d(1, 2, 1);
  int n = 200;
  std::uint64_t seed = 7;
  CollocationOptions colloc;
  SolverOptions solver;
  std::string background_route = "consistent";
  std::string xi_formula = "reciprocity";
  GridConfig grid;
  InversionConfig inversion;
  int workers = 1;  // not part of the hash: results never depend on it
};

nlohmann::json to_json(const RunConfig& c);
/// Strict parse: unknown keys and wrong types raise ConfigError.
RunConfig from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

/// Throws DomainError on precondition violations.
void validate(const RunConfig& c);

/// 64-bit FNV-1a of the compact JSON dump, as 16 hex digits.
std::string hash_json(const nlohmann::json& j);

/// hash_json of the config without the worker count.
std::string config_hash(const RunConfig& c);

MediumField make_medium(const RunConfig& c);
GridGeometry make_grid(const RunConfig& c);
ScanOptions make_scan_options(const RunConfig& c);
double frequency(const RunConfig& c);

}  // namespace dropinv::cli
