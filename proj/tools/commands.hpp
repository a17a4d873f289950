#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"

namespace dropinv::cli {

struct Common {
  std::optional<std::string> config_path;
  std::optional<int> workers;
  bool force = false;
  bool quiet = false;
};

RunConfig resolve_config(const Common& common);

int cmd_eig_table(int n_max, const std::optional<std::string>& out, const Common& common, std::ostream& os);
int cmd_validate_forward(const std::string& which, std::optional<int> n, std::optional<std::uint64_t> seed,
                         const std::optional<std::string>& out, const Common& common, std::ostream& os);
int cmd_scan(const std::string& out, const Common& common);
int cmd_invert(const std::string& input, std::optional<double> tau, std::optional<double> delta,
               const std::string& out, const Common& common, std::ostream& os);
int cmd_report(const std::vector<std::string>& inputs, const std::string& out_dir, const Common& common,
               std::ostream& os);

/// Refuses to clobber existing files unless forced.
void ensure_fresh(const std::filesystem::path& p, bool force);

}  // namespace dropinv::cli
