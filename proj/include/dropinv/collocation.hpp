#pragma once

#include <cstdint>
#include <optional>

#include "dropinv/medium.hpp"

namespace dropinv {

struct CollocationSet {
  PointSet points;
  Eigen::Index size() const { return points.cols(); }
};

/// Layout of the collocation cloud.
struct CollocationOptions {
  // Halton points fill inner_radius <= |x| <= interior_radius.
  double inner_radius = 0.0;
  double interior_radius = 0.9;
  // A Fibonacci shell of round(shell_fraction * n) points sits at shell_radius.
  double shell_fraction = 0.3;
  double shell_radius = 0.97;
  // Points closer than exclusion_factor * eps to a droplet center are rejected.
  double exclusion_factor = 2.0;
};

/// Deterministic low-discrepancy points in B(0,1), optionally avoiding a droplet.
CollocationSet sample_collocation(int n, std::uint64_t seed, const std::optional<Droplet>& exclude = std::nullopt,
                                  const CollocationOptions& opts = {});

/// Radical inverse of i in the given base.
double radical_inverse(std::uint64_t i, unsigned base);

}  // namespace dropinv
