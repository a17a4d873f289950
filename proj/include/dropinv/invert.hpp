#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dropinv/collocation.hpp"
#include "dropinv/forward.hpp"
#include "dropinv/grid.hpp"
#include "dropinv/medium.hpp"

namespace dropinv {

// ---- contrast scan ----

/// How the droplet-free far field v-infinity is obtained.
enum class BackgroundRoute {
  consistent,   // same total-field formulation with the droplet contrast removed
  unperturbed,  // contrast-source formulation
};

/// How xi(z) is evaluated from the perturbed solution.
enum class XiFormula {
  far_field,    // v_inf - u_z_inf from the two back-scatter amplitudes
  reciprocity,  // droplet integral of (1/k1 - 1/k0) u_z v, see PerturbedSystem::reciprocal_contrast
};

struct DropletTemplate {
  double eps = 0.01;
  double h = 0.95;
  double kbar1 = 1.0;
};

struct ScanOptions {
  int n = 200;
  std::uint64_t seed = 7;
  CollocationOptions colloc;
  SolverOptions solver;
  BackgroundRoute route = BackgroundRoute::consistent;
  XiFormula formula = XiFormula::reciprocity;
  int workers = 1;
  std::function<void(std::size_t done, std::size_t total)> progress;
};

struct ScanResult {
  ScalarGrid3 xi;
  cplx vinf = 0.0;
  std::size_t reduced_points = 0;  // droplet positions that dropped nearby collocation nodes
};

/// xi(z) = v_inf(-theta) - u_z_inf(-theta) at every node of the geometry.
ScanResult scan_contrast(const MediumField& medium, const DropletTemplate& droplet, const GridGeometry& geometry,
                         double omega, const Point& theta, const ScanOptions& opts = {});

/// Geometry of an axis-aligned slab of `layers` planes centred on the plane x3 = x3_center.
/// In-plane it spans [-half, half] with `points` nodes per axis.
GridGeometry slab_geometry(std::size_t points, double half, double x3_center, std::size_t layers);

// ---- noise ----

enum class NoiseLaw {
  uniform,  // tau_ijk ~ U[-tau, tau]
  cubic,    // tau_ijk ~ (tau/0.25)^3 U[-0.25, 0.25]
};

std::string to_string(NoiseLaw law);
NoiseLaw noise_law_from_string(const std::string& s);

/// xi_tau = xi + tau_ijk xi with tau_ijk drawn from a generator keyed by (seed, i, j, k).
ScalarGrid3 synth_noise(const ScalarGrid3& xi, double tau, std::uint64_t seed, NoiseLaw law = NoiseLaw::cubic);

// ---- refinement ----

/// Natural cubic spline through equally spaced samples.
class NaturalSpline {
 public:
  NaturalSpline(const Eigen::VectorXcd& values, double spacing);
  cplx operator()(double t) const;  // t measured from the first node

 private:
  Eigen::VectorXcd y_, m_;  // values and second derivatives
  double h_;
};

/// Separable natural cubic spline onto (dims-1)*factor + 1 points per axis over the same extent.
ScalarGrid3 refine(const ScalarGrid3& xi, double factor);
ScalarGrid3 refine_to(const ScalarGrid3& xi, const std::array<std::size_t, 3>& dims);

// ---- reconstruction ----

struct ReconstructionReport {
  GridGeometry geometry;  // delta-interior
  RealGrid3 k0_num;
  RealGrid3 k0_imag_residual;
  std::vector<std::uint8_t> valid;
  std::size_t input_points = 0;  // fine nodes before the interior restriction
  double gre = -1;               // negative until metrics() runs
  RealGrid3 pre;
  std::string config_json;
};

/// 1/k0 = -(1/w^2) [lap xi / (2 xi) - (grad xi . grad xi) / (4 xi^2)], k0_num = Re(1 / estimate).
ReconstructionReport reconstruct_k0(const ScalarGrid3& xi_fine, double delta, double omega,
                                    double floor_rel = 1e-14);

struct Metrics {
  double gre = 0;
  RealGrid3 pre;
  std::size_t valid_count = 0;
  double excluded_fraction = 0;  // of the fine grid outside the valid interior
};

Metrics metrics(const RealGrid3& k0_num, const std::vector<std::uint8_t>& valid, const MediumField& medium,
                std::size_t input_points = 0);

/// Runs metrics() and stores GRE and PRE in the report.
void apply_metrics(ReconstructionReport& report, const MediumField& medium);

/// Plane of a grid nearest to coordinate `x3` along axis 3, as a one-layer grid.
template <class Scalar>
Grid3<Scalar> slice_axis3(const Grid3<Scalar>& g, double x3, std::size_t* layer = nullptr);

std::vector<std::uint8_t> slice_mask_axis3(const GridGeometry& g, const std::vector<std::uint8_t>& mask,
                                           std::size_t layer);

// ---- RBF fit of k0 ----

class RbfFit {
 public:
  RbfFit(PointSet nodes, const Eigen::VectorXcd& values, double cond_limit = 1e12);
  cplx operator()(const Point& x) const;
  const Eigen::VectorXcd& coeffs() const { return gamma_; }
  double nodal_residual() const { return residual_; }

 private:
  PointSet nodes_;
  Eigen::VectorXcd gamma_;
  double residual_ = 0;
};

RbfFit fit_k0_rbf(const PointSet& nodes, const Eigen::VectorXcd& values);

}  // namespace dropinv
