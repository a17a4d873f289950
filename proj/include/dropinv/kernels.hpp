#pragma once

#include <functional>

#include "dropinv/quad.hpp"
#include "dropinv/types.hpp"

namespace dropinv {

/// Helmholtz fundamental solution exp(i w R) / (4 pi R). Throws on x == y.
cplx phi(const Point& x, const Point& y, double omega);

/// Normal derivative of phi with respect to y along normal_y.
cplx phi_normal_deriv(const Point& x, const Point& y, const Point& normal_y, double omega);

/// Radial basis atom f(x) = 1 + |x - center|.
struct RbfAtom {
  Point center = Point::Zero();
  double omega = 1.0;
};

double rbf_value(const RbfAtom& atom, const Point& x);

/// Particular solution fhat with (Laplace + w^2) fhat = 1 + r.
double rbf_particular(const RbfAtom& atom, const Point& x);
Eigen::Vector3d rbf_particular_grad(const RbfAtom& atom, const Point& x);

// Radial profiles of the particular solution. Below r = 1e-4 a Taylor
// expansion replaces the removable singularity.
double particular_radial(double r, double omega);
double particular_radial_deriv(double r, double omega);

enum class SurfaceMode { interior, boundary_limit };

struct SurfaceOptions {
  // Interior targets must keep distance >= kappa * radius / order from the sphere.
  double kappa = 8.0;
  // Relative exterior offset used in boundary_limit mode.
  double boundary_offset = 0.1;
};

/// Smallest admissible target distance to a sphere rule's surface.
double surface_min_distance(const SphereRule& rule, double kappa);

/// J(x) = surface integral of [phi dfhat/dnu - dphi/dnu fhat].
cplx green_surface_integral(const RbfAtom& atom, const SphereRule& rule, const Point& x,
                            SurfaceMode mode = SurfaceMode::interior, const SurfaceOptions& opts = {});

/// J for every (target, center) pair with one fixed rule. Throws NearSingularityError.
Eigen::MatrixXcd green_surface_matrix(const PointSet& targets, const PointSet& centers, double omega,
                                      const SphereRule& rule, double kappa = 8.0);

/// Sphere order policy for targets that approach the surface.
struct SurfaceQuadrature {
  // Relative error of J decays roughly like exp(-1.75 kappa).
  int base_order = 20;
  double kappa = 8.0;
  int max_order = 300;
};

/// Order needed for a target at `distance` from a sphere of `radius`, rounded up to a multiple of 10.
int required_sphere_order(const SurfaceQuadrature& q, double radius, double distance);

/// Like green_surface_matrix but chooses the order per target group.
Eigen::MatrixXcd green_surface_matrix_adaptive(const PointSet& targets, const PointSet& centers, double omega,
                                               const Point& center, double radius, const SurfaceQuadrature& q);

/// Integral of phi(x, y) g(y) over the ball, in polar coordinates centred at x (x inside the ball).
cplx volume_potential(const Point& x, const std::function<cplx(const Point&)>& g, double omega, int nr = 24,
                      int ns = 24, const Point& center = Point::Zero(), double radius = 1.0);

}  // namespace dropinv
