#pragma once

#include "dropinv/forward.hpp"

namespace dropinv {

// Manufactured-solution validation cases.

/// Unperturbed case: v*(x) = |x - x1|^2 + i |x - x2|^2 in the rational2 medium.
struct UnperturbedCase {
  Point x1 = Point(1.0, -1.5, 1.5);
  Point x2 = Point(1.5, 0.0, 1.5);

  cplx vstar(const Point& x) const;
  Eigen::Vector3cd vstar_grad(const Point& x) const;
};

/// Source Theta for the unperturbed case via Green's formula on the unit sphere.
cplx manufactured_theta_unperturbed(const Point& x, double omega, const SurfaceQuadrature& q = {},
                                    const UnperturbedCase& c = {});

/// Perturbed case: u(x) = |x|^2 + b.x + 3 in the complex-rational medium.
struct PerturbedCase {
  Eigen::Vector3d b = Eigen::Vector3d(1, 2, 3);
  Droplet droplet{Point(0.2, 0.3, 0.6), 0.01, 0.95, 1.0, false};

  cplx u(const Point& x) const;
  MediumField medium() const { return MediumField::complex_rational(b); }
};

struct VolumeQuadrature {
  int nr = 24;  // polar rule around the target
  int ns = 24;
  int droplet_nr = 8;  // droplet ball rule
  int droplet_ns = 8;
};

/// Theta = u - w^2 int_B phi (1/k0 - 1) u + w^2 int_Dz phi (1/k0 - 1/(kbar1 eps^2)) u.
cplx manufactured_theta_perturbed(const Point& x, double omega, const PerturbedCase& c = {},
                                  const VolumeQuadrature& vq = {});

/// L2(B(0,1)) distance between two fields.
double l2_error(const FieldFn& a, const FieldFn& b, int nr = 24, int ns = 24);

/// Max |a - b| over the nodes of a sphere rule.
double max_error_on_sphere(const FieldFn& a, const FieldFn& b, const Point& center, double radius, int order = 12);

}  // namespace dropinv
