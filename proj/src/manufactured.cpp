#include "dropinv/manufactured.hpp"

#include <cmath>

namespace dropinv {

cplx UnperturbedCase::vstar(const Point& x) const {
  return cplx((x - x1).squaredNorm(), (x - x2).squaredNorm());
}

Eigen::Vector3cd UnperturbedCase::vstar_grad(const Point& x) const {
  Eigen::Vector3cd g;
  g.real() = 2.0 * (x - x1);
  g.imag() = 2.0 * (x - x2);
  return g;
}

cplx manufactured_theta_unperturbed(const Point& x, double omega, const SurfaceQuadrature& q,
                                    const UnperturbedCase& c) {
  if (!(x.norm() < 1.0)) throw DomainError("manufactured_theta_unperturbed: x must lie inside B(0,1)");
  const double w2 = omega * omega;
  const cplx lap(6.0, 6.0);  // Laplacian of v*
  const SphereRule rule = sphere_rule(required_sphere_order(q, 1.0, 1.0 - x.norm()));
  cplx f1 = 0.0, f2 = 0.0;
  for (Eigen::Index j = 0; j < rule.size(); ++j) {
    Point y = rule.points.col(j);
    Point nu = rule.normals.col(j);
    f1 += rule.weights[j] * phi_normal_deriv(x, y, nu, omega) * (c.vstar(y) - lap / w2);
    f2 += rule.weights[j] * phi(x, y, omega) * c.vstar_grad(y).cwiseProduct(nu.cast<cplx>()).sum();
  }
  const double s = x.squaredNorm();
  return 0.5 * (s + 1.0) * c.vstar(x) - (s - 1.0) * cplx(3.0, 3.0) / w2 + 0.5 * (s - 1.0) * (f1 - f2);
}

cplx PerturbedCase::u(const Point& x) const { return x.squaredNorm() + b.dot(x) + 3.0; }

cplx manufactured_theta_perturbed(const Point& x, double omega, const PerturbedCase& c, const VolumeQuadrature& vq) {
  const MediumField med = c.medium();
  const Droplet& d = c.droplet;
  if ((x - d.center).norm() <= d.eps) throw DomainError("manufactured_theta_perturbed: x inside the droplet");
  const double w2 = omega * omega;
  cplx bulk = volume_potential(x, [&](const Point& y) { return med.contrast(y) * c.u(y); }, omega, vq.nr, vq.ns);
  cplx drop = 0.0;
  if (!d.neutral) {
    BallRule br = ball_rule(vq.droplet_nr, vq.droplet_ns, d.center, d.eps);
    const double kappa = d.inverse_bulk();
    drop = integrate(br, [&](const Point& y) { return phi(x, y, omega) * (med.inverse_k0(y) - kappa) * c.u(y); });
  }
  return c.u(x) - w2 * bulk + w2 * drop;
}

double l2_error(const FieldFn& a, const FieldFn& b, int nr, int ns) {
  BallRule rule = ball_rule(nr, ns);
  double acc = integrate(rule, [&](const Point& y) { return std::norm(a(y) - b(y)); });
  return std::sqrt(acc);
}

double max_error_on_sphere(const FieldFn& a, const FieldFn& b, const Point& center, double radius, int order) {
  SphereRule rule = sphere_rule(order, center, radius);
  double m = 0.0;
  for (Eigen::Index j = 0; j < rule.size(); ++j) {
    Point y = rule.points.col(j);
    m = std::max(m, std::abs(a(y) - b(y)));
  }
  return m;
}

}  // namespace dropinv
