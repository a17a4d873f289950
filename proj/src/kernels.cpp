#include "dropinv/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace dropinv {

namespace {
constexpr double kTinyRadius = 1e-4;
constexpr cplx kI(0.0, 1.0);
}  // namespace

cplx phi(const Point& x, const Point& y, double omega) {
  double r = (x - y).norm();
  if (r == 0.0) throw DomainError("phi: coincident points");
  return std::exp(kI * (omega * r)) / (4.0 * kPi * r);
}

cplx phi_normal_deriv(const Point& x, const Point& y, const Point& normal_y, double omega) {
  Point d = y - x;
  double r = d.norm();
  if (r == 0.0) throw DomainError("phi_normal_deriv: coincident points");
  cplx p = std::exp(kI * (omega * r)) / (4.0 * kPi * r);
  return p * (kI * omega - 1.0 / r) * (d.dot(normal_y) / r);
}

double rbf_value(const RbfAtom& atom, const Point& x) { return 1.0 + (x - atom.center).norm(); }

double particular_radial(double r, double omega) {
  double w2 = omega * omega;
  if (r < kTinyRadius) {
    double r3 = r * r * r;
    return 1.0 / w2 + r3 / 12.0 - w2 * r3 * r * r / 360.0 + w2 * w2 * r3 * r3 * r / 20160.0;
  }
  double s = std::sin(0.5 * omega * r);
  double one_minus_cos = 2.0 * s * s;
  return (1.0 + r) / w2 - 2.0 * one_minus_cos / (w2 * w2 * r);
}

double particular_radial_deriv(double r, double omega) {
  double w2 = omega * omega;
  if (r < kTinyRadius) {
    double r2 = r * r;
    return r2 / 4.0 - w2 * r2 * r2 / 72.0 + w2 * w2 * r2 * r2 * r2 / 2880.0;
  }
  double wr = omega * r;
  double s = std::sin(0.5 * wr);
  double one_minus_cos = 2.0 * s * s;
  return 1.0 / w2 - 2.0 * (wr * std::sin(wr) - one_minus_cos) / (w2 * w2 * r * r);
}

double rbf_particular(const RbfAtom& atom, const Point& x) {
  return particular_radial((x - atom.center).norm(), atom.omega);
}

Eigen::Vector3d rbf_particular_grad(const RbfAtom& atom, const Point& x) {
  Point d = x - atom.center;
  double r = d.norm();
  if (r == 0.0) return Eigen::Vector3d::Zero();
  return particular_radial_deriv(r, atom.omega) / r * d;
}

double surface_min_distance(const SphereRule& rule, double kappa) { return kappa * rule.radius / rule.order; }

namespace {

double distance_to_sphere(const Point& x, const Point& c, double radius) {
  return std::abs((x - c).norm() - radius);
}

cplx surface_sum(const RbfAtom& atom, const SphereRule& rule, const Point& x) {
  cplx acc = 0.0;
  for (Eigen::Index j = 0; j < rule.size(); ++j) {
    Point y = rule.points.col(j);
    Point nu = rule.normals.col(j);
    Point d = y - atom.center;
    double rk = d.norm();
    double fh = particular_radial(rk, atom.omega);
    double dfh = rk > 0 ? particular_radial_deriv(rk, atom.omega) * d.dot(nu) / rk : 0.0;
    acc += rule.weights[j] * (phi(x, y, atom.omega) * dfh - phi_normal_deriv(x, y, nu, atom.omega) * fh);
  }
  return acc;
}

}  // namespace

cplx green_surface_integral(const RbfAtom& atom, const SphereRule& rule, const Point& x, SurfaceMode mode,
                            const SurfaceOptions& opts) {
  double dist = distance_to_sphere(x, rule.center, rule.radius);
  if (mode == SurfaceMode::interior) {
    double dmin = surface_min_distance(rule, opts.kappa);
    if (dist < dmin)
      throw NearSingularityError("green_surface_integral: target within " + std::to_string(dist) +
                                 " of the surface (min " + std::to_string(dmin) +
                                 "); use boundary_limit mode or a finer rule");
    return surface_sum(atom, rule, x);
  }
  if (dist > 1e-9 * rule.radius)
    throw DomainError("green_surface_integral: boundary_limit target is not on the sphere");
  Point dir = (x - rule.center).normalized();
  Point xt = rule.center + (1.0 + opts.boundary_offset) * rule.radius * dir;
  // Refine the rule so the offset point stays resolved.
  int need = static_cast<int>(std::ceil(opts.kappa / opts.boundary_offset));
  const SphereRule fine = need > rule.order ? sphere_rule(need, rule.center, rule.radius) : rule;
  return surface_sum(atom, fine, xt) - 0.5 * rbf_particular(atom, x);
}

Eigen::MatrixXcd green_surface_matrix(const PointSet& targets, const PointSet& centers, double omega,
                                      const SphereRule& rule, double kappa) {
  const Eigen::Index nt = targets.cols(), na = centers.cols();
  const double dmin = surface_min_distance(rule, kappa);
  for (Eigen::Index i = 0; i < nt; ++i) {
    double dist = distance_to_sphere(targets.col(i), rule.center, rule.radius);
    if (dist < dmin)
      throw NearSingularityError("green_surface_matrix: target " + std::to_string(i) + " within " +
                                 std::to_string(dist) + " of the surface (min " + std::to_string(dmin) + ")");
  }

  Eigen::MatrixXd re = Eigen::MatrixXd::Zero(nt, na), im = Eigen::MatrixXd::Zero(nt, na);
  constexpr Eigen::Index kChunk = 1024;
  for (Eigen::Index q0 = 0; q0 < rule.size(); q0 += kChunk) {
    const Eigen::Index nq = std::min(kChunk, rule.size() - q0);
    Eigen::MatrixXd pr(nt, nq), pi(nt, nq), qr(nt, nq), qi(nt, nq);
    Eigen::MatrixXd g(nq, na), h(nq, na);
    for (Eigen::Index q = 0; q < nq; ++q) {
      const Point y = rule.points.col(q0 + q);
      const Point nu = rule.normals.col(q0 + q);
      const double w = rule.weights[q0 + q];
      for (Eigen::Index i = 0; i < nt; ++i) {
        Point d = y - targets.col(i);
        double r = d.norm();
        double c = std::cos(omega * r), s = std::sin(omega * r);
        double a = w / (4.0 * kPi * r);
        double cosang = d.dot(nu) / r;
        pr(i, q) = a * c;
        pi(i, q) = a * s;
        // (i w - 1/r) * (c + i s) * cosang
        qr(i, q) = a * cosang * (-omega * s - c / r);
        qi(i, q) = a * cosang * (omega * c - s / r);
      }
      for (Eigen::Index k = 0; k < na; ++k) {
        Point d = y - centers.col(k);
        double r = d.norm();
        h(q, k) = particular_radial(r, omega);
        g(q, k) = r > 0 ? particular_radial_deriv(r, omega) * d.dot(nu) / r : 0.0;
      }
    }
    re.noalias() += pr * g;
    re.noalias() -= qr * h;
    im.noalias() += pi * g;
    im.noalias() -= qi * h;
  }
  Eigen::MatrixXcd out(nt, na);
  out.real() = re;
  out.imag() = im;
  return out;
}

int required_sphere_order(const SurfaceQuadrature& q, double radius, double distance) {
  if (!(distance > 0)) throw NearSingularityError("required_sphere_order: target on the surface");
  double need = q.kappa * radius / distance;
  if (need <= q.base_order) return q.base_order;
  int order = static_cast<int>(std::ceil(need / 10.0)) * 10;
  if (order > q.max_order)
    throw NearSingularityError("required_sphere_order: target at distance " + std::to_string(distance) +
                               " needs order " + std::to_string(order) + " > max " +
                               std::to_string(q.max_order));
  return order;
}

Eigen::MatrixXcd green_surface_matrix_adaptive(const PointSet& targets, const PointSet& centers, double omega,
                                               const Point& center, double radius, const SurfaceQuadrature& q) {
  std::map<int, std::vector<Eigen::Index>> groups;
  for (Eigen::Index i = 0; i < targets.cols(); ++i) {
    double dist = distance_to_sphere(targets.col(i), center, radius);
    groups[required_sphere_order(q, radius, dist)].push_back(i);
  }
  Eigen::MatrixXcd out(targets.cols(), centers.cols());
  for (const auto& [order, idx] : groups) {
    PointSet sub(3, static_cast<Eigen::Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j) sub.col(static_cast<Eigen::Index>(j)) = targets.col(idx[j]);
    Eigen::MatrixXcd block = green_surface_matrix(sub, centers, omega, sphere_rule(order, center, radius), q.kappa);
    for (std::size_t j = 0; j < idx.size(); ++j) out.row(idx[j]) = block.row(static_cast<Eigen::Index>(j));
  }
  return out;
}

cplx volume_potential(const Point& x, const std::function<cplx(const Point&)>& g, double omega, int nr, int ns,
                      const Point& center, double radius) {
  Point xc = x - center;
  double c0 = xc.squaredNorm() - radius * radius;
  if (c0 >= 0) throw DomainError("volume_potential: x must lie inside the ball");
  SphereRule dirs = sphere_rule(ns);
  Rule1D unit = gauss_legendre(nr, 0.0, 1.0);
  cplx acc = 0.0;
  for (Eigen::Index j = 0; j < dirs.size(); ++j) {
    Point s = dirs.points.col(j);
    double b = xc.dot(s);
    double rho = -b + std::sqrt(b * b - c0);
    cplx line = 0.0;
    for (int m = 0; m < nr; ++m) {
      double r = rho * unit.nodes[m];
      line += unit.weights[m] * std::exp(kI * (omega * r)) * r * g(x + r * s);
    }
    acc += dirs.weights[j] * rho * line;
  }
  return acc / (4.0 * kPi);
}

}  // namespace dropinv
