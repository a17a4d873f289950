#include "dropinv/forward.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace dropinv {

namespace {

constexpr cplx kI(0.0, 1.0);

Eigen::VectorXcd sample(const FieldFn& g, const PointSet& pts) {
  Eigen::VectorXcd v(pts.cols());
  for (Eigen::Index i = 0; i < pts.cols(); ++i) v[i] = g(pts.col(i));
  return v;
}

Eigen::VectorXcd plane_wave(const PointSet& pts, const Point& theta, double omega) {
  Eigen::VectorXcd v(pts.cols());
  for (Eigen::Index i = 0; i < pts.cols(); ++i) v[i] = std::exp(kI * (omega * theta.dot(pts.col(i))));
  return v;
}

// Dense LU solve with singularity and residual guards.
Eigen::VectorXcd guarded_solve(const Eigen::MatrixXcd& a, const Eigen::VectorXcd& b, double cond_limit,
                               double& residual, const char* what) {
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
  double rc = lu.rcond();
  if (!(rc > 1.0 / cond_limit))
    throw NumericalError(std::string(what) + ": system is numerically singular (rcond " + std::to_string(rc) + ")");
  Eigen::VectorXcd x = lu.solve(b);
  double nb = b.norm();
  residual = nb > 0 ? (a * x - b).norm() / nb : (a * x).norm();
  if (!(residual <= 1e-8)) throw NumericalError(std::string(what) + ": residual " + std::to_string(residual));
  return x;
}

Point unit(const Point& v, const char* what) {
  double n = v.norm();
  if (!(n > 0)) throw DomainError(std::string(what) + ": direction must be nonzero");
  return v / n;
}

}  // namespace

Eigen::MatrixXd rbf_matrix(const PointSet& targets, const PointSet& centers) {
  Eigen::MatrixXd f(targets.cols(), centers.cols());
  for (Eigen::Index k = 0; k < centers.cols(); ++k)
    f.col(k) = ((targets.colwise() - centers.col(k)).colwise().norm().array() + 1.0).transpose();
  return f;
}

Eigen::MatrixXd particular_matrix(const PointSet& targets, const PointSet& centers, double omega) {
  Eigen::MatrixXd f(targets.cols(), centers.cols());
  for (Eigen::Index k = 0; k < centers.cols(); ++k)
    for (Eigen::Index i = 0; i < targets.cols(); ++i)
      f(i, k) = particular_radial((targets.col(i) - centers.col(k)).norm(), omega);
  return f;
}

RbfInterpolator::RbfInterpolator(const PointSet& centers, double cond_limit)
    : f_(rbf_matrix(centers, centers)), lu_(f_) {
  rcond_ = lu_.rcond();
  if (!(rcond_ > 1.0 / cond_limit))
    throw NumericalError("rbf interpolation matrix is near-singular (condition estimate " +
                         std::to_string(1.0 / rcond_) + "); use a different seed or point count");
}

Eigen::MatrixXcd RbfInterpolator::solve(const Eigen::MatrixXcd& values) const {
  Eigen::MatrixXcd out(values.rows(), values.cols());
  out.real() = lu_.solve(values.real());
  out.imag() = lu_.solve(values.imag());
  return out;
}

Eigen::VectorXcd rbf_interp_coeffs(const FieldFn& g, const CollocationSet& colloc, double cond_limit) {
  RbfInterpolator interp(colloc.points, cond_limit);
  return interp.solve(sample(g, colloc.points));
}

Eigen::MatrixXcd medium_expansion(const MediumField& medium, const CollocationSet& colloc, double cond_limit) {
  RbfInterpolator interp(colloc.points, cond_limit);
  Eigen::VectorXcd inv = sample([&](const Point& x) { return medium.inverse_k0(x); }, colloc.points);
  Eigen::MatrixXcd rhs = inv.asDiagonal() * interp.matrix().cast<cplx>();
  return interp.solve(rhs);
}

cplx DrmSolution::expansion(const Point& x) const {
  cplx acc = 0.0;
  for (Eigen::Index k = 0; k < colloc.size(); ++k) acc += coeffs[k] * (1.0 + (x - colloc.points.col(k)).norm());
  return acc;
}

Eigen::MatrixXcd assemble_unperturbed(const MediumField& medium, const CollocationSet& colloc, double omega,
                                      const SolverOptions& opts) {
  if (!(omega > 0)) throw DomainError("assemble_unperturbed: omega must be positive");
  const PointSet& x = colloc.points;
  Eigen::MatrixXcd jb = green_surface_matrix_adaptive(x, x, omega, Point::Zero(), 1.0, opts.boundary);
  Eigen::VectorXcd q = sample([&](const Point& p) { return medium.contrast(p); }, x);
  Eigen::MatrixXcd a = rbf_matrix(x, x).cast<cplx>();
  a.noalias() -= (omega * omega * q).asDiagonal() * (jb - particular_matrix(x, x, omega).cast<cplx>());
  return a;
}

DrmSolution solve_unperturbed(const MediumField& medium, const CollocationSet& colloc, double omega,
                              const Point& theta, const std::optional<FieldFn>& rhs_override,
                              const SolverOptions& opts) {
  DrmSolution sol;
  sol.colloc = colloc;
  sol.omega = omega;
  sol.theta = unit(theta, "solve_unperturbed");
  sol.kind = FieldKind::contrast_source;
  Eigen::VectorXcd rhs;
  if (rhs_override) {
    rhs = sample(*rhs_override, colloc.points);
  } else {
    Eigen::VectorXcd q = sample([&](const Point& p) { return medium.contrast(p); }, colloc.points);
    rhs = q.cwiseProduct(plane_wave(colloc.points, sol.theta, omega));
  }
  Eigen::MatrixXcd a = assemble_unperturbed(medium, colloc, omega, opts);
  sol.coeffs = guarded_solve(a, rhs, opts.cond_limit, sol.residual, "solve_unperturbed");
  return sol;
}

cplx total_field(const DrmSolution& sol, const MediumField& medium, const Point& x, const SolverOptions& opts) {
  const bool inside = x.norm() < 1.0;
  if (sol.kind == FieldKind::total_field) {
    if (!inside) throw DomainError("total_field: perturbed solutions are only represented inside B(0,1)");
    return sol.expansion(x);
  }
  if (inside) {
    cplx q = medium.contrast(x);
    if (std::abs(q) >= 1e-8) return sol.expansion(x) / q;
  }
  // v = u_inc + w^2 int_B phi v*
  PointSet target = x;
  Eigen::RowVectorXcd j =
      green_surface_matrix_adaptive(target, sol.colloc.points, sol.omega, Point::Zero(), 1.0, opts.boundary);
  if (inside) j -= particular_matrix(target, sol.colloc.points, sol.omega).cast<cplx>();
  return std::exp(kI * (sol.omega * sol.theta.dot(x))) + sol.omega * sol.omega * (j * sol.coeffs)(0);
}

Eigen::VectorXcd plane_wave_moments(const PointSet& centers, const Point& direction, double omega,
                                    const BallRule& rule, const FieldFn& weight) {
  Eigen::VectorXcd w(rule.size());
  for (Eigen::Index q = 0; q < rule.size(); ++q) {
    Point y = rule.points.col(q);
    cplx v = rule.weights[q] * std::exp(kI * (omega * direction.dot(y)));
    if (weight) v *= weight(y);
    w[q] = v;
  }
  Eigen::MatrixXd f = rbf_matrix(rule.points, centers);
  Eigen::VectorXcd out(centers.cols());
  out.real() = f.transpose() * w.real();
  out.imag() = f.transpose() * w.imag();
  return out;
}

cplx far_field_unperturbed(const DrmSolution& sol, const Point& xhat, const SolverOptions& opts) {
  if (sol.kind != FieldKind::contrast_source) throw DomainError("far_field_unperturbed: expects a v* solution");
  Point d = unit(xhat, "far_field_unperturbed");
  BallRule rule = ball_rule(opts.far_ball_radial, opts.far_ball_angular);
  Eigen::VectorXcd m = plane_wave_moments(sol.colloc.points, -d, sol.omega, rule);
  return sol.omega * sol.omega / (4.0 * kPi) * sol.coeffs.cwiseProduct(m).sum();
}

PerturbedSystem::PerturbedSystem(MediumField medium, CollocationSet colloc, double omega, const Point& theta,
                                 SolverOptions opts)
    : medium_(std::move(medium)),
      colloc_(std::move(colloc)),
      omega_(omega),
      theta_(unit(theta, "PerturbedSystem")),
      opts_(opts) {
  if (!(omega_ > 0)) throw DomainError("PerturbedSystem: omega must be positive");
  const PointSet& x = colloc_.points;
  f_ = rbf_matrix(x, x);
  jb_ = green_surface_matrix_adaptive(x, x, omega_, Point::Zero(), 1.0, opts_.boundary);
  jb_ -= particular_matrix(x, x, omega_).cast<cplx>();
  inverse_k0_ = sample([this](const Point& p) { return medium_.inverse_k0(p); }, x);
  incident_ = plane_wave(x, theta_, omega_);
  bulk_moments_ = plane_wave_moments(x, theta_, omega_, ball_rule(opts_.far_ball_radial, opts_.far_ball_angular),
                                     [this](const Point& y) { return medium_.contrast(y); });
  finish();
}

void PerturbedSystem::finish() {
  const Eigen::Index n = f_.rows();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(f_);
  if (!(lu.rcond() > 1.0 / opts_.cond_limit))
    throw NumericalError("rbf interpolation matrix is near-singular; use a different seed or point count");
  Eigen::MatrixXcd rhs = inverse_k0_.asDiagonal() * f_.cast<cplx>();
  d_.resize(n, n);
  d_.real() = lu.solve(rhs.real());
  d_.imag() = lu.solve(rhs.imag());
  background_ = f_.cast<cplx>();
  background_.noalias() -= (omega_ * omega_) * jb_ * (d_ - Eigen::MatrixXcd::Identity(n, n));
  Eigen::PartialPivLU<Eigen::MatrixXcd> blu(background_);
  if (!(blu.rcond() > 1.0 / opts_.cond_limit)) throw NumericalError("PerturbedSystem: background system is singular");
  background_inv_ = blu.inverse();
  d_background_inv_ = d_ * background_inv_;
  y0_ = blu.solve(incident_);
  dy0_ = d_ * y0_;
}

std::vector<Eigen::Index> PerturbedSystem::points_near(const Point& center, double radius) const {
  std::vector<Eigen::Index> out;
  for (Eigen::Index i = 0; i < colloc_.size(); ++i)
    if ((colloc_.points.col(i) - center).norm() < radius) out.push_back(i);
  return out;
}

PerturbedSystem PerturbedSystem::without(const std::vector<Eigen::Index>& drop) const {
  const Eigen::Index n = colloc_.size();
  std::vector<bool> gone(static_cast<std::size_t>(n), false);
  for (auto i : drop) {
    if (i < 0 || i >= n) throw DomainError("PerturbedSystem::without: index out of range");
    gone[static_cast<std::size_t>(i)] = true;
  }
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < n; ++i)
    if (!gone[static_cast<std::size_t>(i)]) keep.push_back(i);
  if (keep.empty()) throw DomainError("PerturbedSystem::without: no collocation points left");

  PerturbedSystem s;
  s.medium_ = medium_;
  s.omega_ = omega_;
  s.theta_ = theta_;
  s.opts_ = opts_;
  s.colloc_.points = colloc_.points(Eigen::all, keep);
  s.f_ = f_(keep, keep);
  s.jb_ = jb_(keep, keep);
  s.inverse_k0_ = inverse_k0_(keep);
  s.incident_ = incident_(keep);
  s.bulk_moments_ = bulk_moments_(keep);
  s.finish();
  return s;
}

void PerturbedSystem::check_droplet(const Droplet& droplet) const {
  droplet.validate();
  for (Eigen::Index i = 0; i < colloc_.size(); ++i)
    if ((colloc_.points.col(i) - droplet.center).norm() <= droplet.eps)
      throw DomainError("collocation point " + std::to_string(i) + " lies inside the droplet");
}

Eigen::MatrixXcd PerturbedSystem::matrix(const Droplet& droplet) const {
  check_droplet(droplet);
  if (droplet.neutral) return background_;
  const PointSet& x = colloc_.points;
  const Eigen::Index n = x.cols();
  SphereRule rule = sphere_rule(opts_.droplet_order, droplet.center, droplet.eps);
  Eigen::MatrixXcd jd = green_surface_matrix(x, x, omega_, rule, opts_.droplet_kappa);
  Eigen::MatrixXcd ce = d_ - droplet.inverse_bulk() * Eigen::MatrixXcd::Identity(n, n);
  Eigen::MatrixXcd a = background_;
  a.noalias() += (omega_ * omega_) * jd * ce;
  return a;
}

Eigen::VectorXcd PerturbedSystem::droplet_moments(const Droplet& droplet) const {
  if (droplet.neutral) return Eigen::VectorXcd::Zero(colloc_.size());
  BallRule rule = ball_rule(opts_.droplet_ball_radial, opts_.droplet_ball_angular, droplet.center, droplet.eps);
  const double kappa = droplet.inverse_bulk();
  return plane_wave_moments(colloc_.points, theta_, omega_, rule,
                            [&](const Point& y) { return medium_.inverse_k0(y) - kappa; });
}

cplx PerturbedSystem::backscatter(const Eigen::VectorXcd& beta, const Droplet& droplet) const {
  Eigen::VectorXcd m = bulk_moments_ - droplet_moments(droplet);
  return omega_ * omega_ / (4.0 * kPi) * beta.cwiseProduct(m).sum();
}

cplx PerturbedSystem::background_backscatter() const {
  double res = 0;
  Eigen::VectorXcd beta = guarded_solve(background_, incident_, opts_.cond_limit, res, "background_backscatter");
  return omega_ * omega_ / (4.0 * kPi) * beta.cwiseProduct(bulk_moments_).sum();
}

Eigen::VectorXcd PerturbedSystem::solve_droplet(const Droplet& droplet) const {
  check_droplet(droplet);
  if (droplet.neutral) return y0_;
  const PointSet& x = colloc_.points;
  const Eigen::Index n = x.cols();
  const SphereRule rule = sphere_rule(opts_.droplet_order, droplet.center, droplet.eps);
  const Eigen::Index m = rule.size();
  const double dmin = surface_min_distance(rule, opts_.droplet_kappa);
  for (Eigen::Index i = 0; i < n; ++i)
    if ((x.col(i) - droplet.center).norm() - droplet.eps < dmin)
      throw NearSingularityError("solve_droplet: collocation point " + std::to_string(i) + " too close to the droplet");

  // Droplet block = P Q with P = [w phi, w dphi/dnu] (n x 2m) and
  // Q = [dfhat/dnu; -fhat] Ce (2m x n), Ce = D - kappa I.
  Eigen::MatrixXcd p(n, 2 * m);
  Eigen::MatrixXd s(2 * m, n);
  for (Eigen::Index q = 0; q < m; ++q) {
    const Point y = rule.points.col(q);
    const Point nu = rule.normals.col(q);
    const double w = rule.weights[q];
    for (Eigen::Index i = 0; i < n; ++i) {
      const Point d = y - x.col(i);
      const double r = d.norm();
      const cplx ph = w * std::exp(kI * (omega_ * r)) / (4.0 * kPi * r);
      p(i, q) = ph;
      p(i, m + q) = ph * (kI * omega_ - 1.0 / r) * (d.dot(nu) / r);
      const double fh = particular_radial(r, omega_);
      s(q, i) = particular_radial_deriv(r, omega_) * d.dot(nu) / r;
      s(m + q, i) = -fh;
    }
  }
  const double kappa = droplet.inverse_bulk();
  // S Ce B^-1 = S (D B^-1 - kappa B^-1)
  const Eigen::MatrixXcd w = d_background_inv_ - kappa * background_inv_;
  Eigen::MatrixXcd sw(2 * m, n);
  sw.real() = s * w.real();
  sw.imag() = s * w.imag();
  Eigen::MatrixXcd cap = sw * p;
  cap.diagonal().array() += 1.0 / (omega_ * omega_);
  Eigen::VectorXcd qy(2 * m);
  const Eigen::VectorXcd cy = dy0_ - kappa * y0_;
  qy.real() = s * cy.real();
  qy.imag() = s * cy.imag();
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(cap);
  if (!(lu.rcond() > 1.0 / opts_.cond_limit)) throw NumericalError("solve_droplet: capacitance system is singular");
  const Eigen::VectorXcd t = lu.solve(qy);
  return y0_ - background_inv_ * (p * t);
}

cplx PerturbedSystem::solve_backscatter(const Droplet& droplet) const {
  return backscatter(solve_droplet(droplet), droplet);
}

cplx PerturbedSystem::reciprocal_contrast(const Droplet& droplet) const {
  if (droplet.neutral) return 0.0;
  const Eigen::VectorXcd beta = solve_droplet(droplet);
  BallRule rule = ball_rule(opts_.droplet_ball_radial, opts_.droplet_ball_angular, droplet.center, droplet.eps);
  const Eigen::MatrixXd fy = rbf_matrix(rule.points, colloc_.points);
  const Eigen::VectorXcd u = fy * beta, v = fy * y0_;
  cplx acc = 0.0;
  for (Eigen::Index q = 0; q < rule.size(); ++q)
    acc += rule.weights[q] * (droplet.inverse_bulk() - medium_.inverse_k0(rule.points.col(q))) * u[q] * v[q];
  return -omega_ * omega_ / (4.0 * kPi) * acc;
}

Eigen::MatrixXcd assemble_perturbed(const MediumField& medium, const Droplet& droplet, const CollocationSet& colloc,
                                    double omega, const SolverOptions& opts) {
  PerturbedSystem sys(medium, colloc, omega, Point::UnitZ(), opts);
  return sys.matrix(droplet);
}

DrmSolution solve_perturbed(const MediumField& medium, const Droplet& droplet, const CollocationSet& colloc,
                            double omega, const Point& theta, const std::optional<FieldFn>& rhs_override,
                            const SolverOptions& opts) {
  PerturbedSystem sys(medium, colloc, omega, theta, opts);
  DrmSolution sol;
  sol.colloc = colloc;
  sol.omega = omega;
  sol.theta = sys.theta();
  sol.kind = FieldKind::total_field;
  Eigen::VectorXcd rhs = rhs_override ? sample(*rhs_override, colloc.points) : sys.incident();
  sol.coeffs = guarded_solve(sys.matrix(droplet), rhs, opts.cond_limit, sol.residual, "solve_perturbed");
  return sol;
}

cplx far_field_perturbed(const DrmSolution& sol, const Droplet& droplet, const MediumField& medium,
                         const Point& theta, const SolverOptions& opts) {
  if (sol.kind != FieldKind::total_field) throw DomainError("far_field_perturbed: expects a total-field solution");
  Point t = unit(theta, "far_field_perturbed");
  const PointSet& x = sol.colloc.points;
  Eigen::VectorXcd m = plane_wave_moments(x, t, sol.omega, ball_rule(opts.far_ball_radial, opts.far_ball_angular),
                                          [&](const Point& y) { return medium.contrast(y); });
  if (!droplet.neutral) {
    const double kappa = droplet.inverse_bulk();
    m -= plane_wave_moments(x, t, sol.omega,
                            ball_rule(opts.droplet_ball_radial, opts.droplet_ball_angular, droplet.center, droplet.eps),
                            [&](const Point& y) { return medium.inverse_k0(y) - kappa; });
  }
  return sol.omega * sol.omega / (4.0 * kPi) * sol.coeffs.cwiseProduct(m).sum();
}

}  // namespace dropinv
