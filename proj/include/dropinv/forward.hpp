#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "dropinv/collocation.hpp"
#include "dropinv/kernels.hpp"
#include "dropinv/medium.hpp"

namespace dropinv {

using FieldFn = std::function<cplx(const Point&)>;

/// Quadrature and conditioning knobs shared by both solvers.
struct SolverOptions {
  SurfaceQuadrature boundary;   // rules on the unit sphere
  int droplet_order = 6;        // sphere rule on the droplet surface
  double droplet_kappa = 6.0;   // targets must stay droplet_kappa * eps / droplet_order away
  int droplet_ball_radial = 3;  // droplet volume rule for far fields
  int droplet_ball_angular = 4;
  int far_ball_radial = 16;  // unit ball rule for far-field moments
  int far_ball_angular = 20;
  double cond_limit = 1e12;
};

/// f_k(x_i) = 1 + |x_i - x_k|
Eigen::MatrixXd rbf_matrix(const PointSet& targets, const PointSet& centers);
/// fhat_k(x_i)
Eigen::MatrixXd particular_matrix(const PointSet& targets, const PointSet& centers, double omega);

/// LU of the interpolation matrix with a conditioning guard.
class RbfInterpolator {
 public:
  explicit RbfInterpolator(const PointSet& centers, double cond_limit = 1e12);

  Eigen::MatrixXcd solve(const Eigen::MatrixXcd& values) const;
  const Eigen::MatrixXd& matrix() const { return f_; }
  double rcond() const { return rcond_; }

 private:
  Eigen::MatrixXd f_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  double rcond_ = 0;
};

/// Coefficients d with sum_l d_l f_l(x_i) = g(x_i).
Eigen::VectorXcd rbf_interp_coeffs(const FieldFn& g, const CollocationSet& colloc, double cond_limit = 1e12);

/// Column k holds the expansion of (1/k0) f_k in the basis.
Eigen::MatrixXcd medium_expansion(const MediumField& medium, const CollocationSet& colloc, double cond_limit = 1e12);

enum class FieldKind { contrast_source, total_field };

struct DrmSolution {
  CollocationSet colloc;
  Eigen::VectorXcd coeffs;
  double omega = 0;
  Point theta = Point::UnitZ();
  FieldKind kind = FieldKind::contrast_source;
  double residual = 0;  // relative collocation residual

  /// sum_k c_k f_k(x)
  cplx expansion(const Point& x) const;
};

Eigen::MatrixXcd assemble_unperturbed(const MediumField& medium, const CollocationSet& colloc, double omega,
                                      const SolverOptions& opts = {});

DrmSolution solve_unperturbed(const MediumField& medium, const CollocationSet& colloc, double omega,
                              const Point& theta, const std::optional<FieldFn>& rhs_override = std::nullopt,
                              const SolverOptions& opts = {});

/// Total field v. Uses v* / (1/k0 - 1) where the contrast is not tiny and the
/// Lippmann-Schwinger representation otherwise (and outside the ball).
cplx total_field(const DrmSolution& sol, const MediumField& medium, const Point& x, const SolverOptions& opts = {});

/// int_B exp(i w d.y) weight(y) f_k(y) dy for every center k.
Eigen::VectorXcd plane_wave_moments(const PointSet& centers, const Point& direction, double omega,
                                    const BallRule& rule, const FieldFn& weight = {});

cplx far_field_unperturbed(const DrmSolution& sol, const Point& xhat, const SolverOptions& opts = {});

/// z-independent blocks of the perturbed system for one incident direction,
/// reusable across droplet positions. Const methods are thread-safe.
class PerturbedSystem {
 public:
  PerturbedSystem(MediumField medium, CollocationSet colloc, double omega, const Point& theta,
                  SolverOptions opts = {});

  /// Full matrix for the given droplet. The collocation must avoid it.
  Eigen::MatrixXcd matrix(const Droplet& droplet) const;
  /// Matrix with the droplet contrast removed.
  const Eigen::MatrixXcd& background_matrix() const { return background_; }

  /// u_inc at the collocation points.
  const Eigen::VectorXcd& incident() const { return incident_; }

  /// Back-scatter far field u_z(-theta) of a solved total field.
  cplx backscatter(const Eigen::VectorXcd& beta, const Droplet& droplet) const;

  /// Back-scatter of the droplet-free medium from the same formulation.
  cplx background_backscatter() const;

  /// Solve with the plane-wave incident field and return u_z(-theta).
  cplx solve_backscatter(const Droplet& droplet) const;

  /// xi = v_inf(-theta) - u_z_inf(-theta) by reciprocity:
  /// -(w^2 / 4pi) int_Dz (1/k1 - 1/k0) u_z v dy, with v the background total field.
  /// Equal to the far-field difference for the continuous problem, but it does not
  /// need the collocation to resolve the droplet's near field.
  cplx reciprocal_contrast(const Droplet& droplet) const;

  /// Coefficients beta for the plane-wave incident field. The droplet terms
  /// have rank <= 2 x (droplet rule size), so this updates the factored
  /// background system instead of refactoring the full matrix.
  Eigen::VectorXcd solve_droplet(const Droplet& droplet) const;

  /// Throws DomainError if the collocation touches the droplet.
  void check_droplet(const Droplet& droplet) const;

  /// Indices of collocation points closer than `radius` to `center`.
  std::vector<Eigen::Index> points_near(const Point& center, double radius) const;

  /// The same system with some collocation points removed. Reuses the
  /// z-independent blocks, so it costs O(n^3) rather than a full assembly.
  PerturbedSystem without(const std::vector<Eigen::Index>& drop) const;

  const CollocationSet& colloc() const { return colloc_; }
  const MediumField& medium() const { return medium_; }
  double omega() const { return omega_; }
  const Point& theta() const { return theta_; }
  const SolverOptions& options() const { return opts_; }
  /// F^-1 diag(1/k0) F
  const Eigen::MatrixXcd& expansion() const { return d_; }

 private:
  PerturbedSystem() = default;
  void finish();
  Eigen::VectorXcd droplet_moments(const Droplet& droplet) const;

  MediumField medium_;
  CollocationSet colloc_;
  double omega_ = 0;
  Point theta_;
  SolverOptions opts_;
  Eigen::MatrixXd f_;             // f_k(x_i)
  Eigen::MatrixXcd jb_;           // J_B - Fhat
  Eigen::VectorXcd inverse_k0_;   // 1/k0(x_i)
  Eigen::MatrixXcd d_;
  Eigen::MatrixXcd background_;  // F - w^2 (J_B - Fhat)(D - I)
  Eigen::MatrixXcd background_inv_;
  Eigen::MatrixXcd d_background_inv_;  // D B^-1
  Eigen::VectorXcd y0_;                // B^-1 u_inc
  Eigen::VectorXcd dy0_;               // D y0
  Eigen::VectorXcd incident_;
  Eigen::VectorXcd bulk_moments_;  // int_B e^{i w theta.y} (1/k0 - 1) f_k
};

Eigen::MatrixXcd assemble_perturbed(const MediumField& medium, const Droplet& droplet, const CollocationSet& colloc,
                                    double omega, const SolverOptions& opts = {});

DrmSolution solve_perturbed(const MediumField& medium, const Droplet& droplet, const CollocationSet& colloc,
                            double omega, const Point& theta, const std::optional<FieldFn>& rhs_override = std::nullopt,
                            const SolverOptions& opts = {});

/// Back-scatter u_z(-theta) of a perturbed solution.
cplx far_field_perturbed(const DrmSolution& sol, const Droplet& droplet, const MediumField& medium,
                         const Point& theta, const SolverOptions& opts = {});

}  // namespace dropinv
