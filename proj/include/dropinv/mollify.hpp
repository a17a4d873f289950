#pragma once

#include "dropinv/grid.hpp"

namespace dropinv {

/// Normalization c with int_{-1}^{1} c exp(1/(x^2-1)) dx = 1.
double eta_normalization();

/// Unit-support bump eta and its first two derivatives; zero for |x| >= 1.
double eta(double x);
double eta_deriv(double x, int order);

class Mollifier {
 public:
  explicit Mollifier(double delta);

  double delta() const { return delta_; }
  double c() const { return eta_normalization(); }

  /// eta_delta(t) = eta(t/delta)/delta, and its derivatives.
  double operator()(double t) const;
  double deriv(double t, int order) const;

  /// Half-width in samples of the discrete kernel for a given spacing.
  int half_width(double spacing) const;

  /// Trapezoid weights w_j, j = -m..m, of D^order eta_delta on the sample grid,
  /// corrected so that the discrete rule differentiates t (order 1) or t^2 (order 2) exactly.
  Eigen::VectorXd stencil(double spacing, int order) const;

 private:
  double delta_;
};

/// D^order of the mollified samples on the delta-interior (length size - 2m).
template <class Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> mollified_deriv_1d(const Eigen::MatrixBase<Derived>& samples,
                                                                              double spacing, double delta, int order) {
  using Scalar = typename Derived::Scalar;
  Mollifier mol(delta);
  Eigen::VectorXd w = mol.stencil(spacing, order);
  const Eigen::Index m = (w.size() - 1) / 2;
  const Eigen::Index n = samples.size() - 2 * m;
  if (n <= 0) throw DomainError("mollified_deriv_1d: output domain is empty");
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Scalar acc(0);
    // sum_j w_j f(x - t_j) with t_j = j h
    for (Eigen::Index j = -m; j <= m; ++j) acc += w[j + m] * samples(i + m - j);
    out[i] = acc;
  }
  return out;
}

struct GradLaplace {
  GridGeometry geometry;  // delta-interior
  ScalarGrid3 grad[3];
  ScalarGrid3 laplace;
};

/// Axis-wise mollified gradient and Laplacian on the common delta-interior.
GradLaplace grad_laplace(const ScalarGrid3& field, double delta);

}  // namespace dropinv
