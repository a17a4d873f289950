#pragma once

#include "dropinv/types.hpp"

namespace dropinv {

/// Gauss-Legendre rule on [-1, 1].
struct Rule1D {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

/// Gauss-trapezoidal product rule on a sphere. Weights already carry radius^2.
struct SphereRule {
  PointSet points;
  PointSet normals;  // outward unit normals
  Eigen::VectorXd weights;
  Point center = Point::Zero();
  double radius = 1.0;
  int order = 0;

  Eigen::Index size() const { return points.cols(); }
};

/// Radial Gauss-Legendre times sphere rule. Weights include the r^2 Jacobian.
struct BallRule {
  PointSet points;
  Eigen::VectorXd weights;
  Point center = Point::Zero();
  double radius = 1.0;

  Eigen::Index size() const { return points.cols(); }
};

Rule1D gauss_legendre(int n);

/// Legendre-mapped rule on (a, b).
Rule1D gauss_legendre(int n, double a, double b);

SphereRule sphere_rule(int n, const Point& center = Point::Zero(), double radius = 1.0);

BallRule ball_rule(int nr, int ns, const Point& center = Point::Zero(), double radius = 1.0);

/// Sum of w_j f(y_j) over any rule exposing points and weights.
template <class Rule, class F>
auto integrate(const Rule& rule, F&& f) {
  using R = decltype(f(Point(rule.points.col(0))));
  R acc{};
  for (Eigen::Index j = 0; j < rule.points.cols(); ++j) acc += rule.weights[j] * f(Point(rule.points.col(j)));
  return acc;
}

}  // namespace dropinv
