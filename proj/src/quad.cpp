#include "dropinv/quad.hpp"

#include <cmath>
#include <string>

namespace dropinv {

namespace {

// P_n(t) and P_{n-1}(t) by the three-term recurrence.
void legendre_pair(int n, double t, double& pn, double& pn1) {
  double p0 = 1.0, p1 = t;
  if (n == 0) {
    pn = 1.0;
    pn1 = 0.0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  pn = p1;
  pn1 = p0;
}

}  // namespace

Rule1D gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: order must be >= 1, got " + std::to_string(n));
  Rule1D r;
  r.nodes.resize(n);
  r.weights.resize(n);
  int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pn = 0, pn1 = 0;
    for (int it = 0; it < 100; ++it) {
      legendre_pair(n, t, pn, pn1);
      double dp = n * (t * pn - pn1) / (t * t - 1.0);
      double dt = pn / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    if (2 * i + 1 == n) t = 0.0;
    legendre_pair(n, t, pn, pn1);
    double w = 2.0 * (1.0 - t * t) / ((n * pn1) * (n * pn1));
    // Chebyshev guesses run from t near 1 downward; store ascending.
    r.nodes[n - 1 - i] = t;
    r.weights[n - 1 - i] = w;
    r.nodes[i] = -t;
    r.weights[i] = w;
  }
  return r;
}

Rule1D gauss_legendre(int n, double a, double b) {
  Rule1D r = gauss_legendre(n);
  double h = 0.5 * (b - a);
  r.nodes = (r.nodes.array() * h + 0.5 * (a + b)).matrix();
  r.weights *= h;
  return r;
}

SphereRule sphere_rule(int n, const Point& center, double radius) {
  if (n < 1) throw DomainError("sphere_rule: order must be >= 1");
  if (!(radius > 0)) throw DomainError("sphere_rule: radius must be positive");
  Rule1D gl = gauss_legendre(n);
  SphereRule s;
  s.center = center;
  s.radius = radius;
  s.order = n;
  const Eigen::Index m = 2 * n;
  s.points.resize(3, n * m);
  s.normals.resize(3, n * m);
  s.weights.resize(n * m);
  Eigen::Index idx = 0;
  for (int j = 0; j < n; ++j) {
    double ct = gl.nodes[j];
    double st = std::sqrt(1.0 - ct * ct);
    for (Eigen::Index k = 0; k < m; ++k) {
      double phi = kPi * static_cast<double>(k) / n;
      Point nu(st * std::cos(phi), st * std::sin(phi), ct);
      s.normals.col(idx) = nu;
      s.points.col(idx) = center + radius * nu;
      s.weights[idx] = kPi / n * gl.weights[j] * radius * radius;
      ++idx;
    }
  }
  return s;
}

BallRule ball_rule(int nr, int ns, const Point& center, double radius) {
  if (nr < 1 || ns < 1) throw DomainError("ball_rule: orders must be >= 1");
  Rule1D rad = gauss_legendre(nr, 0.0, radius);
  SphereRule unit = sphere_rule(ns);
  BallRule b;
  b.center = center;
  b.radius = radius;
  b.points.resize(3, nr * unit.size());
  b.weights.resize(nr * unit.size());
  Eigen::Index idx = 0;
  for (int i = 0; i < nr; ++i) {
    double r = rad.nodes[i];
    for (Eigen::Index j = 0; j < unit.size(); ++j) {
      b.points.col(idx) = center + r * unit.points.col(j);
      b.weights[idx] = rad.weights[i] * r * r * unit.weights[j];
      ++idx;
    }
  }
  return b;
}

}  // namespace dropinv
