#include "dropinv/eigensys.hpp"

#include <cmath>
#include <string>

namespace dropinv {

double transcendental(double mu) { return std::sin(mu) + 2.0 * mu * std::cos(mu); }

namespace {
double transcendental_deriv(double mu) { return 3.0 * std::cos(mu) - 2.0 * mu * std::sin(mu); }
}  // namespace

double mu_root(int n) {
  if (n < 1) throw DomainError("mu_root: n must be >= 1, got " + std::to_string(n));
  double a = (n - 0.5) * kPi;
  double b = n * kPi;
  double fa = transcendental(a);
  double fb = transcendental(b);
  if (fa * fb >= 0) throw NumericalError("mu_root: no sign change on bracket for n=" + std::to_string(n));

  // Newton steps that leave the current bracket fall back to bisection.
  double x = 0.5 * (a + b);
  for (int it = 0; it < 200; ++it) {
    double fx = transcendental(x);
    if (fx == 0.0) return x;
    if ((fx < 0) == (fa < 0)) {
      a = x;
      fa = fx;
    } else {
      b = x;
    }
    double d = transcendental_deriv(x);
    double next = (d != 0.0) ? x - fx / d : 0.5 * (a + b);
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    if (std::abs(next - x) <= 4e-16 * std::abs(x) || b - a <= 4e-16 * b) return next;
    x = next;
  }
  throw NumericalError("mu_root: no convergence for n=" + std::to_string(n));
}

EigenMode eigen_mode(int n) {
  EigenMode m;
  m.n = n;
  m.mu = mu_root(n);
  m.lambda = 1.0 / (m.mu * m.mu);
  m.omega_sq = 1.0 / m.lambda;
  m.e_integral = 6.0 * std::sqrt(2.0 * kPi) * std::pow(m.mu, -2.5) * std::sin(m.mu);
  return m;
}

double resonance_omega_sq(const EigenMode& mode, double kbar1) {
  if (!(kbar1 > 0)) throw DomainError("resonance_omega_sq: kbar1 must be positive");
  return kbar1 / mode.lambda;
}

double contrast_constant(int n, double eps, double h) {
  if (!(eps > 0 && eps < 1)) throw DomainError("contrast_constant: eps must lie in (0,1)");
  if (!(h > 0.5 && h < 1)) throw DomainError("contrast_constant: h must lie in (1/2,1)");
  EigenMode m = eigen_mode(n);
  return m.e_integral * m.e_integral / (4.0 * kPi * m.lambda * m.lambda) * std::pow(eps, 1.0 - h);
}

}  // namespace dropinv
