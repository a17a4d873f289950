#pragma once

#include "dropinv/types.hpp"

namespace dropinv {

/// One eigen triple of the Newtonian operator on the unit ball.
struct EigenMode {
  int n = 0;
  double mu = 0;          // n-th positive root of sin(mu) + 2 mu cos(mu)
  double lambda = 0;      // mu^-2
  double omega_sq = 0;    // 1 / lambda
  double e_integral = 0;  // integral of e_n over B(0,1)
};

/// sin(mu) + 2 mu cos(mu)
double transcendental(double mu);

/// Root in ((n - 1/2) pi, n pi). Throws NumericalError if the bracket fails.
double mu_root(int n);

EigenMode eigen_mode(int n);

/// Resonance frequency squared for a droplet with normalized bulk kbar1.
double resonance_omega_sq(const EigenMode& mode, double kbar1 = 1.0);

/// C_n = (1/4pi) lambda_n^-2 (int e_n)^2 eps^(1-h)
double contrast_constant(int n, double eps, double h);

}  // namespace dropinv
