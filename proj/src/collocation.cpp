#include "dropinv/collocation.hpp"

#include <cmath>
#include <string>

#include "dropinv/rng.hpp"

namespace dropinv {

double radical_inverse(std::uint64_t i, unsigned base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

namespace {

bool excluded(const Point& x, const std::optional<Droplet>& d, double factor) {
  return d && (x - d->center).norm() < factor * d->eps;
}

Eigen::Matrix3d seeded_rotation(std::uint64_t seed) {
  // Uniform random unit quaternion (Shoemake).
  double u1 = keyed_uniform(seed, 11), u2 = keyed_uniform(seed, 12), u3 = keyed_uniform(seed, 13);
  double a = std::sqrt(1 - u1), b = std::sqrt(u1);
  Eigen::Quaterniond q(b * std::cos(2 * kPi * u3), a * std::sin(2 * kPi * u2), a * std::cos(2 * kPi * u2),
                       b * std::sin(2 * kPi * u3));
  return q.normalized().toRotationMatrix();
}

}  // namespace

CollocationSet sample_collocation(int n, std::uint64_t seed, const std::optional<Droplet>& exclude,
                                  const CollocationOptions& opts) {
  if (n < 1) throw DomainError("sample_collocation: n must be >= 1");
  if (!(opts.interior_radius > 0 && opts.interior_radius < 1) || !(opts.shell_radius > 0 && opts.shell_radius < 1))
    throw DomainError("sample_collocation: radii must lie in (0,1)");
  if (!(opts.inner_radius >= 0 && opts.inner_radius < opts.interior_radius))
    throw DomainError("sample_collocation: inner_radius must lie in [0, interior_radius)");
  if (exclude) exclude->validate();

  const int n_shell = std::min(n, static_cast<int>(std::lround(opts.shell_fraction * n)));
  CollocationSet set;
  set.points.resize(3, n);
  Eigen::Index filled = 0;

  const Eigen::Matrix3d rot = seeded_rotation(seed);
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n_shell; ++i) {
    double z = 1.0 - (2.0 * i + 1.0) / n_shell;
    double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    Point p(rho * std::cos(golden * i), rho * std::sin(golden * i), z);
    p = opts.shell_radius * (rot * p);
    if (excluded(p, exclude, opts.exclusion_factor)) continue;
    set.points.col(filled++) = p;
  }

  // Cranley-Patterson shifted Halton points mapped to the interior ball.
  const double s1 = keyed_uniform(seed, 1), s2 = keyed_uniform(seed, 2), s3 = keyed_uniform(seed, 3);
  const std::uint64_t limit = 1000ull * static_cast<std::uint64_t>(n) + 100000ull;
  for (std::uint64_t i = 1; filled < n; ++i) {
    if (i > limit) throw NumericalError("sample_collocation: rejection exhausted after " + std::to_string(limit));
    double u1 = std::fmod(radical_inverse(i, 2) + s1, 1.0);
    double u2 = std::fmod(radical_inverse(i, 3) + s2, 1.0);
    double u3 = std::fmod(radical_inverse(i, 5) + s3, 1.0);
    // Uniform in volume over the spherical annulus.
    const double r0 = opts.inner_radius * opts.inner_radius * opts.inner_radius;
    const double r1 = opts.interior_radius * opts.interior_radius * opts.interior_radius;
    double r = std::cbrt(r0 + (r1 - r0) * u1);
    double ct = 2.0 * u2 - 1.0, st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    double ph = 2.0 * kPi * u3;
    Point p(r * st * std::cos(ph), r * st * std::sin(ph), r * ct);
    if (excluded(p, exclude, opts.exclusion_factor)) continue;
    set.points.col(filled++) = p;
  }
  return set;
}

}  // namespace dropinv
