#include "dropinv/medium.hpp"

#include <utility>

namespace dropinv {

std::string to_string(MediumPreset p) {
  switch (p) {
    case MediumPreset::homogeneous: return "homogeneous";
    case MediumPreset::rational2: return "rational2";
    case MediumPreset::complex_rational: return "complex_rational";
    case MediumPreset::custom: return "custom";
  }
  return "unknown";
}

MediumField::MediumField(MediumPreset p, std::string name, Fn inv)
    : preset_(p), name_(std::move(name)), inverse_(std::move(inv)) {}

MediumField::MediumField() : MediumField(homogeneous()) {}

MediumField MediumField::homogeneous() {
  return {MediumPreset::homogeneous, "homogeneous", [](const Point&) { return cplx(1.0); }};
}

MediumField MediumField::rational2() {
  return {MediumPreset::rational2, "rational2", [](const Point& x) { return cplx(0.5 * (1.0 + x.squaredNorm())); }};
}

MediumField MediumField::complex_rational(const Eigen::Vector3d& b) {
  return {MediumPreset::complex_rational, "complex_rational", [b](const Point& x) {
            double s = x.squaredNorm();
            cplx ib(0.0, b.dot(x));
            return (4.0 * s + ib) / (s + ib + 3.0);
          }};
}

MediumField MediumField::custom(Fn inverse_k0, std::string name) {
  if (!inverse_k0) throw DomainError("MediumField::custom: empty evaluator");
  return {MediumPreset::custom, std::move(name), std::move(inverse_k0)};
}

MediumField MediumField::scaled_contrast(double s) const {
  Fn inv = inverse_;
  return {MediumPreset::custom, name_ + "*" + std::to_string(s),
          [inv, s](const Point& x) { return 1.0 + s * (inv(x) - 1.0); }};
}

void Droplet::validate() const {
  if (!(eps > 0 && eps < 1)) throw DomainError("droplet: eps must lie in (0,1)");
  if (!(h > 0.5 && h < 1)) throw DomainError("droplet: h must lie in (1/2,1)");
  if (!(kbar1 > 0)) throw DomainError("droplet: kbar1 must be positive");
  if (!(center.norm() + eps < 1.0)) throw DomainError("droplet: D_z leaves the unit ball");
}

}  // namespace dropinv
