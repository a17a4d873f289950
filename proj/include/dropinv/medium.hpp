#pragma once

#include <functional>
#include <string>

#include "dropinv/types.hpp"

namespace dropinv {

enum class MediumPreset { homogeneous, rational2, complex_rational, custom };

std::string to_string(MediumPreset p);

/// Bulk modulus field k0 on the unit ball. Stores 1/k0, which stays finite
/// where k0 itself blows up (the complex-rational preset at the origin).
class MediumField {
 public:
  using Fn = std::function<cplx(const Point&)>;

  MediumField();

  static MediumField homogeneous();
  /// k0 = 2 / (1 + |x|^2)
  static MediumField rational2();
  /// k0 = (|x|^2 + i b.x + 3) / (4|x|^2 + i b.x)
  static MediumField complex_rational(const Eigen::Vector3d& b = Eigen::Vector3d(1, 2, 3));
  static MediumField custom(Fn inverse_k0, std::string name = "custom");

  cplx inverse_k0(const Point& x) const { return inverse_(x); }
  cplx k0(const Point& x) const { return 1.0 / inverse_(x); }
  /// 1/k0 - 1
  cplx contrast(const Point& x) const { return inverse_(x) - 1.0; }

  MediumPreset preset() const { return preset_; }
  const std::string& name() const { return name_; }

  /// Medium whose contrast is s times this one.
  MediumField scaled_contrast(double s) const;

 private:
  MediumField(MediumPreset p, std::string name, Fn inv);

  MediumPreset preset_;
  std::string name_;
  Fn inverse_;
};

/// Small high-contrast ball D_z = z + eps B(0,1).
struct Droplet {
  Point center = Point::Zero();
  double eps = 0.01;
  double h = 0.95;
  double kbar1 = 1.0;
  // Replaces the droplet's contrast with the background one, removing it.
  bool neutral = false;

  /// 1 / (kbar1 eps^2)
  double inverse_bulk() const { return 1.0 / (kbar1 * eps * eps); }

  /// Throws DomainError unless |z| + eps < 1, 0 < eps < 1, 1/2 < h < 1, kbar1 > 0.
  void validate() const;
};

}  // namespace dropinv
