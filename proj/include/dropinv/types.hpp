#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dropinv {

using cplx = std::complex<double>;
using Point = Eigen::Vector3d;
using PointSet = Eigen::Matrix3Xd;  // one point per column

/// Input violates an operation's preconditions.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Target point too close to a quadrature surface for the configured rule.
class NearSingularityError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Solver breakdown: singular systems, failed root brackets, ill conditioning.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace dropinv
