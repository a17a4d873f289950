#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <vector>

#include "dropinv/types.hpp"

namespace dropinv {

/// Regular axis-aligned grid geometry. Flat index is row-major with axis 3 fastest.
struct GridGeometry {
  std::array<std::size_t, 3> dims{2, 2, 2};
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();
  Eigen::Vector3d spacing = Eigen::Vector3d::Ones();

  std::size_t size() const { return dims[0] * dims[1] * dims[2]; }
  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const { return (i * dims[1] + j) * dims[2] + k; }
  std::array<std::size_t, 3> unravel(std::size_t flat) const {
    return {flat / (dims[1] * dims[2]), (flat / dims[2]) % dims[1], flat % dims[2]};
  }
  Point point(std::size_t i, std::size_t j, std::size_t k) const {
    return origin + Eigen::Vector3d(i * spacing[0], j * spacing[1], k * spacing[2]);
  }
  Point point(std::size_t flat) const {
    auto [i, j, k] = unravel(flat);
    return point(i, j, k);
  }
  /// Throws DomainError unless dims >= min_dim and spacing > 0 on every axis.
  void validate(std::size_t min_dim = 2) const;

  bool operator==(const GridGeometry& o) const {
    return dims == o.dims && origin == o.origin && spacing == o.spacing;
  }
};

template <class Scalar>
struct Grid3 {
  GridGeometry geometry;
  std::vector<Scalar> values;

  Grid3() = default;
  explicit Grid3(const GridGeometry& g, Scalar fill = Scalar(0)) : geometry(g), values(g.size(), fill) {}

  Scalar& operator()(std::size_t i, std::size_t j, std::size_t k) { return values[geometry.index(i, j, k)]; }
  const Scalar& operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return values[geometry.index(i, j, k)];
  }
  const std::array<std::size_t, 3>& dims() const { return geometry.dims; }
};

using ScalarGrid3 = Grid3<cplx>;
using RealGrid3 = Grid3<double>;

/// XIG1 binary format: magic, 3 u32 dims, 3 f64 origin, 3 f64 spacing,
/// u8 complex flag, then f64 values (re, im pairs when complex). Little-endian.
void write_xig1(const std::filesystem::path& path, const ScalarGrid3& grid);
void write_xig1(const std::filesystem::path& path, const RealGrid3& grid);

/// Reads either flavour; real files come back with zero imaginary parts.
ScalarGrid3 read_xig1(const std::filesystem::path& path, bool* is_complex = nullptr);
RealGrid3 read_xig1_real(const std::filesystem::path& path);

}  // namespace dropinv
