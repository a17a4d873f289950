#include "dropinv/grid.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

namespace dropinv {

void GridGeometry::validate(std::size_t min_dim) const {
  for (int a = 0; a < 3; ++a) {
    if (dims[a] < min_dim)
      throw DomainError("grid: axis " + std::to_string(a) + " has " + std::to_string(dims[a]) + " points, need >= " +
                        std::to_string(min_dim));
    if (!(spacing[a] > 0)) throw DomainError("grid: spacing must be positive");
  }
}

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
void put(std::ostream& os, T v) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  os.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  unsigned char b[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(b), sizeof(T))) throw DomainError("xig1: truncated file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw DomainError("xig1: cannot open " + path.string() + " for writing");
  return os;
}

void put_header(std::ostream& os, const GridGeometry& g, bool is_complex) {
  os.write("XIG1", 4);
  for (auto d : g.dims) put<std::uint32_t>(os, static_cast<std::uint32_t>(d));
  for (int a = 0; a < 3; ++a) put<double>(os, g.origin[a]);
  for (int a = 0; a < 3; ++a) put<double>(os, g.spacing[a]);
  put<std::uint8_t>(os, is_complex ? 1 : 0);
}

}  // namespace

void write_xig1(const std::filesystem::path& path, const ScalarGrid3& grid) {
  auto os = open_out(path);
  put_header(os, grid.geometry, true);
  for (const cplx& v : grid.values) {
    put<double>(os, v.real());
    put<double>(os, v.imag());
  }
  if (!os) throw DomainError("xig1: write failed for " + path.string());
}

void write_xig1(const std::filesystem::path& path, const RealGrid3& grid) {
  auto os = open_out(path);
  put_header(os, grid.geometry, false);
  for (double v : grid.values) put<double>(os, v);
  if (!os) throw DomainError("xig1: write failed for " + path.string());
}

ScalarGrid3 read_xig1(const std::filesystem::path& path, bool* is_complex) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DomainError("xig1: cannot open " + path.string());
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "XIG1", 4) != 0) throw DomainError("xig1: bad magic in " + path.string());
  GridGeometry g;
  for (auto& d : g.dims) d = get<std::uint32_t>(is);
  for (int a = 0; a < 3; ++a) g.origin[a] = get<double>(is);
  for (int a = 0; a < 3; ++a) g.spacing[a] = get<double>(is);
  auto flag = get<std::uint8_t>(is);
  if (flag > 1) throw DomainError("xig1: bad value flag");
  ScalarGrid3 out(g);
  for (auto& v : out.values) {
    double re = get<double>(is);
    double im = flag ? get<double>(is) : 0.0;
    v = cplx(re, im);
  }
  if (is.peek() != std::char_traits<char>::eof()) throw DomainError("xig1: trailing bytes in " + path.string());
  if (is_complex) *is_complex = flag == 1;
  return out;
}

RealGrid3 read_xig1_real(const std::filesystem::path& path) {
  bool cx = false;
  ScalarGrid3 g = read_xig1(path, &cx);
  if (cx) throw DomainError("xig1: expected a real grid in " + path.string());
  RealGrid3 out(g.geometry);
  for (std::size_t i = 0; i < g.values.size(); ++i) out.values[i] = g.values[i].real();
  return out;
}

}  // namespace dropinv
