#include "dropinv/mollify.hpp"

#include <cmath>
#include <string>

#include "dropinv/quad.hpp"

namespace dropinv {

namespace {

double bump(double x) {
  double u = x * x - 1.0;
  return u < 0 ? std::exp(1.0 / u) : 0.0;
}

double compute_normalization() {
  // Composite Gauss-Legendre; the integrand is flat to all orders at +-1.
  Rule1D gl = gauss_legendre(40);
  const int panels = 16;
  double sum = 0;
  for (int p = 0; p < panels; ++p) {
    double a = -1.0 + 2.0 * p / panels, b = a + 2.0 / panels;
    for (Eigen::Index i = 0; i < gl.nodes.size(); ++i)
      sum += 0.5 * (b - a) * gl.weights[i] * bump(0.5 * (a + b) + 0.5 * (b - a) * gl.nodes[i]);
  }
  return 1.0 / sum;
}

}  // namespace

double eta_normalization() {
  static const double c = compute_normalization();
  return c;
}

double eta(double x) { return eta_normalization() * bump(x); }

double eta_deriv(double x, int order) {
  if (order == 0) return eta(x);
  if (order != 1 && order != 2) throw DomainError("eta_deriv: order must be 1 or 2");
  double u = x * x - 1.0;
  if (u >= 0) return 0.0;
  double e = eta(x);
  double g = -2.0 * x / (u * u);  // d/dx of 1/u
  if (order == 1) return e * g;
  double dg = -2.0 / (u * u) + 8.0 * x * x / (u * u * u);
  return e * (g * g + dg);
}

Mollifier::Mollifier(double delta) : delta_(delta) {
  if (!(delta > 0)) throw DomainError("Mollifier: delta must be positive");
}

double Mollifier::operator()(double t) const { return eta(t / delta_) / delta_; }

double Mollifier::deriv(double t, int order) const {
  return eta_deriv(t / delta_, order) / std::pow(delta_, 1 + order);
}

int Mollifier::half_width(double spacing) const {
  if (!(spacing > 0)) throw DomainError("Mollifier: spacing must be positive");
  if (delta_ < 3.0 * spacing * (1 - 1e-12))
    throw DomainError("Mollifier: delta " + std::to_string(delta_) + " is below 3 x spacing " + std::to_string(spacing));
  return static_cast<int>(std::floor(delta_ / spacing * (1 + 1e-12)));
}

Eigen::VectorXd Mollifier::stencil(double spacing, int order) const {
  if (order != 1 && order != 2) throw DomainError("Mollifier::stencil: order must be 1 or 2");
  const int m = half_width(spacing);
  Eigen::VectorXd w(2 * m + 1), e(2 * m + 1), t(2 * m + 1);
  for (int j = -m; j <= m; ++j) {
    t[j + m] = j * spacing;
    w[j + m] = spacing * deriv(j * spacing, order);
    e[j + m] = spacing * (*this)(j * spacing);
  }
  if (order == 1) {
    // Antisymmetric already; fix the first moment so d/dx x = 1.
    w /= -(w.array() * t.array()).sum();
  } else {
    w -= (w.sum() / e.sum()) * e;
    w /= 0.5 * (w.array() * t.array().square()).sum();
  }
  return w;
}

GradLaplace grad_laplace(const ScalarGrid3& field, double delta) {
  const GridGeometry& g = field.geometry;
  g.validate(2);
  Mollifier mol(delta);
  int m[3];
  Eigen::VectorXd w1[3], w2[3];
  GradLaplace out;
  out.geometry = g;
  for (int a = 0; a < 3; ++a) {
    m[a] = mol.half_width(g.spacing[a]);
    if (g.dims[a] <= static_cast<std::size_t>(2 * m[a]))
      throw DomainError("grad_laplace: grid too coarse along axis " + std::to_string(a) + " for delta");
    w1[a] = mol.stencil(g.spacing[a], 1);
    w2[a] = mol.stencil(g.spacing[a], 2);
    out.geometry.dims[a] = g.dims[a] - 2 * m[a];
    out.geometry.origin[a] = g.origin[a] + m[a] * g.spacing[a];
  }
  for (auto& c : out.grad) c = ScalarGrid3(out.geometry);
  out.laplace = ScalarGrid3(out.geometry);

  const auto& od = out.geometry.dims;
  for (std::size_t i = 0; i < od[0]; ++i)
    for (std::size_t j = 0; j < od[1]; ++j)
      for (std::size_t k = 0; k < od[2]; ++k) {
        const std::size_t base[3] = {i + m[0], j + m[1], k + m[2]};
        cplx lap = 0.0;
        for (int a = 0; a < 3; ++a) {
          cplx d1 = 0.0, d2 = 0.0;
          std::size_t idx[3] = {base[0], base[1], base[2]};
          for (int s = -m[a]; s <= m[a]; ++s) {
            idx[a] = base[a] - s;
            const cplx f = field(idx[0], idx[1], idx[2]);
            d1 += w1[a][s + m[a]] * f;
            d2 += w2[a][s + m[a]] * f;
          }
          out.grad[a](i, j, k) = d1;
          lap += d2;
        }
        out.laplace(i, j, k) = lap;
      }
  return out;
}

}  // namespace dropinv
