#include <doctest.h>

#include <cmath>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dropinv/mollify.hpp"

using namespace dropinv;
using boost::math::quadrature::gauss_kronrod;

namespace {
ScalarGrid3 sample_grid(std::size_t n, double h, const std::function<cplx(const Point&)>& f) {
  GridGeometry g;
  g.dims = {n, n, n};
  g.origin = Eigen::Vector3d::Constant(-0.5 * h * (n - 1));
  g.spacing = Eigen::Vector3d::Constant(h);
  ScalarGrid3 out(g);
  for (std::size_t q = 0; q < g.size(); ++q) out.values[q] = f(g.point(q));
  return out;
}

double max_diff(const ScalarGrid3& a, const ScalarGrid3& b) {
  double m = 0;
  for (std::size_t q = 0; q < a.values.size(); ++q) m = std::max(m, std::abs(a.values[q] - b.values[q]));
  return m;
}

double max_dev(const ScalarGrid3& a, cplx v) {
  double m = 0;
  for (cplx x : a.values) m = std::max(m, std::abs(x - v));
  return m;
}
}  // namespace

TEST_SUITE("mollify") {
  TEST_CASE("bump normalization and shape") {
    double raw = gauss_kronrod<double, 61>::integrate([](double x) { return std::exp(1.0 / (x * x - 1.0)); }, -1.0,
                                                        1.0, 15, 1e-14);
    CHECK(raw == doctest::Approx(0.44399).epsilon(1e-5));
    CHECK(eta_normalization() == doctest::Approx(1.0 / raw).epsilon(1e-12));
    CHECK(std::abs(eta_normalization() - 2.2523) < 1e-4);
    double total = gauss_kronrod<double, 61>::integrate([](double x) { return eta(x); }, -1.0, 1.0, 15, 1e-14);
    CHECK(std::abs(total - 1.0) <= 1e-8);
    CHECK(eta(1.0) == 0.0);
    CHECK(eta(-1.0) == 0.0);
    CHECK(eta(1.5) == 0.0);
    CHECK(eta_deriv(0.0, 1) == 0.0);
    for (double x : {-0.9, -0.4, 0.1, 0.7}) {
      CHECK(eta(x) > 0);
      CHECK(eta(x) == eta(-x));
      const double h = 1e-6;
      CHECK(eta_deriv(x, 1) == doctest::Approx((eta(x + h) - eta(x - h)) / (2 * h)).epsilon(1e-7));
      CHECK(eta_deriv(x, 2) ==
            doctest::Approx((eta_deriv(x + h, 1) - eta_deriv(x - h, 1)) / (2 * h)).epsilon(1e-7));
    }
    CHECK_THROWS_AS(eta_deriv(0.2, 3), DomainError);
  }

  TEST_CASE("scaled mollifier") {
    Mollifier mol(0.03);
    double total = gauss_kronrod<double, 61>::integrate([&](double t) { return mol(t); }, -0.03, 0.03, 15, 1e-14);
    CHECK(std::abs(total - 1.0) <= 1e-8);
    CHECK(mol(0.03) == 0.0);
    CHECK(mol(-0.031) == 0.0);
    CHECK(mol(0.01) >= 0.0);
    CHECK(mol.half_width(0.0025) == 12);
    CHECK_THROWS_AS(mol.half_width(0.011), DomainError);
    CHECK_THROWS_AS(Mollifier(0.0), DomainError);
    Eigen::VectorXd w1 = mol.stencil(0.0025, 1), w2 = mol.stencil(0.0025, 2);
    CHECK(std::abs(w1.sum()) <= 1e-10);
    CHECK(std::abs(w2.sum()) <= 1e-8);
  }

  TEST_CASE("one-dimensional mollified derivatives") {
    const double h = 0.0025, delta = 0.03;
    const int n = 201;
    Eigen::VectorXcd c = Eigen::VectorXcd::Constant(n, cplx(3.0, -2.0));
    CHECK(mollified_deriv_1d(c, h, delta, 1).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(mollified_deriv_1d(c, h, delta, 2).cwiseAbs().maxCoeff() <= 1e-10);

    Eigen::VectorXd sq(n);
    for (int i = 0; i < n; ++i) sq[i] = std::pow(i * h - 0.25, 2);
    Eigen::VectorXd d2 = mollified_deriv_1d(sq, h, delta, 2);
    CHECK(d2.size() == n - 24);
    CHECK((d2.array() - 2.0).abs().maxCoeff() <= 1e-3);
    Eigen::VectorXd d1 = mollified_deriv_1d(sq, h, delta, 1);
    for (Eigen::Index i = 0; i < d1.size(); ++i) CHECK(d1[i] == doctest::Approx(2 * ((i + 12) * h - 0.25)).epsilon(1e-9));

    // O(delta^2) convergence on sin.
    auto err = [&](double dl) {
      const double hh = 0.005;
      const int m = 801;
      Eigen::VectorXd s(m);
      for (int i = 0; i < m; ++i) s[i] = std::sin(i * hh);
      Eigen::VectorXd d = mollified_deriv_1d(s, hh, dl, 1);
      int off = Mollifier(dl).half_width(hh);
      double e = 0;
      for (Eigen::Index i = 0; i < d.size(); ++i) e = std::max(e, std::abs(d[i] - std::cos((i + off) * hh)));
      return e;
    };
    double ratio = err(0.2) / err(0.1);
    CAPTURE(ratio);
    CHECK(ratio > 3.0);
    CHECK(ratio < 5.0);

    Eigen::VectorXd tiny(24);
    tiny.setZero();
    CHECK_THROWS_AS(mollified_deriv_1d(tiny, h, delta, 1), DomainError);
    CHECK_THROWS_AS(mollified_deriv_1d(sq, h, 0.005, 1), DomainError);
  }

  TEST_CASE("outputs ignore samples beyond the support") {
    const double h = 0.01, delta = 0.05;
    Eigen::VectorXd s(101);
    for (int i = 0; i < 101; ++i) s[i] = std::cos(3.0 * i * h);
    Eigen::VectorXd base = mollified_deriv_1d(s, h, delta, 2);
    Eigen::VectorXd p = s;
    p[80] += 10.0;
    Eigen::VectorXd moved = mollified_deriv_1d(p, h, delta, 2);
    // Output i sits at sample i + 5; sample 80 reaches outputs 70..80 only.
    for (Eigen::Index i = 0; i < base.size(); ++i) {
      if (i + 5 < 75 || i + 5 > 85) CHECK(moved[i] == base[i]);
    }
    CHECK(moved[75] != base[75]);
  }

  TEST_CASE("gradient and Laplacian of polynomial fields") {
    const double h = 0.01, delta = 0.04;
    ScalarGrid3 lin = sample_grid(21, h, [](const Point& z) { return cplx(z[0] + 2 * z[1] + 3 * z[2]); });
    GradLaplace gl = grad_laplace(lin, delta);
    CHECK(gl.geometry.dims == std::array<std::size_t, 3>{13, 13, 13});
    CHECK(gl.geometry.origin[0] == doctest::Approx(lin.geometry.origin[0] + 4 * h).epsilon(1e-15));
    CHECK(max_dev(gl.grad[0], 1.0) <= 1e-3);
    CHECK(max_dev(gl.grad[1], 2.0) <= 1e-3);
    CHECK(max_dev(gl.grad[2], 3.0) <= 1e-3);
    CHECK(max_dev(gl.laplace, 0.0) <= 1e-3);

    ScalarGrid3 sq = sample_grid(21, h, [](const Point& z) { return cplx(z.squaredNorm()); });
    CHECK(max_dev(grad_laplace(sq, delta).laplace, 6.0) <= 1e-2);

    ScalarGrid3 coarse = sample_grid(7, h, [](const Point&) { return cplx(1.0); });
    CHECK_THROWS_AS(grad_laplace(coarse, delta), DomainError);
  }

  TEST_CASE("complex fields and linearity") {
    const double h = 0.02, delta = 0.08;
    auto f = [](const Point& z) { return std::sin(z[0]) * std::cos(2 * z[1]) + z[2] * z[2]; };
    auto g = [](const Point& z) { return std::exp(z[0] - z[2]) + z[1]; };
    ScalarGrid3 fr = sample_grid(17, h, [&](const Point& z) { return cplx(f(z)); });
    ScalarGrid3 gr = sample_grid(17, h, [&](const Point& z) { return cplx(g(z)); });
    ScalarGrid3 fg = sample_grid(17, h, [&](const Point& z) { return cplx(f(z), g(z)); });
    GradLaplace a = grad_laplace(fr, delta), b = grad_laplace(gr, delta), c = grad_laplace(fg, delta);
    double dev = 0;
    for (std::size_t q = 0; q < c.laplace.values.size(); ++q) {
      dev = std::max(dev, std::abs(c.laplace.values[q] - cplx(a.laplace.values[q].real(), b.laplace.values[q].real())));
      for (int ax = 0; ax < 3; ++ax)
        dev = std::max(dev, std::abs(c.grad[ax].values[q] -
                                     cplx(a.grad[ax].values[q].real(), b.grad[ax].values[q].real())));
    }
    CHECK(dev <= 1e-14 * 1e3);

    const cplx s1(2.0, -1.0), s2(0.5, 3.0);
    ScalarGrid3 mix = fr;
    for (std::size_t q = 0; q < mix.values.size(); ++q) mix.values[q] = s1 * fr.values[q] + s2 * gr.values[q];
    GradLaplace m = grad_laplace(mix, delta);
    ScalarGrid3 expect = m.laplace;
    for (std::size_t q = 0; q < expect.values.size(); ++q)
      expect.values[q] = s1 * a.laplace.values[q] + s2 * b.laplace.values[q];
    double scale = 0;
    for (cplx v : expect.values) scale = std::max(scale, std::abs(v));
    CHECK(max_diff(m.laplace, expect) <= 1e-12 * std::max(1.0, scale) * 10);
  }

  TEST_CASE("Laplacian noise response is linear in the noise level") {
    const double h = 0.01, delta = 0.05;
    auto run = [&](double tau, unsigned seed) {
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> u(-tau, tau);
      ScalarGrid3 clean = sample_grid(21, h, [](const Point& z) { return cplx(z.squaredNorm()); });
      ScalarGrid3 noisy = clean;
      for (cplx& v : noisy.values) v += u(rng);
      return max_diff(grad_laplace(noisy, delta).laplace, grad_laplace(clean, delta).laplace);
    };
    double ratio = run(1e-2, 1) / run(1e-3, 2);
    CAPTURE(ratio);
    CHECK(ratio >= 5.0);
    CHECK(ratio <= 20.0);
  }
}
