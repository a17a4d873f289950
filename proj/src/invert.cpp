#include "dropinv/invert.hpp"

#include <algorithm>
#include <cmath>

#include "dropinv/mollify.hpp"
#include "dropinv/rng.hpp"

namespace dropinv {

std::string to_string(NoiseLaw law) { return law == NoiseLaw::uniform ? "uniform" : "cubic"; }

NoiseLaw noise_law_from_string(const std::string& s) {
  if (s == "uniform") return NoiseLaw::uniform;
  if (s == "cubic") return NoiseLaw::cubic;
  throw DomainError("unknown noise law '" + s + "' (expected uniform or cubic)");
}

ScalarGrid3 synth_noise(const ScalarGrid3& xi, double tau, std::uint64_t seed, NoiseLaw law) {
  if (!(tau >= 0)) throw DomainError("synth_noise: tau must be >= 0");
  ScalarGrid3 out = xi;
  if (tau == 0) return out;
  const double amp = law == NoiseLaw::uniform ? tau : std::pow(tau / 0.25, 3) * 0.25;
  const auto& d = xi.geometry.dims;
  for (std::size_t i = 0; i < d[0]; ++i)
    for (std::size_t j = 0; j < d[1]; ++j)
      for (std::size_t k = 0; k < d[2]; ++k) {
        double t = amp * (2.0 * keyed_uniform(seed, i, j, k) - 1.0);
        out(i, j, k) = xi(i, j, k) + t * xi(i, j, k);
      }
  return out;
}

NaturalSpline::NaturalSpline(const Eigen::VectorXcd& values, double spacing) : y_(values), h_(spacing) {
  const Eigen::Index n = values.size();
  if (n < 2) throw DomainError("NaturalSpline: need at least two samples");
  m_ = Eigen::VectorXcd::Zero(n);
  if (n == 2) return;
  // Thomas algorithm on M_{i-1} + 4 M_i + M_{i+1} = 6 (y_{i+1} - 2 y_i + y_{i-1}) / h^2.
  const Eigen::Index k = n - 2;
  Eigen::VectorXd c(k);
  Eigen::VectorXcd r(k);
  for (Eigen::Index i = 0; i < k; ++i) r[i] = 6.0 * (y_[i + 2] - 2.0 * y_[i + 1] + y_[i]) / (h_ * h_);
  c[0] = 0.25;
  r[0] /= 4.0;
  for (Eigen::Index i = 1; i < k; ++i) {
    double den = 4.0 - c[i - 1];
    c[i] = 1.0 / den;
    r[i] = (r[i] - r[i - 1]) / den;
  }
  m_[k] = r[k - 1];
  for (Eigen::Index i = k - 2; i >= 0; --i) m_[i + 1] = r[i] - c[i] * m_[i + 2];
}

cplx NaturalSpline::operator()(double t) const {
  const Eigen::Index n = y_.size();
  double u = t / h_;
  Eigen::Index i = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::floor(u)), 0, n - 2);
  double s = t - i * h_;
  if (std::abs(s) <= 1e-12 * h_) return y_[i];
  if (std::abs(s - h_) <= 1e-12 * h_) return y_[i + 1];
  double a = h_ - s;
  return m_[i] * (a * a * a) / (6 * h_) + m_[i + 1] * (s * s * s) / (6 * h_) + (y_[i] / h_ - m_[i] * h_ / 6.0) * a +
         (y_[i + 1] / h_ - m_[i + 1] * h_ / 6.0) * s;
}

namespace {

// Linear map taking coarse samples to fine samples along one axis.
Eigen::MatrixXd spline_operator(std::size_t nc, std::size_t nf, double hc, double hf) {
  Eigen::MatrixXd w(nf, nc);
  for (std::size_t c = 0; c < nc; ++c) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(nc));
    e[static_cast<Eigen::Index>(c)] = 1.0;
    NaturalSpline s(e, hc);
    for (std::size_t f = 0; f < nf; ++f) w(f, c) = s(f * hf).real();
  }
  return w;
}

}  // namespace

ScalarGrid3 refine_to(const ScalarGrid3& xi, const std::array<std::size_t, 3>& dims) {
  xi.geometry.validate(4);
  ScalarGrid3 cur = xi;
  for (int a = 0; a < 3; ++a) {
    if (dims[a] < 2) throw DomainError("refine: target dims must be >= 2");
    const std::size_t nc = cur.geometry.dims[a], nf = dims[a];
    const double extent = (nc - 1) * cur.geometry.spacing[a];
    const double hf = nf == nc ? cur.geometry.spacing[a] : extent / (nf - 1);
    Eigen::MatrixXd w = spline_operator(nc, nf, cur.geometry.spacing[a], hf);
    GridGeometry g = cur.geometry;
    g.dims[a] = nf;
    g.spacing[a] = hf;
    ScalarGrid3 next(g);
    std::array<std::size_t, 3> len = cur.geometry.dims;
    len[a] = 1;
    Eigen::VectorXcd line(static_cast<Eigen::Index>(nc));
    for (std::size_t i = 0; i < len[0]; ++i)
      for (std::size_t j = 0; j < len[1]; ++j)
        for (std::size_t k = 0; k < len[2]; ++k) {
          std::size_t idx[3] = {i, j, k};
          for (std::size_t c = 0; c < nc; ++c) {
            idx[a] = c;
            line[static_cast<Eigen::Index>(c)] = cur(idx[0], idx[1], idx[2]);
          }
          Eigen::VectorXcd fine(static_cast<Eigen::Index>(nf));
          fine.real() = w * line.real();
          fine.imag() = w * line.imag();
          for (std::size_t f = 0; f < nf; ++f) {
            idx[a] = f;
            next(idx[0], idx[1], idx[2]) = fine[static_cast<Eigen::Index>(f)];
          }
        }
    cur = std::move(next);
  }
  return cur;
}

ScalarGrid3 refine(const ScalarGrid3& xi, double factor) {
  if (!(factor >= 1)) throw DomainError("refine: factor must be >= 1");
  std::array<std::size_t, 3> dims;
  for (int a = 0; a < 3; ++a)
    dims[a] = static_cast<std::size_t>(std::llround((xi.geometry.dims[a] - 1) * factor)) + 1;
  return refine_to(xi, dims);
}

ReconstructionReport reconstruct_k0(const ScalarGrid3& xi_fine, double delta, double omega, double floor_rel) {
  if (!(omega > 0)) throw DomainError("reconstruct_k0: omega must be positive");
  GradLaplace gl = grad_laplace(xi_fine, delta);
  const GridGeometry& g = gl.geometry;
  const GridGeometry& in = xi_fine.geometry;
  std::size_t off[3];
  for (int a = 0; a < 3; ++a) off[a] = (in.dims[a] - g.dims[a]) / 2;

  double xmax = 0;
  for (const cplx& v : xi_fine.values) xmax = std::max(xmax, std::abs(v));
  const double floor = floor_rel * xmax;

  ReconstructionReport rep;
  rep.geometry = g;
  rep.k0_num = RealGrid3(g, std::numeric_limits<double>::quiet_NaN());
  rep.k0_imag_residual = RealGrid3(g, std::numeric_limits<double>::quiet_NaN());
  rep.valid.assign(g.size(), 0);
  rep.input_points = in.size();
  const double w2 = omega * omega;
  for (std::size_t i = 0; i < g.dims[0]; ++i)
    for (std::size_t j = 0; j < g.dims[1]; ++j)
      for (std::size_t k = 0; k < g.dims[2]; ++k) {
        const cplx x = xi_fine(i + off[0], j + off[1], k + off[2]);
        if (!(std::abs(x) > floor)) continue;
        cplx gg = 0.0;
        for (int a = 0; a < 3; ++a) gg += gl.grad[a](i, j, k) * gl.grad[a](i, j, k);
        const cplx inv = -(gl.laplace(i, j, k) / (2.0 * x) - gg / (4.0 * x * x)) / w2;
        if (inv == 0.0 || !std::isfinite(inv.real()) || !std::isfinite(inv.imag())) continue;
        const std::size_t f = g.index(i, j, k);
        rep.k0_num.values[f] = (1.0 / inv).real();
        rep.k0_imag_residual.values[f] = std::abs(inv.imag());
        rep.valid[f] = 1;
      }
  return rep;
}

Metrics metrics(const RealGrid3& k0_num, const std::vector<std::uint8_t>& valid, const MediumField& medium,
                std::size_t input_points) {
  const GridGeometry& g = k0_num.geometry;
  if (valid.size() != g.size()) throw DomainError("metrics: mask does not match the grid");
  Metrics m;
  m.pre = RealGrid3(g, std::numeric_limits<double>::quiet_NaN());
  double num = 0, den = 0;
  for (std::size_t f = 0; f < g.size(); ++f) {
    if (!valid[f]) continue;
    const cplx ke = medium.k0(g.point(f));
    const double diff = std::abs(ke - k0_num.values[f]);
    num += diff * diff;
    den += std::norm(ke);
    m.pre.values[f] = diff / std::abs(ke);
    ++m.valid_count;
  }
  if (m.valid_count == 0) throw DomainError("metrics: no valid points");
  m.gre = std::sqrt(num / den);
  const double total = static_cast<double>(input_points ? input_points : g.size());
  m.excluded_fraction = 1.0 - m.valid_count / total;
  return m;
}

void apply_metrics(ReconstructionReport& report, const MediumField& medium) {
  Metrics m = metrics(report.k0_num, report.valid, medium, report.input_points);
  report.gre = m.gre;
  report.pre = std::move(m.pre);
}

template <class Scalar>
Grid3<Scalar> slice_axis3(const Grid3<Scalar>& g, double x3, std::size_t* layer) {
  const GridGeometry& geo = g.geometry;
  const double u = (x3 - geo.origin[2]) / geo.spacing[2];
  const long long l = std::llround(u);
  if (l < 0 || l >= static_cast<long long>(geo.dims[2]) || std::abs(u - l) > 1e-6)
    throw DomainError("slice: x3 = " + std::to_string(x3) + " is not a grid plane");
  GridGeometry s = geo;
  s.dims[2] = 1;
  s.origin[2] = geo.origin[2] + l * geo.spacing[2];
  Grid3<Scalar> out(s);
  for (std::size_t i = 0; i < geo.dims[0]; ++i)
    for (std::size_t j = 0; j < geo.dims[1]; ++j) out(i, j, 0) = g(i, j, static_cast<std::size_t>(l));
  if (layer) *layer = static_cast<std::size_t>(l);
  return out;
}

template RealGrid3 slice_axis3(const RealGrid3&, double, std::size_t*);
template ScalarGrid3 slice_axis3(const ScalarGrid3&, double, std::size_t*);

std::vector<std::uint8_t> slice_mask_axis3(const GridGeometry& g, const std::vector<std::uint8_t>& mask,
                                           std::size_t layer) {
  std::vector<std::uint8_t> out;
  out.reserve(g.dims[0] * g.dims[1]);
  for (std::size_t i = 0; i < g.dims[0]; ++i)
    for (std::size_t j = 0; j < g.dims[1]; ++j) out.push_back(mask[g.index(i, j, layer)]);
  return out;
}

RbfFit::RbfFit(PointSet nodes, const Eigen::VectorXcd& values, double cond_limit) : nodes_(std::move(nodes)) {
  if (nodes_.cols() != values.size()) throw DomainError("fit_k0_rbf: node and value counts differ");
  if (nodes_.cols() == 0) throw DomainError("fit_k0_rbf: no nodes");
  RbfInterpolator interp(nodes_, cond_limit);
  gamma_ = interp.solve(values);
  Eigen::VectorXcd back = interp.matrix().cast<cplx>() * gamma_;
  residual_ = (back - values).cwiseAbs().maxCoeff();
}

cplx RbfFit::operator()(const Point& x) const {
  cplx acc = 0.0;
  for (Eigen::Index k = 0; k < nodes_.cols(); ++k) acc += gamma_[k] * (1.0 + (x - nodes_.col(k)).norm());
  return acc;
}

RbfFit fit_k0_rbf(const PointSet& nodes, const Eigen::VectorXcd& values) { return RbfFit(nodes, values); }

}  // namespace dropinv
