#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "dropinv/invert.hpp"

namespace dropinv {

GridGeometry slab_geometry(std::size_t points, double half, double x3_center, std::size_t layers) {
  if (points < 2 || layers < 1 || !(half > 0)) throw DomainError("slab_geometry: bad parameters");
  GridGeometry g;
  const double h = 2.0 * half / (points - 1);
  g.dims = {points, points, layers};
  g.spacing = Eigen::Vector3d(h, h, h);
  g.origin = Eigen::Vector3d(-half, -half, x3_center - 0.5 * (layers - 1) * h);
  return g;
}

ScanResult scan_contrast(const MediumField& medium, const DropletTemplate& tmpl, const GridGeometry& geometry,
                         double omega, const Point& theta, const ScanOptions& opts) {
  geometry.validate(1);
  for (std::size_t f = 0; f < geometry.size(); ++f) {
    Droplet d{geometry.point(f), tmpl.eps, tmpl.h, tmpl.kbar1, false};
    try {
      d.validate();
    } catch (const DomainError& e) {
      auto p = geometry.point(f);
      throw DomainError(std::string(e.what()) + " at z = (" + std::to_string(p[0]) + ", " + std::to_string(p[1]) +
                        ", " + std::to_string(p[2]) + ")");
    }
  }

  const CollocationSet colloc = sample_collocation(opts.n, opts.seed, std::nullopt, opts.colloc);
  const PerturbedSystem sys(medium, colloc, omega, theta, opts.solver);

  ScanResult res;
  if (opts.route == BackgroundRoute::consistent) {
    res.vinf = sys.background_backscatter();
  } else {
    DrmSolution v = solve_unperturbed(medium, colloc, omega, theta, std::nullopt, opts.solver);
    res.vinf = far_field_unperturbed(v, -sys.theta(), opts.solver);
  }

  res.xi = ScalarGrid3(geometry);
  const std::size_t total = geometry.size();
  std::atomic<std::size_t> next{0}, done{0}, reduced{0};
  std::mutex err_mu, progress_mu;
  std::exception_ptr err;

  auto worker = [&] {
    for (;;) {
      const std::size_t f = next.fetch_add(1);
      if (f >= total) return;
      {
        std::lock_guard<std::mutex> lk(err_mu);
        if (err) return;
      }
      const Point z = geometry.point(f);
      try {
        Droplet d{z, tmpl.eps, tmpl.h, tmpl.kbar1, false};
        auto near = sys.points_near(z, opts.colloc.exclusion_factor * tmpl.eps);
        auto contrast = [&](const PerturbedSystem& s, cplx vinf) {
          if (opts.formula == XiFormula::reciprocity) return s.reciprocal_contrast(d);
          return vinf - s.solve_backscatter(d);
        };
        if (near.empty()) {
          res.xi.values[f] = contrast(sys, res.vinf);
        } else {
          // Drop the nodes next to the droplet; the background is recomputed
          // on the reduced set so both fields share one discretization.
          PerturbedSystem sub = sys.without(near);
          const cplx vinf = opts.route == BackgroundRoute::consistent ? sub.background_backscatter() : res.vinf;
          res.xi.values[f] = contrast(sub, vinf);
          reduced.fetch_add(1);
        }
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!err) {
          try {
            throw NumericalError(std::string("scan failed at z = (") + std::to_string(z[0]) + ", " +
                                 std::to_string(z[1]) + ", " + std::to_string(z[2]) + "): " + e.what());
          } catch (...) {
            err = std::current_exception();
          }
        }
        return;
      }
      const std::size_t c = done.fetch_add(1) + 1;
      if (opts.progress) {
        std::lock_guard<std::mutex> lk(progress_mu);
        opts.progress(c, total);
      }
    }
  };

  const int nw = std::max(1, opts.workers);
  if (nw == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (err) std::rethrow_exception(err);
  res.reduced_points = reduced.load();
  return res;
}

}  // namespace dropinv
