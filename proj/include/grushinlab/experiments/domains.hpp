#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "grushinlab/fd_system.hpp"
#include "grushinlab/geometry.hpp"
#include "grushinlab/grid.hpp"
#include "grushinlab/params.hpp"

namespace grushinlab::experiments {

/// Exterior-type domain: the bounding box of the gauge ball of radius
/// outer_radius minus the bounding box of the gauge ball of radius inner_radius.
///
/// A gauge ball of radius r has tangential half-width r^{1+alpha} and normal
/// height r (1+alpha)^{1/(1+alpha)}. Tangential axes are sinh-clustered around
/// 0 with core spacing core_factor * inner half-width; the normal axis is
/// graded with exponent 1+alpha.
struct ExteriorDomainConfig {
  double inner_radius = 1.0;
  double outer_radius = 32.0;
  std::size_t tangential_count = 401;
  std::size_t normal_count = 201;
  double core_factor = 0.2;
  /// <= 0 selects 1+alpha.
  double grading = -1.0;
};

struct ExteriorDomain {
  AnisotropicGrid grid;
  double inner_half_width;
  double inner_height;

  bool in_inner_box(const HalfSpacePoint& x) const {
    for (double t : x.tangential())
      if (std::abs(t) > inner_half_width) return false;
    return x.normal() <= inner_height;
  }
};

inline double gauge_ball_half_width(double r, const GrushinParams& p) { return std::pow(r, 1.0 + p.alpha()); }
inline double gauge_ball_height(double r, const GrushinParams& p) {
  return r * std::pow(1.0 + p.alpha(), 1.0 / (1.0 + p.alpha()));
}

inline ExteriorDomain make_exterior_domain(const ExteriorDomainConfig& cfg, const GrushinParams& p) {
  if (!(cfg.inner_radius > 0.0 && cfg.outer_radius > 2.0 * cfg.inner_radius)) {
    throw std::invalid_argument("exterior domain: need 0 < 2 * inner_radius < outer_radius");
  }
  const double W = gauge_ball_half_width(cfg.outer_radius, p);
  const double H = gauge_ball_height(cfg.outer_radius, p);
  const double rw = gauge_ball_half_width(cfg.inner_radius, p);
  const double grading = cfg.grading > 0.0 ? cfg.grading : 1.0 + p.alpha();
  std::vector<std::vector<double>> axes;
  for (int k = 0; k < p.n() - 1; ++k) axes.push_back(sinh_axis(W, cfg.tangential_count, cfg.core_factor * rw));
  axes.push_back(graded_normal_axis(H, cfg.normal_count, grading));
  return ExteriorDomain{AnisotropicGrid::from_axes(std::move(axes), grading), rw, gauge_ball_height(cfg.inner_radius, p)};
}

/// Point of gauge 1 whose tangential part points along e_1, with
/// |x'|^2 = cos^2(theta) and beta x_n^{2+2alpha} = sin^2(theta).
inline HalfSpacePoint unit_gauge_point(double theta, const GrushinParams& p) {
  std::vector<double> t(static_cast<std::size_t>(p.n() - 1), 0.0);
  t[0] = std::cos(theta);
  const double xn = std::pow(std::sin(theta) * (1.0 + p.alpha()), 1.0 / (1.0 + p.alpha()));
  return HalfSpacePoint(std::move(t), xn);
}

/// Point with gauge d on the anisotropic ray through base: F_h(base) with h = (d / d(base))^{2(1+alpha)}.
inline HalfSpacePoint ray_point(const HalfSpacePoint& base, double d, const GrushinParams& p) {
  return apply_scaling(std::pow(d / gauge(base, p), p.normal_weight()), base, p);
}

/// Dirichlet nodes adjacent (within the 3^n neighbourhood) to a non-Dirichlet node.
inline std::vector<std::size_t> dirichlet_frontier(const AnisotropicGrid& grid, const SparseSystem& sys,
                                                   const RegionFn& region) {
  std::vector<std::size_t> out;
  const int n = grid.dim();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!sys.dirichlet_mask[i] || grid.on_box_boundary(i) || !region(grid.point(i))) continue;
    const auto mi = grid.multi_index(i);
    bool frontier = false;
    std::size_t combos = 1;
    for (int k = 0; k < n; ++k) combos *= 3;
    for (std::size_t c = 0; c < combos && !frontier; ++c) {
      std::size_t code = c;
      std::vector<std::size_t> nb = mi;
      bool valid = true;
      for (int k = 0; k < n; ++k) {
        const int s = static_cast<int>(code % 3) - 1;
        code /= 3;
        const auto ks = static_cast<std::size_t>(k);
        if ((s < 0 && nb[ks] == 0) || (s > 0 && nb[ks] + 1 >= grid.count(k))) {
          valid = false;
          break;
        }
        nb[ks] = static_cast<std::size_t>(static_cast<long>(nb[ks]) + s);
      }
      if (valid && !sys.dirichlet_mask[grid.index(nb)]) frontier = true;
    }
    if (frontier) out.push_back(i);
  }
  return out;
}

}  // namespace grushinlab::experiments
