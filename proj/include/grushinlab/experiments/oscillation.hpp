#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "grushinlab/fd_system.hpp"
#include "grushinlab/geometry.hpp"
#include "grushinlab/grid.hpp"
#include "grushinlab/solver.hpp"

namespace grushinlab::experiments {

struct OscillationConfig {
  std::size_t tangential_count = 129;
  std::size_t normal_count = 65;
  /// <= 0 selects 1+alpha.
  double grading = -1.0;
  /// Data on the curved and lateral part, and on {x_n = 0}.
  double outer_value = 1.0;
  double flat_value = 0.5;
  /// M in c0 = 1 - sup / M; must bound the data.
  double data_bound = 1.0;
  double tol = 1e-10;
  long max_iter = 5000;
};

struct OscillationReport {
  double sup_inner = 0.0;
  double c0_empirical = 0.0;
  std::array<double, 3> shells{};
  std::size_t shell_nodes = 0;
  SolveReport solve;
};

/// Level |x'|^2 + x_n^{2(1+alpha)} of the origin-centred ellipsoids.
inline double origin_level(const HalfSpacePoint& x, const GrushinParams& p) {
  return x.tangential_norm_sq() + std::pow(x.normal(), p.normal_weight());
}

/// Solves on the bounding box of E_{4R} with every node outside E_{4R} \ E_R
/// held at Dirichlet data, then takes the sup of u over the nodes next to
/// {level = 2R}: both ends of every axis edge across which level - 2R changes sign.
inline OscillationReport run_oscillation_decay(const CoefficientField& field, const GrushinParams& p, double R,
                                               const OscillationConfig& cfg = {}) {
  if (!(R > 0.0)) throw std::invalid_argument("oscillation decay: R must be > 0");
  if (!(cfg.data_bound > 0.0) || std::abs(cfg.outer_value) > cfg.data_bound || std::abs(cfg.flat_value) > cfg.data_bound) {
    throw std::invalid_argument("oscillation decay: data_bound must bound the boundary data");
  }
  const int n = p.n();
  const double W = std::sqrt(4.0 * R);
  const double H = std::pow(4.0 * R, 1.0 / p.normal_weight());
  std::vector<std::vector<double>> axes;
  for (int k = 0; k < n - 1; ++k) axes.push_back(uniform_axis(-W, W, cfg.tangential_count));
  const double grading = cfg.grading > 0.0 ? cfg.grading : 1.0 + p.alpha();
  axes.push_back(graded_normal_axis(H, cfg.normal_count, grading));
  const AnisotropicGrid g = AnisotropicGrid::from_axes(std::move(axes), grading);

  auto excluded = [&](const HalfSpacePoint& x) {
    const double q = origin_level(x, p);
    return q <= R || q >= 4.0 * R;
  };
  auto bc = [&](const HalfSpacePoint& x) { return x.normal() == 0.0 ? cfg.flat_value : cfg.outer_value; };
  const SparseSystem sys = assemble(field, g, p, bc, excluded);
  const SolveResult sol = solve(sys, cfg.tol, cfg.max_iter);

  OscillationReport out;
  out.solve = sol.report;
  out.shells = {R, 2.0 * R, 4.0 * R};
  std::vector<char> on_shell(g.size(), 0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double qi = origin_level(g.point(i), p) - 2.0 * R;
    const auto mi = g.multi_index(i);
    for (int k = 0; k < n; ++k) {
      if (mi[static_cast<std::size_t>(k)] + 1 >= g.count(k)) continue;
      const std::size_t j = i + g.stride(k);
      const double qj = origin_level(g.point(j), p) - 2.0 * R;
      if ((qi <= 0.0) != (qj <= 0.0)) on_shell[i] = on_shell[j] = 1;
    }
  }
  double sup = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!on_shell[i]) continue;
    ++out.shell_nodes;
    sup = std::max(sup, sol.u[static_cast<Eigen::Index>(i)]);
  }
  if (out.shell_nodes == 0) throw std::runtime_error("oscillation decay: grid too coarse to resolve the middle shell");
  out.sup_inner = sup;
  out.c0_empirical = 1.0 - sup / cfg.data_bound;
  return out;
}

}  // namespace grushinlab::experiments
