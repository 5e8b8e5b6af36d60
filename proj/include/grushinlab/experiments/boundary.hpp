#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "grushinlab/fd_system.hpp"
#include "grushinlab/fit.hpp"
#include "grushinlab/geometry.hpp"
#include "grushinlab/grid.hpp"
#include "grushinlab/rng.hpp"
#include "grushinlab/solver.hpp"

namespace grushinlab::experiments {

/// A Dirichlet problem on a box sitting on {x_n = 0}.
struct BoxProblem {
  std::vector<double> box_lo;
  std::vector<double> box_hi;
  std::vector<std::size_t> counts;
  /// <= 0 selects 1+alpha.
  double grading = -1.0;
  BoundaryFn bc;
  double tol = 1e-10;
  long max_iter = 5000;
};

struct BoxSolution {
  AnisotropicGrid grid;
  Eigen::VectorXd u;
  SolveReport report;
};

inline BoxSolution solve_box(const CoefficientField& field, const GrushinParams& p, const BoxProblem& prob) {
  const double grading = prob.grading > 0.0 ? prob.grading : 1.0 + p.alpha();
  AnisotropicGrid grid = build_grid(prob.box_lo, prob.box_hi, prob.counts, grading);
  const SparseSystem sys = assemble(field, grid, p, prob.bc);
  SolveResult sol = solve(sys, prob.tol, prob.max_iter);
  return BoxSolution{std::move(grid), std::move(sol.u), sol.report};
}

/// Same box with every count replaced by 2 (count - 1) + 1.
inline BoxProblem refined(BoxProblem prob) {
  for (auto& c : prob.counts) c = 2 * (c - 1) + 1;
  return prob;
}

struct BoundaryGrowthResult {
  /// Smallest C with |u| <= C x_n over all nodes.
  double bound_constant = 0.0;
  std::optional<FitResult> fit;
  std::string fit_refused;
  /// (x_n, u) along the inward normal ray used for the fit.
  std::vector<std::pair<double, double>> ray;
  SolveReport solve;
};

/// Linear growth off the flat boundary: the constant in |u| <= C x_n and the
/// log-log slope of |u| along the normal line nearest to anchor_tangential,
/// restricted to x_n <= ray_fraction * height.
inline BoundaryGrowthResult run_boundary_growth(const CoefficientField& field, const GrushinParams& p,
                                                const BoxProblem& prob, const std::vector<double>& anchor_tangential,
                                                double ray_fraction = 0.25) {
  const BoxSolution sol = solve_box(field, p, prob);
  const AnisotropicGrid& g = sol.grid;
  const int m = p.n() - 1;
  if (static_cast<int>(anchor_tangential.size()) != m) throw std::invalid_argument("boundary growth: anchor dimension");

  BoundaryGrowthResult out;
  out.solve = sol.report;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double xn = g.coords(i).back();
    if (xn > 0.0) out.bound_constant = std::max(out.bound_constant, std::abs(sol.u[static_cast<Eigen::Index>(i)]) / xn);
  }

  std::vector<std::size_t> mi(static_cast<std::size_t>(p.n()), 0);
  for (int k = 0; k < m; ++k) {
    const auto& ax = g.axis(k);
    const auto it = std::min_element(ax.begin(), ax.end(), [&](double a, double b) {
      return std::abs(a - anchor_tangential[static_cast<std::size_t>(k)]) <
             std::abs(b - anchor_tangential[static_cast<std::size_t>(k)]);
    });
    mi[static_cast<std::size_t>(k)] = static_cast<std::size_t>(it - ax.begin());
  }
  const auto& normal_axis = g.axis(m);
  const double cutoff = ray_fraction * normal_axis.back();
  std::vector<double> ts, us;
  bool degenerate = false;
  for (std::size_t j = 1; j + 1 < normal_axis.size() && normal_axis[j] <= cutoff; ++j) {
    mi[static_cast<std::size_t>(m)] = j;
    const double u = std::abs(sol.u[static_cast<Eigen::Index>(g.index(mi))]);
    out.ray.emplace_back(normal_axis[j], u);
    if (u < 1e-12) degenerate = true;
    ts.push_back(normal_axis[j]);
    us.push_back(u);
  }
  if (degenerate) {
    out.fit_refused = "|u| < 1e-12 along the ray";
  } else {
    try {
      out.fit = fit_loglog(ts, us);
    } catch (const FitRefused& e) {
      out.fit_refused = e.what();
    }
  }
  return out;
}

struct HolderLevel {
  std::vector<std::size_t> counts;
  double max_quotient = 0.0;
  std::vector<double> argmax_y;
  std::vector<double> argmax_z;
  std::size_t pairs = 0;
  SolveReport solve;
};

struct HolderResult {
  double exponent = 0.0;
  std::vector<HolderLevel> levels;
};

struct HolderConfig {
  /// Coarsest problem; each further level doubles the cells per axis.
  BoxProblem problem;
  std::size_t levels = 3;
  /// Pairs are drawn from nodes in [inner_lo, inner_hi].
  std::vector<double> inner_lo;
  std::vector<double> inner_hi;
  std::size_t pairs = 100000;
  std::uint64_t seed = 1;
};

/// max |u(y) - u(z)| / d_alpha(y, z)^exponent over a stratified random sample of
/// node pairs: one half on shared normal lines, one quarter on shared
/// tangential layers, the rest unrestricted.
inline double holder_quotient(const HalfSpacePoint& y, const HalfSpacePoint& z, double uy, double uz, double alpha,
                              double exponent) {
  const double d = quasi_distance(y, z, alpha);
  return d > 0.0 ? std::abs(uy - uz) / std::pow(d, exponent) : 0.0;
}

inline HolderResult run_holder_modulus(const CoefficientField& field, const GrushinParams& p, const HolderConfig& cfg,
                                       double exponent) {
  const int n = p.n();
  const int m = n - 1;
  HolderResult out;
  out.exponent = exponent;
  BoxProblem prob = cfg.problem;
  for (std::size_t level = 0; level < cfg.levels; ++level, prob = refined(prob)) {
    const BoxSolution sol = solve_box(field, p, prob);
    const AnisotropicGrid& g = sol.grid;
    // Index ranges of the inner box per axis.
    std::vector<std::size_t> lo(static_cast<std::size_t>(n)), hi(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      const auto& ax = g.axis(k);
      const auto ks = static_cast<std::size_t>(k);
      lo[ks] = static_cast<std::size_t>(std::lower_bound(ax.begin(), ax.end(), cfg.inner_lo[ks]) - ax.begin());
      hi[ks] = static_cast<std::size_t>(std::upper_bound(ax.begin(), ax.end(), cfg.inner_hi[ks]) - ax.begin());
      if (hi[ks] <= lo[ks] + 1) throw std::invalid_argument("holder modulus: inner box holds fewer than 2 nodes per axis");
    }
    Rng rng(cfg.seed + 7919 * level);
    auto draw = [&](std::vector<std::size_t>& mi, int k) {
      const auto ks = static_cast<std::size_t>(k);
      mi[ks] = lo[ks] + static_cast<std::size_t>(rng.below(hi[ks] - lo[ks]));
    };
    HolderLevel lv;
    lv.counts = prob.counts;
    lv.solve = sol.report;
    std::vector<std::size_t> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n));
    for (std::size_t s = 0; s < cfg.pairs; ++s) {
      for (int k = 0; k < n; ++k) {
        draw(a, k);
        draw(b, k);
      }
      if (s % 4 < 2) {
        for (int k = 0; k < m; ++k) b[static_cast<std::size_t>(k)] = a[static_cast<std::size_t>(k)];
      } else if (s % 4 == 2) {
        b[static_cast<std::size_t>(m)] = a[static_cast<std::size_t>(m)];
      }
      const std::size_t ia = g.index(a);
      const std::size_t ib = g.index(b);
      if (ia == ib) continue;
      const HalfSpacePoint y = g.point(ia);
      const HalfSpacePoint z = g.point(ib);
      const double q = holder_quotient(y, z, sol.u[static_cast<Eigen::Index>(ia)], sol.u[static_cast<Eigen::Index>(ib)],
                                       p.alpha(), exponent);
      ++lv.pairs;
      if (q > lv.max_quotient) {
        lv.max_quotient = q;
        lv.argmax_y = g.coords(ia);
        lv.argmax_z = g.coords(ib);
      }
    }
    out.levels.push_back(std::move(lv));
  }
  return out;
}

}  // namespace grushinlab::experiments
