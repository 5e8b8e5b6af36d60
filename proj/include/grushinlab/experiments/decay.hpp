#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "grushinlab/closed_forms.hpp"
#include "grushinlab/experiments/domains.hpp"
#include "grushinlab/fd_system.hpp"
#include "grushinlab/fit.hpp"
#include "grushinlab/solver.hpp"

namespace grushinlab::experiments {

struct RaySample {
  double gauge = 0.0;
  double normal = 0.0;
  double u = 0.0;
  double w = 0.0;
};

struct DecayFitConfig {
  ExteriorDomainConfig domain;
  /// Angle of the anisotropic ray, see unit_gauge_point.
  double ray_theta = std::numbers::pi / 4.0;
  /// Fit window in gauge: [fit_lo_factor * inner_radius, fit_hi_fraction * outer_radius].
  double fit_lo_factor = 2.0;
  double fit_hi_fraction = 0.25;
  std::size_t ray_samples = 12;
  double tol = 1e-10;
  long max_iter = 5000;
};

struct DecayFitResult {
  FitResult fit;
  double expected_slope = 0.0;
  SolveReport solve;
  std::vector<RaySample> samples;
};

namespace detail {

inline std::vector<HalfSpacePoint> decay_ray(const DecayFitConfig& cfg, const GrushinParams& p) {
  const double lo = cfg.fit_lo_factor * cfg.domain.inner_radius;
  const double hi = cfg.fit_hi_fraction * cfg.domain.outer_radius;
  if (!(hi > lo) || cfg.ray_samples < 2) throw std::invalid_argument("decay fit: empty fit window");
  const HalfSpacePoint base = unit_gauge_point(cfg.ray_theta, p);
  std::vector<HalfSpacePoint> pts;
  for (std::size_t k = 0; k < cfg.ray_samples; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(cfg.ray_samples - 1);
    pts.push_back(ray_point(base, lo * std::pow(hi / lo, t), p));
  }
  return pts;
}

inline FitResult fit_ray(const std::vector<RaySample>& samples) {
  std::vector<double> ds, ys;
  for (const auto& s : samples) {
    if (s.u > 1e-10) {
      ds.push_back(s.gauge);
      ys.push_back(s.u / s.normal);
    }
  }
  if (ds.size() < 5) throw FitRefused("decay fit: fewer than 5 ray points with u > 1e-10");
  return fit_loglog(ds, ys);
}

}  // namespace detail

/// Fits log(u/x_n) against log d(x) along an anisotropic ray for the exterior
/// problem with u = 1 on the inner box, 0 on {x_n = 0} and on the far faces.
inline DecayFitResult run_decay_fit(const CoefficientField& field, const GrushinParams& p, const DecayFitConfig& cfg) {
  const ExteriorDomain dom = make_exterior_domain(cfg.domain, p);
  auto inner = [&dom](const HalfSpacePoint& x) { return dom.in_inner_box(x); };
  auto bc = [&dom](const HalfSpacePoint& x) { return dom.in_inner_box(x) && x.normal() > 0.0 ? 1.0 : 0.0; };
  const SparseSystem sys = assemble(field, dom.grid, p, bc, inner);
  const SolveResult sol = solve(sys, cfg.tol, cfg.max_iter);

  DecayFitResult out;
  out.solve = sol.report;
  out.expected_slope = -p.Q();
  for (const auto& x : detail::decay_ray(cfg, p)) {
    out.samples.push_back({gauge(x, p), x.normal(), interpolate(dom.grid, sol.u, x), eval_w(x, p).value()});
  }
  out.fit = detail::fit_ray(out.samples);
  return out;
}

/// Same ray and fit with u replaced by the closed form w; w/x_n = d^{-Q} exactly.
inline DecayFitResult decay_fit_oracle(const GrushinParams& p, const DecayFitConfig& cfg) {
  DecayFitResult out;
  out.expected_slope = -p.Q();
  for (const auto& x : detail::decay_ray(cfg, p)) {
    const double w = eval_w(x, p).value();
    out.samples.push_back({gauge(x, p), x.normal(), w, w});
  }
  out.fit = detail::fit_ray(out.samples);
  return out;
}

/// w - w^{1+rho}; zero on {x_n = 0}.
inline double supersolution_value(const HalfSpacePoint& x, double rho, const GrushinParams& p) {
  if (x.normal() == 0.0) return 0.0;
  const double w = eval_w(x, p).value();
  return w - std::pow(w, 1.0 + rho);
}

struct GlobalBoundConfig {
  ExteriorDomainConfig domain{2.0, 64.0, 401, 201, 0.2, -1.0};
  /// Smallest radius beyond which the supersolution scan found no violation.
  double R0 = 1.0;
  /// Multiplies the fitted constant C; values below 1 are falsification controls.
  double C_scale = 1.0;
  /// When > 0 the Dirichlet data is oracle_C0 * (w - w^{1+rho}) everywhere instead
  /// of 1 on the inner box and 0 elsewhere.
  double oracle_C0 = 0.0;
  double tol = 1e-10;
  long max_iter = 5000;
};

struct GlobalBoundResult {
  bool pass = false;
  /// min over checked nodes of C (w - w^{1+rho}) + epsilon - |u|.
  double margin = std::numeric_limits<double>::infinity();
  double C = 0.0;
  double epsilon = 0.0;
  std::vector<double> worst_node;
  std::size_t checked_nodes = 0;
  /// Largest w over checked nodes; the barrier is positive only where w < 1.
  double max_w = 0.0;
  SolveReport solve;
  std::string diagnostics;
};

/// Comparison with the far-field supersolution on the exterior domain:
/// C is fitted on the inner-boundary nodes, epsilon is the largest |u| on the
/// far faces, and |u| <= C (w - w^{1+rho}) + epsilon is checked at every node.
inline GlobalBoundResult run_global_bound_check(const CoefficientField& field, const GrushinParams& p, double rho,
                                                const GlobalBoundConfig& cfg) {
  if (!(rho > 0.0)) throw std::invalid_argument("global bound: rho must be > 0");
  if (cfg.domain.inner_radius < cfg.R0) throw std::invalid_argument("global bound: inner radius must be >= R0");
  const ExteriorDomain dom = make_exterior_domain(cfg.domain, p);
  auto inner = [&dom](const HalfSpacePoint& x) { return dom.in_inner_box(x); };
  BoundaryFn bc;
  if (cfg.oracle_C0 > 0.0) {
    bc = [&](const HalfSpacePoint& x) { return cfg.oracle_C0 * supersolution_value(x, rho, p); };
  } else {
    bc = [&dom](const HalfSpacePoint& x) { return dom.in_inner_box(x) && x.normal() > 0.0 ? 1.0 : 0.0; };
  }
  const SparseSystem sys = assemble(field, dom.grid, p, bc, inner);
  GlobalBoundResult out;
  const DmpDiagnostics dmp = check_dmp(sys);
  if (!dmp.ok) {
    out.diagnostics = "comparison not justified: " + std::to_string(dmp.offender_count()) + " rows violate the M-matrix test";
    return out;
  }
  const SolveResult sol = solve(sys, cfg.tol, cfg.max_iter);
  out.solve = sol.report;
  const AnisotropicGrid& g = dom.grid;

  const std::vector<std::size_t> frontier = dirichlet_frontier(g, sys, inner);
  for (std::size_t i : frontier) {
    const HalfSpacePoint x = g.point(i);
    if (x.normal() <= 0.0) continue;
    const double b = supersolution_value(x, rho, p);
    if (!(b > 0.0)) {
      out.diagnostics = "barrier nonpositive on the inner boundary (w >= 1); enlarge the inner radius";
      return out;
    }
    out.C = std::max(out.C, std::abs(sol.u[static_cast<Eigen::Index>(i)]) / b);
  }
  out.C *= cfg.C_scale;

  std::vector<char> checked(g.size(), 0);
  for (std::size_t i : frontier) checked[i] = 1;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const HalfSpacePoint x = g.point(i);
    if (!inner(x)) checked[i] = 1;
    const bool far_face = g.on_box_boundary(i) && x.normal() > 0.0 && !inner(x);
    if (far_face) out.epsilon = std::max(out.epsilon, std::abs(sol.u[static_cast<Eigen::Index>(i)]));
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!checked[i]) continue;
    const HalfSpacePoint x = g.point(i);
    const double w = eval_w(x, p).value();
    out.max_w = std::max(out.max_w, w);
    const double margin = out.C * (w - std::pow(w, 1.0 + rho)) + out.epsilon - std::abs(sol.u[static_cast<Eigen::Index>(i)]);
    ++out.checked_nodes;
    if (margin < out.margin) {
      out.margin = margin;
      out.worst_node = g.coords(i);
    }
  }
  out.pass = out.margin >= -1e-9 && out.max_w < 1.0;
  return out;
}

}  // namespace grushinlab::experiments
