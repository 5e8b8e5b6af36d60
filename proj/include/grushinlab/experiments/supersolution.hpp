#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "grushinlab/closed_forms.hpp"
#include "grushinlab/experiments/domains.hpp"
#include "grushinlab/geometry.hpp"
#include "grushinlab/parallel.hpp"
#include "grushinlab/rng.hpp"

namespace grushinlab::experiments {

struct SupersolutionViolation {
  std::vector<double> point;
  double value = 0.0;
  double shell = 0.0;
};

struct SupersolutionScan {
  double rho = 0.0;
  double s = 0.0;
  double amplitude = 0.0;
  /// +inf when the outermost shell still has violations.
  double R0_empirical = std::numeric_limits<double>::infinity();
  std::vector<SupersolutionViolation> violations;
  std::vector<double> shells_tested;
  std::vector<std::size_t> samples_per_shell;
  /// Largest L value seen per shell (most dangerous sample).
  std::vector<double> worst_per_shell;

  bool finite_R0() const { return std::isfinite(R0_empirical); }
};

inline std::vector<double> doubling_shells(double first, std::size_t count) {
  std::vector<double> out;
  for (std::size_t k = 0; k < count; ++k) out.push_back(first * std::pow(2.0, static_cast<double>(k)));
  return out;
}

/// Throws invalid_argument unless 0 < rho < min{s/(n-1), 1}.
inline void check_supersolution_hypothesis(const GrushinParams& p, double rho, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("supersolution scan: s must be > 0");
  const double cap = std::min(s / (p.n() - 1), 1.0);
  if (!(rho > 0.0 && rho < cap)) {
    throw std::invalid_argument("supersolution scan: rho must lie in (0, min{s/(n-1), 1}) = (0, " +
                                std::to_string(cap) + ")");
  }
}

/// Largest value of L v at x over all coefficient fields with
/// |a_ij - delta_ij| <= amp d^{-s} and |a_in| <= amp d^{-s}, each entry
/// signed independently.
inline double adversarial_L(const Jet2& v, const HalfSpacePoint& x, const GrushinParams& p, double s, double amplitude) {
  const int m = p.n() - 1;
  const auto& H = v.hessian();
  const double xa = std::pow(x.normal(), p.alpha());
  const double d = gauge(x, p);
  const double env = amplitude * (d > 1.0 ? std::pow(d, -s) : 1.0);
  double tang = 0.0;
  double mixed = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < m; ++k) tang += std::abs(H(i, k));
    mixed += std::abs(H(i, m));
  }
  return apply_grushin(v, x, p) + env * (xa * xa * tang + 2.0 * xa * mixed);
}

/// Evaluates the worst-case L(w - w^{1+rho}) at samples_per_shell points with
/// gauge in [R, 2R], x_n > 0 and w < 1, drawn by rejection from the bounding
/// box of the gauge ball of radius 2R. A sample violates when the value exceeds
/// rel_tol times the sum of absolute term sizes.
inline SupersolutionScan run_supersolution_scan(const GrushinParams& p, double rho, double s, double amplitude,
                                                const std::vector<double>& shells, std::size_t samples_per_shell,
                                                std::uint64_t seed, double rel_tol = 1e-12) {
  check_supersolution_hypothesis(p, rho, s);
  if (!(amplitude >= 0.0 && amplitude <= 1.0)) throw std::invalid_argument("supersolution scan: amplitude must lie in [0, 1]");
  if (shells.empty() || samples_per_shell == 0) throw std::invalid_argument("supersolution scan: no shells or samples");
  for (std::size_t k = 0; k < shells.size(); ++k) {
    if (!(shells[k] > 0.0) || (k > 0 && !(shells[k] > shells[k - 1]))) {
      throw std::invalid_argument("supersolution scan: shell radii must be positive and increasing");
    }
  }
  const int m = p.n() - 1;
  SupersolutionScan out;
  out.rho = rho;
  out.s = s;
  out.amplitude = amplitude;
  out.shells_tested = shells;

  Rng rng(seed);
  std::size_t last_bad = shells.size();
  for (std::size_t k = 0; k < shells.size(); ++k) {
    const double R = shells[k];
    const double half_width = gauge_ball_half_width(2.0 * R, p);
    const double height = gauge_ball_height(2.0 * R, p);
    std::vector<HalfSpacePoint> pts;
    const std::size_t max_draws = 10000 * samples_per_shell;
    for (std::size_t draws = 0; pts.size() < samples_per_shell && draws < max_draws; ++draws) {
      std::vector<double> t(static_cast<std::size_t>(m));
      for (auto& c : t) c = rng.uniform(-half_width, half_width);
      const double xn = height * (1.0 - rng.uniform());  // (0, height]
      HalfSpacePoint x(std::move(t), xn);
      const double d = gauge(x, p);
      if (d < R || d > 2.0 * R) continue;
      if (!(eval_w(x, p).value() < 1.0)) continue;
      pts.push_back(std::move(x));
    }
    std::vector<double> value(pts.size()), scale(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) {
      const Jet2 v = eval_supersolution(pts[i], rho, p);
      value[i] = adversarial_L(v, pts[i], p, s, amplitude);
      // The envelope contribution is nonnegative: value - model part.
      scale[i] = grushin_term_scale(v, pts[i], p) + (value[i] - apply_grushin(v, pts[i], p));
    });
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      worst = std::max(worst, value[i]);
      if (value[i] > rel_tol * scale[i]) {
        out.violations.push_back({pts[i].tangential(), value[i], R});
        out.violations.back().point.push_back(pts[i].normal());
        last_bad = k;
      }
    }
    out.samples_per_shell.push_back(pts.size());
    out.worst_per_shell.push_back(worst);
  }
  if (last_bad == shells.size()) {
    out.R0_empirical = shells.front();
  } else if (last_bad + 1 < shells.size()) {
    out.R0_empirical = shells[last_bad + 1];
  }
  return out;
}

}  // namespace grushinlab::experiments
