#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <vector>

#include "grushinlab/closed_forms.hpp"
#include "grushinlab/geometry.hpp"
#include "grushinlab/rng.hpp"

namespace grushinlab {

/// Random points with x_n > 0 and gauge log-uniform in [dmin, dmax].
///
/// A unit-gauge point is built from a random tangential direction and an
/// angle theta in [theta_min, pi/2] (|x'| = cos theta, beta x_n^{2+2alpha} = sin theta^2),
/// then moved to the target gauge by the anisotropic scaling.
inline std::vector<HalfSpacePoint> sample_gauge_shell(const GrushinParams& p, std::size_t count, double dmin,
                                                      double dmax, std::uint64_t seed, double theta_min = 1e-2) {
  if (!(dmin > 0.0 && dmax >= dmin)) throw std::invalid_argument("sample_gauge_shell: need 0 < dmin <= dmax");
  const int m = p.n() - 1;
  Rng rng(seed);
  std::vector<HalfSpacePoint> out;
  out.reserve(count);
  while (out.size() < count) {
    std::vector<double> dir(static_cast<std::size_t>(m));
    double norm = 0.0;
    for (auto& c : dir) {
      c = rng.uniform(-1.0, 1.0);
      norm += c * c;
    }
    norm = std::sqrt(norm);
    if (norm < 1e-3 || norm > 1.0) continue;
    const double theta = rng.uniform(theta_min, std::numbers::pi / 2.0);
    for (auto& c : dir) c *= std::cos(theta) / norm;
    const double xn = std::pow(std::sin(theta) * (1.0 + p.alpha()), 1.0 / (1.0 + p.alpha()));
    const HalfSpacePoint base(std::move(dir), xn);
    const double d = dmin * std::pow(dmax / dmin, rng.uniform());
    out.push_back(apply_scaling(std::pow(d / gauge(base, p), p.normal_weight()), base, p));
  }
  return out;
}

/// |model operator applied to f| divided by the sum of its absolute terms.
inline double normalized_grushin_residual(const Jet2& f, const HalfSpacePoint& x, const GrushinParams& p) {
  const double scale = grushin_term_scale(f, x, p);
  const double r = std::abs(apply_grushin(f, x, p));
  return scale > 0.0 ? r / scale : r;
}

struct IdentityResiduals {
  double w = 0.0;
  /// Power Q of the gauge.
  double gauge_Q = 0.0;
  /// Power 2 - Q of the gauge.
  double gauge_2mQ = 0.0;
};

inline IdentityResiduals identity_residuals(const HalfSpacePoint& x, const GrushinParams& p) {
  return {normalized_grushin_residual(eval_w(x, p), x, p),
          normalized_grushin_residual(eval_gauge_power(x, p), x, p),
          normalized_grushin_residual(eval_gauge_power(x, p, 2.0 - p.Q()), x, p)};
}

}  // namespace grushinlab
