#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "grushinlab/params.hpp"

namespace grushinlab {

/// A point of the closed upper half-space: x = (x', x_n) with x_n >= 0.
class HalfSpacePoint {
 public:
  HalfSpacePoint(std::vector<double> tangential, double normal)
      : tangential_(std::move(tangential)), normal_(normal) {
    if (!(normal >= 0.0)) {
      throw std::invalid_argument("HalfSpacePoint: normal coordinate must be >= 0");
    }
  }

  /// Builds a point from all n coordinates; the last one is x_n.
  static HalfSpacePoint from_coords(const std::vector<double>& coords) {
    if (coords.size() < 2) {
      throw std::invalid_argument("HalfSpacePoint: need at least 2 coordinates");
    }
    return HalfSpacePoint(std::vector<double>(coords.begin(), coords.end() - 1), coords.back());
  }

  const std::vector<double>& tangential() const noexcept { return tangential_; }
  double normal() const noexcept { return normal_; }
  int dim() const noexcept { return static_cast<int>(tangential_.size()) + 1; }

  /// Coordinate k in 0..n-1; k == n-1 is the normal coordinate.
  double coord(int k) const { return k + 1 == dim() ? normal_ : tangential_[static_cast<std::size_t>(k)]; }

  double tangential_norm_sq() const noexcept {
    double s = 0.0;
    for (double t : tangential_) s += t * t;
    return s;
  }

  bool is_origin() const noexcept { return normal_ == 0.0 && tangential_norm_sq() == 0.0; }

  friend bool operator==(const HalfSpacePoint&, const HalfSpacePoint&) = default;

 private:
  std::vector<double> tangential_;
  double normal_;
};

namespace detail {

inline void require_dim(const HalfSpacePoint& x, const GrushinParams& p) {
  if (x.dim() != p.n()) {
    throw std::invalid_argument("point dimension does not match GrushinParams::n");
  }
}

inline double tangential_dist_sq(const HalfSpacePoint& y, const HalfSpacePoint& z) {
  if (y.tangential().size() != z.tangential().size()) {
    throw std::invalid_argument("points of different dimension");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < y.tangential().size(); ++i) {
    const double d = y.tangential()[i] - z.tangential()[i];
    s += d * d;
  }
  return s;
}

}  // namespace detail

/// |x'|^2 + beta x_n^{2(1+alpha)}: the quantity whose 1/(2(1+alpha)) power is the gauge.
inline double gauge_radicand(const HalfSpacePoint& x, const GrushinParams& p) {
  return x.tangential_norm_sq() + p.beta() * std::pow(x.normal(), p.normal_weight());
}

/// Natural gauge d(x) of the Baouendi-Grushin operator.
inline double gauge(const HalfSpacePoint& x, const GrushinParams& p) {
  detail::require_dim(x, p);
  return std::pow(gauge_radicand(x, p), 1.0 / p.normal_weight());
}

/// d_alpha(y, z) = |y' - z'| + |y_n^{1+alpha} - z_n^{1+alpha}|.
inline double quasi_distance(const HalfSpacePoint& y, const HalfSpacePoint& z, double alpha) {
  const double tang = std::sqrt(detail::tangential_dist_sq(y, z));
  const double e = 1.0 + alpha;
  return tang + std::abs(std::pow(y.normal(), e) - std::pow(z.normal(), e));
}

/// F_h: tangential coordinates scaled by h^{1/2}, the normal by h^{1/(2(1+alpha))}.
inline HalfSpacePoint apply_scaling(double h, const HalfSpacePoint& x, const GrushinParams& p) {
  if (!(h > 0.0)) throw std::invalid_argument("apply_scaling: h must be > 0");
  detail::require_dim(x, p);
  const double st = std::sqrt(h);
  const double sn = std::pow(h, 1.0 / p.normal_weight());
  std::vector<double> t = x.tangential();
  for (double& c : t) c *= st;
  return HalfSpacePoint(std::move(t), x.normal() * sn);
}

/// Anisotropic ellipsoid level |x' - c'|^2 + |x_n - c_n|^{2(1+alpha)}.
inline double ellipsoid_level(const HalfSpacePoint& x, const HalfSpacePoint& center, const GrushinParams& p) {
  return detail::tangential_dist_sq(x, center) +
         std::pow(std::abs(x.normal() - center.normal()), p.normal_weight());
}

/// Membership in the open ellipsoid E_h(center).
inline bool in_ellipsoid(const HalfSpacePoint& x, double h, const HalfSpacePoint& center, const GrushinParams& p) {
  if (!(h > 0.0)) throw std::invalid_argument("in_ellipsoid: h must be > 0");
  detail::require_dim(x, p);
  return ellipsoid_level(x, center, p) < h;
}

inline HalfSpacePoint origin(int n) { return HalfSpacePoint(std::vector<double>(static_cast<std::size_t>(n - 1), 0.0), 0.0); }

inline double euclidean_distance(const HalfSpacePoint& y, const HalfSpacePoint& z) {
  const double dn = y.normal() - z.normal();
  return std::sqrt(detail::tangential_dist_sq(y, z) + dn * dn);
}

}  // namespace grushinlab
