#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "grushinlab/geometry.hpp"

namespace grushinlab {

inline constexpr std::size_t kDefaultNodeBudget = 2'000'000;

/// Tensor-product grid on a box sitting on {x_n = 0}. Axis n-1 is the normal axis.
///
/// Nodes are numbered lexicographically with axis 0 varying fastest.
class AnisotropicGrid {
 public:
  /// Grid from explicit per-axis node coordinates.
  static AnisotropicGrid from_axes(std::vector<std::vector<double>> axes, double grading_exponent = 1.0,
                                   std::size_t node_budget = kDefaultNodeBudget) {
    if (axes.size() < 2) throw std::invalid_argument("AnisotropicGrid: need at least 2 axes");
    std::size_t total = 1;
    for (std::size_t k = 0; k < axes.size(); ++k) {
      const auto& ax = axes[k];
      if (ax.size() < 3) throw std::invalid_argument("AnisotropicGrid: every axis needs >= 3 nodes");
      for (std::size_t i = 1; i < ax.size(); ++i) {
        if (!(ax[i] > ax[i - 1])) throw std::invalid_argument("AnisotropicGrid: node coordinates must increase");
      }
      total *= ax.size();
      if (total > node_budget) {
        throw std::invalid_argument("AnisotropicGrid: node count exceeds budget of " + std::to_string(node_budget));
      }
    }
    if (axes.back().front() != 0.0) throw std::invalid_argument("AnisotropicGrid: first normal node must be 0");
    AnisotropicGrid g;
    g.axes_ = std::move(axes);
    g.grading_ = grading_exponent;
    g.total_ = total;
    g.strides_.resize(g.axes_.size());
    std::size_t s = 1;
    for (std::size_t k = 0; k < g.axes_.size(); ++k) {
      g.strides_[k] = s;
      s *= g.axes_[k].size();
    }
    return g;
  }

  int dim() const noexcept { return static_cast<int>(axes_.size()); }
  std::size_t size() const noexcept { return total_; }
  const std::vector<double>& axis(int k) const { return axes_[static_cast<std::size_t>(k)]; }
  std::size_t count(int k) const { return axes_[static_cast<std::size_t>(k)].size(); }
  std::size_t stride(int k) const { return strides_[static_cast<std::size_t>(k)]; }
  double grading_exponent() const noexcept { return grading_; }
  double lo(int k) const { return axis(k).front(); }
  double hi(int k) const { return axis(k).back(); }

  std::vector<std::size_t> multi_index(std::size_t idx) const {
    std::vector<std::size_t> mi(axes_.size());
    for (std::size_t k = 0; k < axes_.size(); ++k) {
      mi[k] = idx % axes_[k].size();
      idx /= axes_[k].size();
    }
    return mi;
  }

  std::size_t index(const std::vector<std::size_t>& mi) const {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < axes_.size(); ++k) idx += mi[k] * strides_[k];
    return idx;
  }

  std::vector<double> coords(std::size_t idx) const {
    std::vector<double> c(axes_.size());
    for (std::size_t k = 0; k < axes_.size(); ++k) {
      c[k] = axes_[k][idx % axes_[k].size()];
      idx /= axes_[k].size();
    }
    return c;
  }

  HalfSpacePoint point(std::size_t idx) const { return HalfSpacePoint::from_coords(coords(idx)); }

  /// True for nodes on any face of the box.
  bool on_box_boundary(std::size_t idx) const {
    for (std::size_t k = 0; k < axes_.size(); ++k) {
      const std::size_t i = idx % axes_[k].size();
      if (i == 0 || i + 1 == axes_[k].size()) return true;
      idx /= axes_[k].size();
    }
    return false;
  }

  /// Largest cell width along axis k.
  double max_spacing(int k) const {
    const auto& ax = axis(k);
    double h = 0.0;
    for (std::size_t i = 1; i < ax.size(); ++i) h = std::max(h, ax[i] - ax[i - 1]);
    return h;
  }

 private:
  AnisotropicGrid() = default;
  std::vector<std::vector<double>> axes_;
  std::vector<std::size_t> strides_;
  double grading_ = 1.0;
  std::size_t total_ = 0;
};

/// count uniformly spaced nodes on [lo, hi].
inline std::vector<double> uniform_axis(double lo, double hi, std::size_t count) {
  std::vector<double> ax(count);
  for (std::size_t i = 0; i < count; ++i) ax[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  ax.back() = hi;
  return ax;
}

/// Normal axis H (k/K)^grading, k = 0..K.
inline std::vector<double> graded_normal_axis(double height, std::size_t count, double grading) {
  std::vector<double> ax(count);
  const double K = static_cast<double>(count - 1);
  for (std::size_t k = 0; k < count; ++k) ax[k] = height * std::pow(static_cast<double>(k) / K, grading);
  ax.back() = height;
  return ax;
}

/// Nodes on [-half_width, half_width] clustered around 0 by x = c sinh(b t),
/// t uniform in [-1, 1]; core_width is the spacing scale c near the center.
inline std::vector<double> sinh_axis(double half_width, std::size_t count, double core_width) {
  if (!(half_width > 0.0 && core_width > 0.0)) throw std::invalid_argument("sinh_axis: widths must be > 0");
  const double b = std::asinh(half_width / core_width);
  std::vector<double> ax(count);
  const double K = static_cast<double>(count - 1);
  for (std::size_t k = 0; k < count; ++k) {
    const double t = -1.0 + 2.0 * static_cast<double>(k) / K;
    ax[k] = core_width * std::sinh(b * t);
  }
  ax.front() = -half_width;
  ax.back() = half_width;
  if (count % 2 == 1) ax[count / 2] = 0.0;
  return ax;
}

/// Box [box_lo, box_hi] with box_lo_n = 0: uniform tangential axes and a normal
/// axis graded as H (k/K)^grading_exponent.
inline AnisotropicGrid build_grid(const std::vector<double>& box_lo, const std::vector<double>& box_hi,
                                  const std::vector<std::size_t>& counts, double grading_exponent,
                                  std::size_t node_budget = kDefaultNodeBudget) {
  const std::size_t n = box_lo.size();
  if (n < 2 || box_hi.size() != n || counts.size() != n) {
    throw std::invalid_argument("build_grid: box_lo, box_hi and counts must have the same length >= 2");
  }
  if (box_lo.back() != 0.0) throw std::invalid_argument("build_grid: the box must sit on x_n = 0");
  if (!(grading_exponent >= 1.0)) throw std::invalid_argument("build_grid: grading exponent must be >= 1");
  std::vector<std::vector<double>> axes;
  for (std::size_t k = 0; k < n; ++k) {
    if (!(box_lo[k] < box_hi[k])) throw std::invalid_argument("build_grid: degenerate box");
    if (counts[k] < 3) throw std::invalid_argument("build_grid: counts must be >= 3");
    if (k + 1 < n) {
      axes.push_back(uniform_axis(box_lo[k], box_hi[k], counts[k]));
    } else {
      axes.push_back(graded_normal_axis(box_hi[k], counts[k], grading_exponent));
    }
  }
  return AnisotropicGrid::from_axes(std::move(axes), grading_exponent, node_budget);
}

/// Multilinear interpolation of a grid function; the point must lie in the box.
template <typename Vec>
double interpolate(const AnisotropicGrid& grid, const Vec& values, const HalfSpacePoint& x) {
  const int n = grid.dim();
  std::vector<std::size_t> base(static_cast<std::size_t>(n));
  std::vector<double> frac(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const auto& ax = grid.axis(k);
    const double c = x.coord(k);
    if (c < ax.front() || c > ax.back()) throw std::out_of_range("interpolate: point outside the grid box");
    auto it = std::upper_bound(ax.begin(), ax.end(), c);
    std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - ax.begin()) - 1));
    i = std::min(i, ax.size() - 2);
    base[static_cast<std::size_t>(k)] = i;
    frac[static_cast<std::size_t>(k)] = (c - ax[i]) / (ax[i + 1] - ax[i]);
  }
  double result = 0.0;
  const std::size_t corners = std::size_t{1} << n;
  std::vector<std::size_t> mi(static_cast<std::size_t>(n));
  for (std::size_t c = 0; c < corners; ++c) {
    double weight = 1.0;
    for (int k = 0; k < n; ++k) {
      const bool up = (c >> k) & 1U;
      const auto ks = static_cast<std::size_t>(k);
      mi[ks] = base[ks] + (up ? 1 : 0);
      weight *= up ? frac[ks] : 1.0 - frac[ks];
    }
    if (weight != 0.0) result += weight * values[static_cast<std::ptrdiff_t>(grid.index(mi))];
  }
  return result;
}

}  // namespace grushinlab
