#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "grushinlab/geometry.hpp"

namespace grushinlab::testing {

using ScalarFn = std::function<double(const std::vector<double>&)>;

inline HalfSpacePoint pt(std::vector<double> tangential, double normal) {
  return HalfSpacePoint(std::move(tangential), normal);
}

inline std::vector<double> coords_of(const HalfSpacePoint& x) {
  std::vector<double> c = x.tangential();
  c.push_back(x.normal());
  return c;
}

/// Steps relative to |coordinate| + 1, base 1e-3.
inline double fd_step(double c, double base = 1e-3) { return base * (std::abs(c) + 1.0); }

/// Central first differences, Richardson-extrapolated from h and h/2.
inline Eigen::VectorXd richardson_gradient(const ScalarFn& f, const std::vector<double>& x, double base = 1e-3) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::VectorXd g(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    auto D = [&](double h) {
      std::vector<double> p = x, m = x;
      p[static_cast<std::size_t>(i)] += h;
      m[static_cast<std::size_t>(i)] -= h;
      return (f(p) - f(m)) / (2.0 * h);
    };
    const double h = fd_step(x[static_cast<std::size_t>(i)], base);
    g(i) = (4.0 * D(0.5 * h) - D(h)) / 3.0;
  }
  return g;
}

/// Central second differences (plain for diagonal entries, four-point for
/// mixed ones), Richardson-extrapolated from h and h/2.
inline Eigen::MatrixXd richardson_hessian(const ScalarFn& f, const std::vector<double>& x, double base = 1e-3) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd H(n, n);
  const double f0 = f(x);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const auto is = static_cast<std::size_t>(i), js = static_cast<std::size_t>(j);
      auto D = [&](double scale) {
        const double hi = scale * fd_step(x[is], base);
        const double hj = scale * fd_step(x[js], base);
        if (i == j) {
          std::vector<double> p = x, m = x;
          p[is] += hi;
          m[is] -= hi;
          return (f(p) - 2.0 * f0 + f(m)) / (hi * hi);
        }
        auto at = [&](double si, double sj) {
          std::vector<double> q = x;
          q[is] += si * hi;
          q[js] += sj * hj;
          return f(q);
        };
        return (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * hi * hj);
      };
      H(i, j) = H(j, i) = (4.0 * D(0.5) - D(1.0)) / 3.0;
    }
  }
  return H;
}

/// |a - b| / max(|b|, floor).
inline double rel_err(double a, double b, double floor = 1e-12) { return std::abs(a - b) / std::max(std::abs(b), floor); }

}  // namespace grushinlab::testing
