#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

namespace grushinlab {

/// Value, gradient and Hessian of a function at a point.
class Jet2 {
 public:
  Jet2(double value, Eigen::VectorXd gradient, Eigen::MatrixXd hessian)
      : value_(value), gradient_(std::move(gradient)), hessian_(std::move(hessian)) {
    const auto n = gradient_.size();
    if (hessian_.rows() != n || hessian_.cols() != n) {
      throw std::invalid_argument("Jet2: hessian shape does not match gradient length");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double hij = hessian_(i, j);
        const double hji = hessian_(j, i);
        if (std::abs(hij - hji) > 1e-14 * std::max({1.0, std::abs(hij), std::abs(hji)})) {
          throw std::invalid_argument("Jet2: hessian is not symmetric");
        }
      }
    }
  }

  double value() const noexcept { return value_; }
  const Eigen::VectorXd& gradient() const noexcept { return gradient_; }
  const Eigen::MatrixXd& hessian() const noexcept { return hessian_; }
  int dim() const noexcept { return static_cast<int>(gradient_.size()); }

 private:
  double value_;
  Eigen::VectorXd gradient_;
  Eigen::MatrixXd hessian_;
};

}  // namespace grushinlab
