#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace grushinlab {

/// Dimension and degeneracy of the operator, with every constant derived from them.
///
/// The derived constants are recomputed from (n, alpha) at construction, so a
/// GrushinParams value is always internally consistent.
class GrushinParams {
 public:
  GrushinParams(int n, double alpha) : n_(n), alpha_(alpha) {
    if (n < 2) {
      throw std::invalid_argument("GrushinParams: n must be >= 2, got " + std::to_string(n));
    }
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
      throw std::invalid_argument("GrushinParams: alpha must be finite and >= 0");
    }
    const double ap1 = 1.0 + alpha;
    beta_ = 1.0 / (ap1 * ap1);
    gamma_ = 0.5 * (n - 1) + 1.0 / (2.0 * ap1);
    Q_ = ap1 * (n - 1) + 1.0;
    alpha_prime_ = std::pow(4.0, -2.0 * ap1);
  }

  int n() const noexcept { return n_; }
  int tangential_dim() const noexcept { return n_ - 1; }
  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  double gamma() const noexcept { return gamma_; }
  /// Homogeneous dimension.
  double Q() const noexcept { return Q_; }
  double alpha_prime() const noexcept { return alpha_prime_; }

  /// 2(1+alpha), the anisotropic weight of the normal coordinate.
  double normal_weight() const noexcept { return 2.0 * (1.0 + alpha_); }

 private:
  int n_;
  double alpha_;
  double beta_ = 0.0;
  double gamma_ = 0.0;
  double Q_ = 0.0;
  double alpha_prime_ = 0.0;
};

}  // namespace grushinlab
