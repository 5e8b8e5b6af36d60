#pragma once

#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "grushinlab/geometry.hpp"

namespace grushinlab {

/// Variable coefficients a_ij (i, j < n) and a_in (i < n) together with the
/// structure constants the field claims to satisfy.
///
/// Evaluation functions must be deterministic and safe to call concurrently.
class CoefficientField {
 public:
  using TangentialFn = std::function<Eigen::MatrixXd(const HalfSpacePoint&)>;
  using MixedFn = std::function<Eigen::VectorXd(const HalfSpacePoint&)>;

  struct Constants {
    double lambda = 1.0;
    double Lambda = 1.0;
    double delta = 0.5;
    /// Decay exponent s of the deviation from the identity; +inf means no deviation.
    double decay_s = std::numeric_limits<double>::infinity();
  };

  CoefficientField(int n, TangentialFn a_tangential, MixedFn a_mixed, Constants constants,
                   std::string family, std::map<std::string, double> family_params = {})
      : n_(n),
        a_tangential_(std::move(a_tangential)),
        a_mixed_(std::move(a_mixed)),
        constants_(constants),
        family_(std::move(family)),
        family_params_(std::move(family_params)) {
    if (n < 2) throw std::invalid_argument("CoefficientField: n must be >= 2");
    if (!(constants_.lambda > 0.0)) throw std::invalid_argument("CoefficientField: lambda must be > 0");
    if (!(constants_.Lambda >= constants_.lambda)) {
      throw std::invalid_argument("CoefficientField: Lambda must be >= lambda");
    }
    if (!(constants_.delta > 0.0 && constants_.delta < 1.0)) {
      throw std::invalid_argument("CoefficientField: delta must lie in (0,1)");
    }
    if (!(constants_.decay_s >= 0.0)) throw std::invalid_argument("CoefficientField: decay_s must be >= 0");
  }

  int n() const noexcept { return n_; }
  Eigen::MatrixXd a_tangential(const HalfSpacePoint& x) const { return a_tangential_(x); }
  Eigen::VectorXd a_mixed(const HalfSpacePoint& x) const { return a_mixed_(x); }

  double lambda() const noexcept { return constants_.lambda; }
  double Lambda() const noexcept { return constants_.Lambda; }
  double delta() const noexcept { return constants_.delta; }
  double decay_s() const noexcept { return constants_.decay_s; }
  const Constants& constants() const noexcept { return constants_; }

  const std::string& family() const noexcept { return family_; }
  const std::map<std::string, double>& family_params() const noexcept { return family_params_; }

 private:
  int n_;
  TangentialFn a_tangential_;
  MixedFn a_mixed_;
  Constants constants_;
  std::string family_;
  std::map<std::string, double> family_params_;
};

}  // namespace grushinlab
