#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace grushinlab {

class FitRefused : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Least-squares line log y = intercept + exponent log x.
struct FitResult {
  double exponent = 0.0;
  double intercept = 0.0;
  double residual_norm = 0.0;
  std::size_t sample_count = 0;
  std::pair<double, double> range{0.0, 0.0};
};

inline FitResult fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("fit_loglog: size mismatch");
  if (xs.size() < 5) throw FitRefused("fit_loglog: need at least 5 samples");
  std::vector<double> lx, ly;
  lx.reserve(xs.size());
  ly.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) throw FitRefused("fit_loglog: nonpositive sample");
    lx.push_back(std::log(xs[i]));
    ly.push_back(std::log(ys[i]));
  }
  const auto [mn, mx] = std::minmax_element(xs.begin(), xs.end());
  if (!(*mx > *mn)) throw FitRefused("fit_loglog: degenerate abscissa range");

  const double N = static_cast<double>(lx.size());
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mean_x += lx[i];
    mean_y += ly[i];
  }
  mean_x /= N;
  mean_y /= N;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mean_x) * (lx[i] - mean_x);
    sxy += (lx[i] - mean_x) * (ly[i] - mean_y);
  }
  FitResult f;
  f.exponent = sxy / sxx;
  f.intercept = mean_y - f.exponent * mean_x;
  double rss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (f.intercept + f.exponent * lx[i]);
    rss += r * r;
  }
  f.residual_norm = std::sqrt(rss);
  f.sample_count = lx.size();
  f.range = {*mn, *mx};
  return f;
}

}  // namespace grushinlab
