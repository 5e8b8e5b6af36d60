#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "grushinlab/field.hpp"
#include "grushinlab/geometry.hpp"
#include "grushinlab/jet.hpp"
#include "grushinlab/params.hpp"

namespace grushinlab {

/// 2-jet of the Grushin-harmonic function
///
///   w(x) = x_n / (|x'|^2 + beta x_n^{2+2alpha})^gamma,
///
/// with every derivative written in closed form. w vanishes on the flat
/// boundary and behaves like x_n / d(x)^Q.
inline Jet2 eval_w(const HalfSpacePoint& x, const GrushinParams& p) {
  detail::require_dim(x, p);
  if (x.is_origin()) throw std::domain_error("eval_w: singular at the origin");

  const int n = p.n();
  const int m = n - 1;
  const double a = p.alpha();
  const double g = p.gamma();
  const double xn = x.normal();
  const double k = p.beta() * (2.0 + 2.0 * a);

  const double r = gauge_radicand(x, p);
  const double P0 = std::pow(r, -g);
  const double P1 = P0 / r;
  const double P2 = P1 / r;

  const double xn_1p2a = std::pow(xn, 1.0 + 2.0 * a);
  const double xn_2p2a = xn_1p2a * xn;
  const double xn_3p4a = xn_1p2a * xn_2p2a;

  Eigen::VectorXd grad(n);
  Eigen::MatrixXd hess(n, n);
  const auto& xt = x.tangential();

  for (int i = 0; i < m; ++i) {
    grad(i) = -2.0 * g * xt[i] * xn * P1;
    for (int j = 0; j < m; ++j) {
      hess(i, j) = 4.0 * g * (g + 1.0) * xt[i] * xt[j] * xn * P2;
    }
    hess(i, i) -= 2.0 * g * xn * P1;
    const double din = -2.0 * g * xt[i] * P1 + 2.0 * g * (g + 1.0) * k * xt[i] * xn_2p2a * P2;
    hess(i, m) = din;
    hess(m, i) = din;
  }
  grad(m) = P0 - g * k * xn_2p2a * P1;
  hess(m, m) = -g * k * xn_1p2a * P1 - g * k * (2.0 + 2.0 * a) * xn_1p2a * P1 +
               g * (g + 1.0) * k * k * xn_3p4a * P2;

  return Jet2(xn * P0, std::move(grad), std::move(hess));
}

/// 2-jet of d(x)^power, evaluated as (|x'|^2 + beta x_n^{2+2alpha})^{power / (2(1+alpha))}
/// so no nested fractional power of the gauge is formed.
inline Jet2 eval_gauge_power(const HalfSpacePoint& x, const GrushinParams& p, double power) {
  detail::require_dim(x, p);
  if (x.is_origin()) throw std::domain_error("eval_gauge_power: singular at the origin");

  const int n = p.n();
  const int m = n - 1;
  const double a = p.alpha();
  const double e = power / p.normal_weight();
  const double k = p.beta() * (2.0 + 2.0 * a);
  const double xn = x.normal();

  const double r = gauge_radicand(x, p);
  const double F0 = std::pow(r, e);
  const double F1 = F0 / r;
  const double F2 = F1 / r;

  const double xn_2a = std::pow(xn, 2.0 * a);
  const double xn_1p2a = xn_2a * xn;
  const double dn_r = k * xn_1p2a;

  Eigen::VectorXd grad(n);
  Eigen::MatrixXd hess(n, n);
  const auto& xt = x.tangential();
  for (int i = 0; i < m; ++i) {
    grad(i) = 2.0 * e * xt[i] * F1;
    for (int j = 0; j < m; ++j) hess(i, j) = 4.0 * e * (e - 1.0) * xt[i] * xt[j] * F2;
    hess(i, i) += 2.0 * e * F1;
    const double din = 2.0 * e * (e - 1.0) * xt[i] * dn_r * F2;
    hess(i, m) = din;
    hess(m, i) = din;
  }
  grad(m) = e * dn_r * F1;
  hess(m, m) = e * k * (1.0 + 2.0 * a) * xn_2a * F1 + e * (e - 1.0) * dn_r * dn_r * F2;
  return Jet2(F0, std::move(grad), std::move(hess));
}

/// 2-jet of d(x)^Q.
inline Jet2 eval_gauge_power(const HalfSpacePoint& x, const GrushinParams& p) {
  return eval_gauge_power(x, p, p.Q());
}

/// Model operator x_n^{2alpha} Laplacian_{x'} + D_nn applied to a jet.
inline double apply_grushin(const Jet2& j, const HalfSpacePoint& x, const GrushinParams& p) {
  const int m = p.n() - 1;
  double tang = 0.0;
  for (int i = 0; i < m; ++i) tang += j.hessian()(i, i);
  return std::pow(x.normal(), 2.0 * p.alpha()) * tang + j.hessian()(m, m);
}

/// Sum of absolute values of the terms apply_grushin adds up; the natural
/// scale for judging a cancelling residual.
inline double grushin_term_scale(const Jet2& j, const HalfSpacePoint& x, const GrushinParams& p) {
  const int m = p.n() - 1;
  double tang = 0.0;
  for (int i = 0; i < m; ++i) tang += std::abs(j.hessian()(i, i));
  return std::pow(x.normal(), 2.0 * p.alpha()) * tang + std::abs(j.hessian()(m, m));
}

/// L applied with explicit coefficient values at x.
inline double apply_L(const Eigen::MatrixXd& a_tan, const Eigen::VectorXd& a_mix, const Jet2& j,
                      const HalfSpacePoint& x, const GrushinParams& p) {
  const int m = p.n() - 1;
  const auto& H = j.hessian();
  const double xa = std::pow(x.normal(), p.alpha());
  double tang = 0.0;
  double mixed = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < m; ++k) tang += a_tan(i, k) * H(i, k);
    mixed += a_mix(i) * H(i, m);
  }
  return xa * xa * tang + 2.0 * xa * mixed + H(m, m);
}

/// Lu = x_n^{2alpha} a_ij D_ij u + 2 x_n^alpha a_in D_in u + D_nn u.
inline double apply_L(const CoefficientField& field, const Jet2& j, const HalfSpacePoint& x,
                      const GrushinParams& p) {
  return apply_L(field.a_tangential(x), field.a_mixed(x), j, x, p);
}

/// 2-jet of w - w^{1+rho}.
inline Jet2 eval_supersolution(const HalfSpacePoint& x, double rho, const GrushinParams& p) {
  if (!(rho > 0.0)) throw std::invalid_argument("eval_supersolution: rho must be > 0");
  if (x.normal() == 0.0 && rho < 1.0) {
    throw std::domain_error("eval_supersolution: w^{rho-1} is singular on x_n = 0 for rho < 1");
  }
  const Jet2 w = eval_w(x, p);
  const double wv = w.value();
  const double w_rho = std::pow(wv, rho);
  const double w_rho_m1 = std::pow(wv, rho - 1.0);
  const Eigen::VectorXd& dw = w.gradient();

  const double value = wv - wv * w_rho;
  Eigen::VectorXd grad = (1.0 - (1.0 + rho) * w_rho) * dw;
  Eigen::MatrixXd hess =
      (1.0 - (1.0 + rho) * w_rho) * w.hessian() - rho * (1.0 + rho) * w_rho_m1 * (dw * dw.transpose());
  return Jet2(value, std::move(grad), std::move(hess));
}

/// Constants of the near-boundary barrier C x_n + B|x' - x0'|^2 - (C/2) x_n^{2+alpha}.
struct BarrierSpec {
  double C = 0.0;
  double B = 0.0;
  std::vector<double> x0_tangential;
  double alpha = 0.0;

  /// Left side of the interior condition 2(n-1) Lambda B - (2+alpha)(1+alpha) C/2 <= 0.
  double interior_condition(double Lambda, int n) const {
    return 2.0 * (n - 1) * Lambda * B - (2.0 + alpha) * (1.0 + alpha) * C / 2.0;
  }
};

inline Jet2 eval_step1_barrier(const HalfSpacePoint& x, const BarrierSpec& spec) {
  const int n = x.dim();
  const int m = n - 1;
  if (static_cast<int>(spec.x0_tangential.size()) != m) {
    throw std::invalid_argument("eval_step1_barrier: anchor dimension mismatch");
  }
  const double a = spec.alpha;
  const double xn = x.normal();
  const auto& xt = x.tangential();

  double dist_sq = 0.0;
  Eigen::VectorXd grad(n);
  Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < m; ++i) {
    const double d = xt[i] - spec.x0_tangential[i];
    dist_sq += d * d;
    grad(i) = 2.0 * spec.B * d;
    hess(i, i) = 2.0 * spec.B;
  }
  grad(m) = spec.C - 0.5 * spec.C * (2.0 + a) * std::pow(xn, 1.0 + a);
  hess(m, m) = -0.5 * spec.C * (2.0 + a) * (1.0 + a) * std::pow(xn, a);
  const double value = spec.C * xn + spec.B * dist_sq - 0.5 * spec.C * std::pow(xn, 2.0 + a);
  return Jet2(value, std::move(grad), std::move(hess));
}

/// B = 16 ||u||_inf and the smallest C meeting both the interior condition and
/// the boundary majorization C/2 >= ||u||_inf.
inline BarrierSpec choose_barrier_constants(double sup_norm_u, double Lambda, double alpha, int n,
                                            std::vector<double> x0_tangential = {}) {
  if (!(sup_norm_u >= 0.0)) throw std::invalid_argument("choose_barrier_constants: sup_norm_u must be >= 0");
  if (!(Lambda > 0.0)) throw std::invalid_argument("choose_barrier_constants: Lambda must be > 0");
  if (x0_tangential.empty()) x0_tangential.assign(static_cast<std::size_t>(n - 1), 0.0);
  BarrierSpec spec;
  spec.alpha = alpha;
  spec.B = 16.0 * sup_norm_u;
  spec.C = std::max(4.0 * (n - 1) * Lambda * spec.B / ((2.0 + alpha) * (1.0 + alpha)), 2.0 * sup_norm_u);
  spec.x0_tangential = std::move(x0_tangential);
  return spec;
}

}  // namespace grushinlab
