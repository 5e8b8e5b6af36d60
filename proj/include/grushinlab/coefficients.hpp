#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "grushinlab/field.hpp"
#include "grushinlab/geometry.hpp"
#include "grushinlab/parallel.hpp"
#include "grushinlab/params.hpp"
#include "grushinlab/rng.hpp"

namespace grushinlab {

/// a_ij = delta_ij, a_in = 0: L reduces to the model Grushin operator.
inline CoefficientField make_identity_field(const GrushinParams& p) {
  const int m = p.n() - 1;
  return CoefficientField(
      p.n(), [m](const HalfSpacePoint&) -> Eigen::MatrixXd { return Eigen::MatrixXd::Identity(m, m); },
      [m](const HalfSpacePoint&) -> Eigen::VectorXd { return Eigen::VectorXd::Zero(m); },
      CoefficientField::Constants{1.0, 1.0, 0.5, std::numeric_limits<double>::infinity()}, "identity");
}

namespace detail {

/// sin(omega . x + theta) * cos(nu . x + eta), bounded by 1 in absolute value.
struct SineProduct {
  std::vector<double> omega;
  std::vector<double> nu;
  double theta = 0.0;
  double eta = 0.0;

  static SineProduct draw(Rng& rng, int n) {
    SineProduct s;
    for (int k = 0; k < n; ++k) {
      s.omega.push_back(rng.uniform(-1.0, 1.0));
      s.nu.push_back(rng.uniform(-1.0, 1.0));
    }
    s.theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
    s.eta = rng.uniform(0.0, 2.0 * std::numbers::pi);
    return s;
  }

  double operator()(const HalfSpacePoint& x) const {
    double a = theta;
    double b = eta;
    for (int k = 0; k < x.dim(); ++k) {
      a += omega[static_cast<std::size_t>(k)] * x.coord(k);
      b += nu[static_cast<std::size_t>(k)] * x.coord(k);
    }
    return std::sin(a) * std::cos(b);
  }
};

}  // namespace detail

/// Smooth seeded perturbation of the identity whose deviations decay like d(x)^{-s}.
///
/// Each entry deviates by at most amplitude * min(1, d^{-s}) / (2(n-1)), so
/// |a_ij - delta_ij| + |a_in| <= d^{-s} for every pair, Gershgorin puts the
/// tangential spectrum inside [1 - amplitude/2, 1 + amplitude/2], and
/// sum_i a_in^2 stays well below lambda (1 - delta).
inline CoefficientField make_decaying_perturbation(const GrushinParams& p, double s, double amplitude,
                                                   std::uint64_t seed) {
  if (!(s > 0.0)) throw std::invalid_argument("make_decaying_perturbation: s must be > 0");
  if (!(amplitude > 0.0 && amplitude <= 1.0)) {
    throw std::invalid_argument("make_decaying_perturbation: amplitude must lie in (0,1]");
  }
  const int n = p.n();
  const int m = n - 1;
  Rng rng(seed);
  std::vector<detail::SineProduct> phi;  // upper triangle, row-major
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) phi.push_back(detail::SineProduct::draw(rng, n));
  std::vector<detail::SineProduct> psi;
  for (int i = 0; i < m; ++i) psi.push_back(detail::SineProduct::draw(rng, n));

  const double scale = amplitude / (2.0 * m);
  auto envelope = [p, s](const HalfSpacePoint& x) {
    const double d = gauge(x, p);
    return d <= 1.0 ? 1.0 : std::pow(d, -s);
  };

  auto a_tan = [=](const HalfSpacePoint& x) -> Eigen::MatrixXd {
    const double env = envelope(x);
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(m, m);
    std::size_t idx = 0;
    for (int i = 0; i < m; ++i) {
      for (int j = i; j < m; ++j) {
        const double dev = scale * phi[idx++](x) * env;
        a(i, j) += dev;
        if (j != i) a(j, i) += dev;
      }
    }
    return a;
  };
  auto a_mix = [=](const HalfSpacePoint& x) -> Eigen::VectorXd {
    const double env = envelope(x);
    Eigen::VectorXd b(m);
    for (int i = 0; i < m; ++i) b(i) = scale * psi[static_cast<std::size_t>(i)](x) * env;
    return b;
  };

  CoefficientField::Constants c;
  c.lambda = 1.0 - amplitude / 2.0;
  c.Lambda = 1.0 + amplitude / 2.0;
  c.delta = std::clamp(1.0 - amplitude, 1e-3, 1.0 - 1e-3);
  c.decay_s = s;
  return CoefficientField(n, a_tan, a_mix, c, "decaying-perturbation",
                          {{"s", s}, {"amplitude", amplitude}, {"seed", static_cast<double>(seed)}});
}

/// The full coefficient matrix of L at x: tangential block a_ij x_n^{2alpha},
/// mixed entries a_in x_n^alpha, corner 1.
inline Eigen::MatrixXd degenerate_matrix(const CoefficientField& field, const HalfSpacePoint& x,
                                         const GrushinParams& p) {
  const int n = p.n();
  const int m = n - 1;
  const double xa = std::pow(x.normal(), p.alpha());
  Eigen::MatrixXd A(n, n);
  A.topLeftCorner(m, m) = field.a_tangential(x) * (xa * xa);
  const Eigen::VectorXd b = field.a_mixed(x) * xa;
  A.topRightCorner(m, 1) = b;
  A.bottomLeftCorner(1, m) = b.transpose();
  A(m, m) = 1.0;
  return A;
}

struct AuditViolation {
  HalfSpacePoint point;
  std::string what;
  double measured = 0.0;
  double bound = 0.0;
};

struct EllipticityReport {
  double lower_bound_formula = 0.0;
  /// Smallest eigenvalue over sample points in the strip x_n >= epsilon0.
  double lower_bound_numeric = std::numeric_limits<double>::infinity();
  double upper_bound_numeric = 0.0;
  /// Smallest eigenvalue over sample points strictly inside the half-space but below the strip.
  double min_eigenvalue_below_strip = std::numeric_limits<double>::infinity();
  double epsilon0 = 0.0;
  double tau = 0.0;
  std::size_t strip_points = 0;
  std::size_t boundary_points = 0;
  /// Measured 1 - lambda^{-1} sum_i sup |a_in|^2, to be compared with delta.
  double mixed_condition = 0.0;
  std::vector<AuditViolation> violations;
  /// Declared structure constants that the sample contradicts.
  std::vector<AuditViolation> invariant_failures;

  bool passed() const noexcept { return violations.empty() && invariant_failures.empty(); }
};

/// Closed-form lower bound min{(1-tau) lambda eps0^{2alpha}, 1 - tau^{-1}(1-delta)}.
inline double ellipticity_formula_bound(double lambda, double delta, double epsilon0, double alpha, double tau) {
  return std::min((1.0 - tau) * lambda * std::pow(epsilon0, 2.0 * alpha), 1.0 - (1.0 - delta) / tau);
}

/// Eigen-solves the degenerate matrix at each sample point and compares the
/// spectrum with the closed-form bound. tau <= 0 selects the default 1 - delta/2.
inline EllipticityReport audit_ellipticity(const CoefficientField& field, const GrushinParams& p, double epsilon0,
                                           const std::vector<HalfSpacePoint>& sample, double tau = -1.0) {
  if (!(epsilon0 > 0.0 && epsilon0 < 1.0)) throw std::invalid_argument("audit_ellipticity: epsilon0 must lie in (0,1)");
  const double delta = field.delta();
  if (tau <= 0.0) tau = 1.0 - 0.5 * delta;
  if (!(tau > 1.0 - delta && tau < 1.0)) throw std::invalid_argument("audit_ellipticity: tau must lie in (1-delta, 1)");

  EllipticityReport rep;
  rep.epsilon0 = epsilon0;
  rep.tau = tau;
  rep.lower_bound_formula = ellipticity_formula_bound(field.lambda(), delta, epsilon0, p.alpha(), tau);

  const int m = p.n() - 1;
  struct PointResult {
    double eig_min = 0.0;
    double eig_max = 0.0;
    double tan_min = 0.0;
    double tan_max = 0.0;
    double asym = 0.0;
    Eigen::VectorXd mixed;
  };
  std::vector<PointResult> results(sample.size());
  parallel_for(sample.size(), [&](std::size_t k) {
    const HalfSpacePoint& x = sample[k];
    detail::require_dim(x, p);
    const Eigen::MatrixXd a = field.a_tangential(x);
    PointResult r;
    r.asym = (a - a.transpose()).cwiseAbs().maxCoeff();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tan_eig(a, Eigen::EigenvaluesOnly);
    r.tan_min = tan_eig.eigenvalues().minCoeff();
    r.tan_max = tan_eig.eigenvalues().maxCoeff();
    r.mixed = field.a_mixed(x);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(degenerate_matrix(field, x, p), Eigen::EigenvaluesOnly);
    r.eig_min = eig.eigenvalues().minCoeff();
    r.eig_max = eig.eigenvalues().maxCoeff();
    results[k] = std::move(r);
  });

  constexpr double kTol = 1e-10;
  Eigen::VectorXd mixed_sup = Eigen::VectorXd::Zero(m);
  for (std::size_t k = 0; k < sample.size(); ++k) {
    const HalfSpacePoint& x = sample[k];
    const PointResult& r = results[k];
    mixed_sup = mixed_sup.cwiseMax(r.mixed.cwiseAbs());

    if (r.asym > 1e-14) rep.invariant_failures.push_back({x, "a_tangential not symmetric", r.asym, 1e-14});
    if (r.tan_min < field.lambda() - 1e-12) {
      rep.invariant_failures.push_back({x, "Rayleigh quotient below lambda", r.tan_min, field.lambda()});
    }
    if (r.tan_max > field.Lambda() + 1e-12) {
      rep.invariant_failures.push_back({x, "Rayleigh quotient above Lambda", r.tan_max, field.Lambda()});
    }

    if (x.normal() >= epsilon0) {
      ++rep.strip_points;
      rep.lower_bound_numeric = std::min(rep.lower_bound_numeric, r.eig_min);
      rep.upper_bound_numeric = std::max(rep.upper_bound_numeric, r.eig_max);
      if (r.eig_min < rep.lower_bound_formula - kTol) {
        rep.violations.push_back({x, "eigenvalue below closed-form bound", r.eig_min, rep.lower_bound_formula});
      }
    } else if (x.normal() > 0.0) {
      rep.min_eigenvalue_below_strip = std::min(rep.min_eigenvalue_below_strip, r.eig_min);
      if (!(r.eig_min > 0.0)) rep.violations.push_back({x, "not strictly elliptic", r.eig_min, 0.0});
    } else {
      // Degenerate boundary: x_n^{alpha} kills the tangential block, so only
      // nonnegativity can be asked for.
      ++rep.boundary_points;
      if (r.eig_min < -1e-14) rep.violations.push_back({x, "negative eigenvalue on boundary", r.eig_min, 0.0});
    }
  }
  rep.mixed_condition = 1.0 - mixed_sup.squaredNorm() / field.lambda();
  if (!(rep.mixed_condition > delta)) {
    rep.invariant_failures.push_back({origin(p.n()), "1 - lambda^{-1} sum sup|a_in|^2 not above delta",
                                      rep.mixed_condition, delta});
  }
  return rep;
}

/// Uniform sample of the closed unit half-box [-1,1]^{n-1} x [0,1].
inline std::vector<HalfSpacePoint> sample_unit_half_box(const GrushinParams& p, std::size_t count, std::uint64_t seed,
                                                         double normal_lo = 0.0) {
  Rng rng(seed);
  std::vector<HalfSpacePoint> pts;
  pts.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    std::vector<double> t(static_cast<std::size_t>(p.n() - 1));
    for (double& c : t) c = rng.uniform(-1.0, 1.0);
    pts.emplace_back(std::move(t), rng.uniform(normal_lo, 1.0));
  }
  return pts;
}

}  // namespace grushinlab
