#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "grushinlab/closed_forms.hpp"
#include "grushinlab/coefficients.hpp"
#include "grushinlab/identities.hpp"
#include "support.hpp"

using namespace grushinlab;
using grushinlab::testing::pt;

namespace {

Jet2 random_jet(Rng& rng, int n) {
  Eigen::VectorXd g(n);
  Eigen::MatrixXd H(n, n);
  for (int i = 0; i < n; ++i) {
    g(i) = rng.uniform(-1.0, 1.0);
    for (int j = i; j < n; ++j) H(i, j) = H(j, i) = rng.uniform(-2.0, 2.0);
  }
  return Jet2(rng.uniform(-1.0, 1.0), g, H);
}

double total_deviation(const CoefficientField& f, const HalfSpacePoint& x) {
  const Eigen::MatrixXd a = f.a_tangential(x);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  return (a - I).cwiseAbs().sum() + f.a_mixed(x).cwiseAbs().sum();
}

}  // namespace

TEST(IdentityField, ReducesToModelOperator) {
  Rng rng(1);
  for (int n : {2, 4}) {
    const GrushinParams p(n, 0.75);
    const auto f = make_identity_field(p);
    EXPECT_EQ(f.lambda(), 1.0);
    EXPECT_EQ(f.Lambda(), 1.0);
    EXPECT_EQ(f.delta(), 0.5);
    EXPECT_TRUE(std::isinf(f.decay_s()));
    for (const auto& x : sample_unit_half_box(p, 100, 2)) {
      const Jet2 j = random_jet(rng, n);
      EXPECT_NEAR(apply_L(f, j, x, p), apply_grushin(j, x, p), 1e-14 * grushin_term_scale(j, x, p));
    }
  }
}

TEST(IdentityField, AuditPassesForAnyStrip) {
  const GrushinParams p(3, 1.0);
  const auto f = make_identity_field(p);
  const auto sample = sample_unit_half_box(p, 500, 3);
  for (double eps0 : {0.05, 0.5, 0.95}) {
    const auto r = audit_ellipticity(f, p, eps0, sample);
    EXPECT_TRUE(r.passed());
    EXPECT_GT(r.lower_bound_formula, 0.0);
  }
}

TEST(IdentityField, AuditExampleBound) {
  const GrushinParams p(2, 1.0);
  const auto r = audit_ellipticity(make_identity_field(p), p, 0.5, sample_unit_half_box(p, 1000, 4));
  EXPECT_DOUBLE_EQ(r.tau, 0.75);
  EXPECT_DOUBLE_EQ(r.lower_bound_formula, 0.0625);
  EXPECT_GE(r.lower_bound_numeric, 0.0625);
  EXPECT_TRUE(r.violations.empty());
}

TEST(IdentityField, DegenerateMatrixSpectrum) {
  const GrushinParams p(4, 1.5);
  const auto f = make_identity_field(p);
  for (const auto& x : sample_unit_half_box(p, 50, 5)) {
    Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(degenerate_matrix(f, x, p)).eigenvalues();
    std::sort(ev.data(), ev.data() + ev.size());
    const double t = std::pow(x.normal(), 3.0);
    for (int k = 0; k < 4; ++k) {
      const double expected = (t <= 1.0) ? (k < 3 ? t : 1.0) : (k == 0 ? 1.0 : t);
      EXPECT_NEAR(ev(k), expected, 1e-14);
    }
  }
}

TEST(Perturbation, Rejections) {
  const GrushinParams p(2, 1.0);
  EXPECT_THROW(make_decaying_perturbation(p, 0.0, 0.3, 1), std::invalid_argument);
  EXPECT_THROW(make_decaying_perturbation(p, -1.0, 0.3, 1), std::invalid_argument);
  EXPECT_THROW(make_decaying_perturbation(p, 2.0, 0.0, 1), std::invalid_argument);
  EXPECT_THROW(make_decaying_perturbation(p, 2.0, 1.5, 1), std::invalid_argument);
}

TEST(Perturbation, SmallAmplitudeApproachesIdentity) {
  const GrushinParams p(3, 1.0);
  const auto f = make_decaying_perturbation(p, 2.0, 1e-12, 8);
  // m^2 + m entries, each at most amplitude / (2m): total <= amplitude (m+1)/2.
  for (const auto& x : sample_unit_half_box(p, 200, 6)) EXPECT_LE(total_deviation(f, x), 1.5e-12);
}

TEST(Perturbation, DeterministicAndSymmetric) {
  const GrushinParams p(3, 1.0);
  const auto f = make_decaying_perturbation(p, 2.0, 0.7, 42);
  const auto g = make_decaying_perturbation(p, 2.0, 0.7, 42);
  const auto h = make_decaying_perturbation(p, 2.0, 0.7, 43);
  bool differs = false;
  for (const auto& x : sample_unit_half_box(p, 100, 7)) {
    const Eigen::MatrixXd a = f.a_tangential(x);
    EXPECT_EQ(a, a.transpose());
    EXPECT_EQ(a, g.a_tangential(x));
    EXPECT_EQ(f.a_mixed(x), g.a_mixed(x));
    differs = differs || (a != h.a_tangential(x));
  }
  EXPECT_TRUE(differs);
}

TEST(Perturbation, DecayEnvelope) {
  // Every pair obeys |a_ij - delta_ij| + |a_in| <= d^{-s}; with n = 2 the
  // full sum is one such pair.
  for (int n : {2, 3}) {
    const GrushinParams p(n, 1.0);
    const auto f = make_decaying_perturbation(p, 2.0, 1.0, 3);
    for (const auto& x : sample_gauge_shell(p, 1000, 10.0, 1000.0, 9)) {
      const double env = std::pow(gauge(x, p), -2.0);
      const Eigen::MatrixXd a = f.a_tangential(x);
      const Eigen::VectorXd b = f.a_mixed(x);
      for (int i = 0; i < n - 1; ++i) {
        for (int j = 0; j < n - 1; ++j) EXPECT_LE(std::abs(a(i, j) - (i == j)) + std::abs(b(i)), env * (1 + 1e-12));
      }
      if (n == 2) {
        EXPECT_LE(total_deviation(f, x), 1e-2);
      }
    }
  }
}

TEST(Perturbation, MixedConditionAtAmplitudePointThree) {
  const GrushinParams p(3, 1.0);
  const auto f = make_decaying_perturbation(p, 2.0, 0.3, 10);
  Rng rng(3);
  Eigen::VectorXd sup = Eigen::VectorXd::Zero(2);
  for (int k = 0; k < 20000; ++k) {
    const auto x = pt({rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)}, rng.uniform(0.0, 3.0));
    sup = sup.cwiseMax(f.a_mixed(x).cwiseAbs());
  }
  EXPECT_GT(1.0 - sup.squaredNorm() / f.lambda(), f.delta());
}

TEST(Audit, PerturbedFieldPasses) {
  for (int n : {2, 3}) {
    for (double a : {0.5, 1.0, 2.0}) {
      const GrushinParams p(n, a);
      const auto f = make_decaying_perturbation(p, 2.0, 0.3, 11);
      const auto r = audit_ellipticity(f, p, 0.5, sample_unit_half_box(p, 1000, 12));
      EXPECT_TRUE(r.passed()) << "n=" << n << " alpha=" << a;
      EXPECT_GE(r.lower_bound_numeric, r.lower_bound_formula - 1e-10);
      EXPECT_GT(r.min_eigenvalue_below_strip, 0.0);
      EXPECT_GT(r.mixed_condition, f.delta());
      EXPECT_GE(r.upper_bound_numeric, r.lower_bound_numeric);
    }
  }
}

TEST(Audit, BoundaryPointsAreDegenerateButAllowed) {
  const GrushinParams p(3, 1.0);
  const auto f = make_decaying_perturbation(p, 2.0, 0.3, 2);
  std::vector<HalfSpacePoint> pts = {pt({0.1, 0.2}, 0.0), pt({-0.7, 0.4}, 0.0)};
  for (const auto& x : pts) {
    Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(degenerate_matrix(f, x, p)).eigenvalues();
    EXPECT_NEAR(ev(0), 0.0, 1e-15);
    EXPECT_NEAR(ev(1), 0.0, 1e-15);
    EXPECT_NEAR(ev(2), 1.0, 1e-15);
  }
  const auto r = audit_ellipticity(f, p, 0.5, pts);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.boundary_points, 2u);
}

TEST(Audit, CatchesFalseStructureClaims) {
  const GrushinParams p(2, 1.0);
  // Claims lambda = Lambda = 1 while the tangential coefficient is 3.
  const CoefficientField liar(
      2, [](const HalfSpacePoint&) { return Eigen::MatrixXd::Constant(1, 1, 3.0); },
      [](const HalfSpacePoint&) { return Eigen::VectorXd::Constant(1, 0.9); }, {}, "liar");
  const auto r = audit_ellipticity(liar, p, 0.5, sample_unit_half_box(p, 50, 1));
  EXPECT_FALSE(r.passed());
  EXPECT_FALSE(r.invariant_failures.empty());
}

TEST(Audit, TauAndStripValidation) {
  const GrushinParams p(2, 1.0);
  const auto f = make_identity_field(p);
  const auto s = sample_unit_half_box(p, 10, 1);
  EXPECT_THROW(audit_ellipticity(f, p, 0.0, s), std::invalid_argument);
  EXPECT_THROW(audit_ellipticity(f, p, 1.0, s), std::invalid_argument);
  EXPECT_THROW(audit_ellipticity(f, p, 0.5, s, 0.4), std::invalid_argument);
  const auto r = audit_ellipticity(f, p, 0.5, s, 0.9);
  EXPECT_DOUBLE_EQ(r.lower_bound_formula, ellipticity_formula_bound(1.0, 0.5, 0.5, 1.0, 0.9));
}
