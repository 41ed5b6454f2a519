#include "sparseid/errors.hpp"
#include "sparseid/systems.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace sparseid;

namespace {

OdeSystem scalar(RhsFunction rhs) {
  OdeSystem s;
  s.name = "scalar";
  s.variable_names = {"x"};
  s.rhs = std::move(rhs);
  return s;
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

double max_abs_deviation_from_logistic(double tol) {
  const TimeSeries x =
      integrate_rk45(logistic_system(1.0, 5.0), vec({0.01}), 0, 10, 0.01, tol, tol);
  double worst = 0.0;
  for (Index k = 0; k < x.samples(); ++k) {
    worst = std::max(worst, std::abs(x.states()(k, 0) -
                                     logistic_exact(x.time(k), 1.0, 5.0, 0.01)));
  }
  return worst;
}

}  // namespace

TEST(LorenzRhs, Examples) {
  EXPECT_EQ(lorenz_rhs({0, 0, 0}), Eigen::Vector3d(0, 0, 0));
  const Eigen::Vector3d d = lorenz_rhs({-8, 7, 27});
  EXPECT_DOUBLE_EQ(d(0), 150.0);
  EXPECT_DOUBLE_EQ(d(1), -15.0);
  EXPECT_DOUBLE_EQ(d(2), -128.0);
  const Eigen::Vector3d e = lorenz_rhs({1, 1, 1});
  EXPECT_DOUBLE_EQ(e(0), 0.0);
  EXPECT_DOUBLE_EQ(e(1), 26.0);
  EXPECT_DOUBLE_EQ(e(2), 1.0 - 8.0 / 3.0);
}

TEST(FitzHughNagumoRhs, Examples) {
  const Eigen::Vector2d a = fitzhugh_nagumo_rhs({0, 0.1});
  EXPECT_NEAR(a(0), 0.0, 1e-15);
  EXPECT_NEAR(a(1), -0.01, 1e-15);
  const Eigen::Vector2d b = fitzhugh_nagumo_rhs({1, 2});
  EXPECT_NEAR(b(0), -0.5667, 1e-4);
  EXPECT_NEAR(b(1), -0.1, 1e-15);
  const Eigen::Vector2d c = fitzhugh_nagumo_rhs({1, 0}, -1.0);
  EXPECT_NEAR(c(0), 0.1 + 1.0 - 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(c(1), 0.1, 1e-15);
}

TEST(LogisticExact, Examples) {
  EXPECT_DOUBLE_EQ(logistic_exact(0.0, 1.0, 5.0, 0.01), 0.01);
  EXPECT_NEAR(logistic_exact(40.0, 1.0, 5.0, 0.01), 5.0, 1e-9);
  const double e = std::exp(1.0);
  EXPECT_NEAR(logistic_exact(1.0, 1.0, 5.0, 10.0), 50.0 * e / (10.0 * e - 5.0),
              1e-12);
}

TEST(ForcedVdpRhs, Examples) {
  const double w = std::numbers::pi / 5 + 0.01;
  EXPECT_EQ(forced_vdp_rhs(0.0, {0, 0}, kVdpMu, kVdpAmplitude, w),
            Eigen::Vector2d(0, 0));
  const Eigen::Vector2d peak = forced_vdp_rhs(
      std::numbers::pi / 2 / w, {0, 0}, kVdpMu, kVdpAmplitude, w);
  EXPECT_NEAR(peak(0), 0.0, 1e-15);
  EXPECT_NEAR(peak(1), 1.2, 1e-14);
  const Eigen::Vector2d start =
      forced_vdp_rhs(0.0, {-1, -1}, kVdpMu, kVdpAmplitude, w);
  EXPECT_DOUBLE_EQ(start(0), -1.0);
  EXPECT_DOUBLE_EQ(start(1), 1.0);
}

TEST(ForcedVdpSystem, DampingSignFlipsMu) {
  const OdeSystem lit = forced_vdp_system(1.0, kVdpMu, kVdpAmplitude, 1.0);
  const OdeSystem lc = forced_vdp_system(1.0);
  const Vector x = vec({0.5, 2.0});
  const double damping = kVdpMu * (1 - 0.25) * 2.0;
  EXPECT_NEAR(lit.evaluate(0.3, x)(1) - lc.evaluate(0.3, x)(1), -2 * damping,
              1e-12);
  EXPECT_TRUE(lc.time_dependent);
  EXPECT_EQ(lc.variable_names, (std::vector<std::string>{"x", "v"}));
}

TEST(ForcedVdpSystem, LimitCycleStaysBoundedLiteralSignBlowsUp) {
  const double w = std::numbers::pi / 5 + 0.01;
  const TimeSeries x =
      integrate_rk45(forced_vdp_system(w), vec({-1, -1}), 0, 40, 0.01);
  EXPECT_LT(x.states().col(0).cwiseAbs().maxCoeff(), 3.0);
  EXPECT_THROW(integrate_rk45(forced_vdp_system(w, kVdpMu, kVdpAmplitude, 1.0),
                              vec({-1, -1}), 0, 40, 0.01),
               IntegrationError);
}

TEST(Integrator, ConstantRhsGivesConstantTrajectory) {
  const TimeSeries x = integrate_rk45(
      scalar([](double, const Vector&, Vector& dx) { dx(0) = 0.0; }),
      vec({3.25}), 0, 2, 0.1);
  EXPECT_EQ(x.samples(), 21);
  EXPECT_TRUE((x.states().array() == 3.25).all());
}

TEST(Integrator, ExponentialReachesE) {
  const TimeSeries x = integrate_rk45(
      scalar([](double, const Vector& s, Vector& dx) { dx(0) = s(0); }),
      vec({1.0}), 0, 1, 0.01);
  EXPECT_NEAR(x.states()(x.samples() - 1, 0), std::exp(1.0), 1e-6);
  for (Index k = 0; k < x.samples(); ++k) {
    EXPECT_NEAR(x.states()(k, 0), std::exp(x.time(k)), 1e-7);
  }
}

TEST(Integrator, LogisticMatchesClosedForm) {
  EXPECT_LT(max_abs_deviation_from_logistic(1e-9), 1e-6);
}

TEST(Integrator, TighterToleranceDoesNotDegrade) {
  for (double tol : {1e-6, 1e-8, 1e-10}) {
    EXPECT_LE(max_abs_deviation_from_logistic(tol / 2),
              10.0 * max_abs_deviation_from_logistic(tol) + 1e-15)
        << tol;
  }
}

TEST(Integrator, ForwardThenBackwardReturnsToStart) {
  const TimeSeries fwd = integrate_rk45(
      scalar([](double, const Vector& s, Vector& dx) { dx(0) = s(0); }),
      vec({0.7}), 0, 2, 0.01);
  const Vector end = fwd.states().row(fwd.samples() - 1).transpose();
  const TimeSeries back = integrate_rk45(
      scalar([](double, const Vector& s, Vector& dx) { dx(0) = -s(0); }), end,
      0, 2, 0.01);
  EXPECT_NEAR(back.states()(back.samples() - 1, 0), 0.7, 1e-5);
}

TEST(Integrator, Deterministic) {
  const TimeSeries a = integrate_rk45(lorenz_system(), vec({-8, 7, 27}), 0, 2, 0.01);
  const TimeSeries b = integrate_rk45(lorenz_system(), vec({-8, 7, 27}), 0, 2, 0.01);
  EXPECT_EQ(a.states(), b.states());
}

TEST(Integrator, BlowUpReportsLastValidTime) {
  try {
    integrate_rk45(
        scalar([](double, const Vector& s, Vector& dx) { dx(0) = s(0) * s(0); }),
        vec({1.0}), 0, 2, 0.01);
    FAIL() << "expected IntegrationError";
  } catch (const IntegrationError& e) {
    EXPECT_GT(e.last_valid_time(), 0.5);
    EXPECT_LE(e.last_valid_time(), 1.0);
  }
}

TEST(Integrator, ContractErrors) {
  const OdeSystem s = logistic_system();
  EXPECT_THROW(integrate_rk45(s, vec({1}), 1, 1, 0.1), ContractError);
  EXPECT_THROW(integrate_rk45(s, vec({1}), 0, 1, 0.0), ContractError);
  EXPECT_THROW(integrate_rk45(s, vec({1}), 0, 1e9, 1e-3), ContractError);
  EXPECT_THROW(integrate_rk45(s, vec({1, 2}), 0, 1, 0.1), ContractError);
}

TEST(Integrator, GridSize) {
  EXPECT_EQ(grid_size(0, 10, 0.01), 1001u);
  EXPECT_EQ(grid_size(0, 1, 0.3), 4u);
  EXPECT_EQ(grid_size(0, 0.3, 0.1), 4u);
}

TEST(LogisticTrajectory, SamplesClosedForm) {
  const TimeSeries x = logistic_trajectory(1.0, 5.0, 10.0, 0, 10, 0.01);
  EXPECT_EQ(x.samples(), 1001);
  EXPECT_DOUBLE_EQ(x.states()(100, 0), logistic_exact(1.0, 1.0, 5.0, 10.0));
}

TEST(AnalyticDerivatives, EvaluatesRhsAtEverySample) {
  const TimeSeries x = integrate_rk45(lorenz_system(), vec({-8, 7, 27}), 0, 1, 0.1);
  const Matrix d = analytic_derivatives(lorenz_system(), x);
  EXPECT_DOUBLE_EQ(d(0, 0), 150.0);
  for (Index k = 0; k < x.samples(); ++k) {
    const Eigen::Vector3d ref = lorenz_rhs(x.states().row(k).transpose());
    EXPECT_EQ(d.row(k).transpose(), ref);
  }
}

TEST(RhsPurity, RepeatedCallsAreBitIdentical) {
  for (const OdeSystem& s : {lorenz_system(), fitzhugh_nagumo_system(),
                             logistic_system(), forced_vdp_system(0.7)}) {
    const Vector x = Vector::LinSpaced(s.dimension(), 0.3, 1.7);
    EXPECT_EQ(s.evaluate(1.25, x), s.evaluate(1.25, x)) << s.name;
  }
}

TEST(GroundTruth, LorenzInDegreeSixLibrary) {
  LibrarySpec lib;
  lib.poly_degree = 6;
  lib.variable_names = {"x", "y", "z"};
  const CoefficientMatrix c = ground_truth_coefficients(lorenz_true_model(), lib);
  ASSERT_EQ(c.terms(), 84);
  EXPECT_EQ(c.values(0, 1), -10.0);
  EXPECT_EQ(c.values(0, 2), 10.0);
  EXPECT_EQ(c.values.row(0).cwiseAbs().sum(), 20.0);
}

TEST(GroundTruth, EmptyModelGivesZeros) {
  LibrarySpec lib;
  lib.poly_degree = 2;
  lib.variable_names = {"x", "y"};
  const TrueModel m{"none", {{}, {}}};
  const CoefficientMatrix c = ground_truth_coefficients(m, lib);
  EXPECT_EQ(c.equations(), 2);
  EXPECT_TRUE(c.values.isZero(0.0));
}

TEST(GroundTruth, LogisticPlacement) {
  LibrarySpec lib;
  lib.poly_degree = 4;
  lib.variable_names = {"x"};
  const CoefficientMatrix c = ground_truth_coefficients(logistic_true_model(), lib);
  EXPECT_EQ(c.column_names[1], "x");
  EXPECT_DOUBLE_EQ(c.values(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(c.values(0, 2), -0.2);
}

TEST(GroundTruth, MissingTermThrows) {
  LibrarySpec lib;
  lib.poly_degree = 1;
  lib.variable_names = {"x", "y", "z"};
  EXPECT_THROW(ground_truth_coefficients(lorenz_true_model(), lib),
               MissingTermError);
}

TEST(GroundTruth, PlacedMassEqualsModelMass) {
  const double w = std::numbers::pi / 5 + 0.01;
  LibrarySpec lib;
  lib.poly_degree = 3;
  lib.variable_names = {"x", "v"};
  lib.time_features = TimeFeatureSpec{harmonic_alphas(6)};
  const TrueModel models[] = {forced_vdp_true_model(w, std::numbers::pi / 5),
                              fitzhugh_nagumo_true_model(),
                              fitzhugh_nagumo_true_model(-1.0)};
  for (const TrueModel& m : models) {
    LibrarySpec l = lib;
    if (m.system != forced_vdp_system(w).name) {
      l.time_features.reset();
      l.variable_names = {"x", "y"};
    }
    double model_mass = 0.0;
    for (const auto& eq : m.equations) {
      for (const auto& [name, coef] : eq) model_mass += std::abs(coef);
    }
    const CoefficientMatrix c = ground_truth_coefficients(m, l);
    EXPECT_NEAR(c.values.cwiseAbs().sum(), model_mass, 1e-12) << m.system;
  }
}

TEST(ForcedVdpTruth, ExpansionTerms) {
  const double a = std::numbers::pi / 5;
  const double eps = 0.01;
  const TrueModel m = forced_vdp_true_model(a + eps, a);
  LibrarySpec lib;
  lib.poly_degree = 3;
  lib.variable_names = {"x", "v"};
  lib.time_features = TimeFeatureSpec{harmonic_alphas(6)};
  const CoefficientMatrix c = ground_truth_coefficients(m, lib);
  auto at = [&](const std::string& name) {
    const auto it = std::find(c.column_names.begin(), c.column_names.end(), name);
    return c.values(1, it - c.column_names.begin());
  };
  EXPECT_DOUBLE_EQ(at("v"), kVdpMu);
  EXPECT_DOUBLE_EQ(at("x^2*v"), -kVdpMu);
  EXPECT_DOUBLE_EQ(at("x"), -1.0);
  EXPECT_DOUBLE_EQ(at(time_feature_name(a, TimeFamily::kSin)), 1.2);
  EXPECT_NEAR(at(time_feature_name(a, TimeFamily::kTCos)), 1.2 * eps, 1e-15);
  EXPECT_NEAR(at(time_feature_name(a, TimeFamily::kT2Sin)), -0.6 * eps * eps,
              1e-15);
}
