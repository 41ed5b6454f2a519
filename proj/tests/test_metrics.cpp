#include "oracles.hpp"
#include "sparseid/errors.hpp"
#include "sparseid/metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

using namespace sparseid;

namespace {

CoefficientMatrix coefs(Matrix values) {
  CoefficientMatrix c;
  c.values = std::move(values);
  for (Index j = 0; j < c.terms(); ++j) c.column_names.push_back("c" + std::to_string(j));
  return c;
}

CoefficientMatrix row(std::initializer_list<double> v) {
  Matrix m(1, static_cast<Index>(v.size()));
  Index j = 0;
  for (double x : v) m(0, j++) = x;
  return coefs(m);
}

LibrarySpec forced_library() {
  LibrarySpec lib;
  lib.poly_degree = 3;
  lib.variable_names = {"x", "v"};
  lib.time_features = TimeFeatureSpec{harmonic_alphas(6)};
  return lib;
}

Index column_of(const LibrarySpec& lib, double alpha, TimeFamily family) {
  for (const TimeColumn& c : time_columns(lib)) {
    if (c.alpha == alpha && c.family == family) return c.column;
  }
  return -1;
}

}  // namespace

TEST(RelativeErrors, Examples) {
  const CoefficientMatrix t = row({2, 0});
  EXPECT_EQ(rel_l2_error(t, t), 0.0);
  EXPECT_EQ(rel_l1_error(t, t), 0.0);
  EXPECT_DOUBLE_EQ(rel_l2_error(row({0, 0}), t), 1.0);
  EXPECT_DOUBLE_EQ(rel_l1_error(row({1, 1}), t), 1.0);
}

TEST(RelativeErrors, MatchDoubleLoopOracle) {
  oracle::Gen gen(1);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix a = gen.matrix(3, 10);
    const Matrix b = gen.matrix(3, 10);
    EXPECT_EQ(rel_l2_error(coefs(a), coefs(b)), oracle::rel_l2(a, b));
    EXPECT_EQ(rel_l1_error(coefs(a), coefs(b)), oracle::rel_l1(a, b));
  }
}

TEST(RelativeErrors, ByEquation) {
  Matrix t(2, 2);
  t << 2, 0, 0, 4;
  Matrix e(2, 2);
  e << 1, 1, 0, 4;
  const auto l1 = rel_l1_error_by_equation(coefs(e), coefs(t));
  ASSERT_EQ(l1.size(), 2u);
  EXPECT_DOUBLE_EQ(l1[0], 1.0);
  EXPECT_DOUBLE_EQ(l1[1], 0.0);
  const auto l2 = rel_l2_error_by_equation(coefs(e), coefs(t));
  EXPECT_DOUBLE_EQ(l2[0], std::sqrt(2.0) / 2.0);
}

TEST(RelativeErrors, Errors) {
  EXPECT_THROW(rel_l2_error(row({1, 1}), row({0, 0})), UndefinedMetricError);
  EXPECT_THROW(rel_l1_error(row({1, 1}), row({0, 0})), UndefinedMetricError);
  EXPECT_THROW(rel_l2_error(row({1, 1}), row({1, 1, 1})), ContractError);
  CoefficientMatrix renamed = row({1, 1});
  renamed.column_names[1] = "other";
  EXPECT_THROW(rel_l1_error(renamed, row({1, 1})), ContractError);
}

TEST(RelativeErrorsProperty, NonnegativeZeroIffEqualScaleInvariant) {
  oracle::Gen gen(2);
  for (int trial = 0; trial < 100; ++trial) {
    const Index d = gen.integer(1, 4);
    const Index n = gen.integer(1, 20);
    const Matrix a = gen.matrix(d, n);
    const Matrix b = gen.matrix(d, n);
    const double c = gen.uniform(0.1, 10.0) * (trial % 2 ? -1.0 : 1.0);
    const double l2 = rel_l2_error(coefs(a), coefs(b));
    const double l1 = rel_l1_error(coefs(a), coefs(b));
    EXPECT_GT(l2, 0.0);
    EXPECT_GT(l1, 0.0);
    EXPECT_EQ(rel_l2_error(coefs(b), coefs(b)), 0.0);
    EXPECT_NEAR(rel_l2_error(coefs(c * a), coefs(c * b)), l2, 1e-12 * l2);
    EXPECT_NEAR(rel_l1_error(coefs(c * a), coefs(c * b)), l1, 1e-12 * l1);
    const double root = std::sqrt(static_cast<double>(d * n));
    EXPECT_LE(l2, l1 * root * (1 + 1e-12));
    EXPECT_LE(l1, l2 * root * (1 + 1e-12));
  }
}

TEST(Frequency, EntrainedExample) {
  const LibrarySpec lib = forced_library();
  const double a = std::numbers::pi / 5;
  Vector xi = Vector::Zero(static_cast<Index>(library_column_names(lib).size()));
  xi(column_of(lib, a, TimeFamily::kSin)) = 1.2;
  xi(column_of(lib, a, TimeFamily::kTCos)) = 0.012;
  const FrequencyEstimate f = reconstruct_frequency(xi, lib);
  EXPECT_EQ(f.alpha, a);
  EXPECT_NEAR(f.epsilon, 0.01, 1e-15);
  EXPECT_NEAR(f.omega, a + 0.01, 1e-15);
}

TEST(Frequency, NoCorrectionTerm) {
  const LibrarySpec lib = forced_library();
  const double a = std::numbers::pi / 3;
  Vector xi = Vector::Zero(static_cast<Index>(library_column_names(lib).size()));
  xi(column_of(lib, a, TimeFamily::kSin)) = -0.7;
  const FrequencyEstimate f = reconstruct_frequency(xi, lib);
  EXPECT_EQ(f.omega, a);
  EXPECT_EQ(f.epsilon, 0.0);
}

TEST(Frequency, TieGoesToSmallerAlpha) {
  const LibrarySpec lib = forced_library();
  Vector xi = Vector::Zero(static_cast<Index>(library_column_names(lib).size()));
  xi(column_of(lib, std::numbers::pi / 2, TimeFamily::kSin)) = 1.0;
  xi(column_of(lib, std::numbers::pi / 4, TimeFamily::kSin)) = -1.0;
  EXPECT_EQ(reconstruct_frequency(xi, lib).alpha, std::numbers::pi / 4);
}

TEST(Frequency, LeastSquaresOnTimeLibraryRecoversOmega) {
  // Dense least squares over every alpha spreads the fit across neighbouring
  // frequencies, so the oracle uses the single-alpha block.
  const double omega = std::numbers::pi / 5 + 0.01;
  const Vector t = Vector::LinSpaced(1001, 0.0, 10.0);
  const Vector b = (1.2 * (omega * t.array()).sin()).matrix();
  LibrarySpec lib = forced_library();
  lib.time_features->alphas = {std::numbers::pi / 5};
  const FeatureMatrix phi = build_time_library(t, *lib.time_features);
  const Vector fitted = oracle::normal_equations(phi.values, b);
  Vector xi = Vector::Zero(static_cast<Index>(library_column_names(lib).size()));
  xi.tail(fitted.size()) = fitted;
  const FrequencyEstimate f = reconstruct_frequency(xi, lib);
  EXPECT_EQ(f.alpha, std::numbers::pi / 5);
  EXPECT_LT(std::abs(f.omega - omega), 1e-3);
}

TEST(Frequency, InvariantToPositiveScaling) {
  oracle::Gen gen(3);
  const LibrarySpec lib = forced_library();
  const Index n = static_cast<Index>(library_column_names(lib).size());
  for (int trial = 0; trial < 30; ++trial) {
    const Vector xi = gen.vector(n);
    const double c = gen.uniform(0.01, 100.0);
    Vector scaled = xi;
    for (const TimeColumn& col : time_columns(lib)) scaled(col.column) *= c;
    const FrequencyEstimate a = reconstruct_frequency(xi, lib);
    const FrequencyEstimate b = reconstruct_frequency(scaled, lib);
    EXPECT_EQ(a.alpha, b.alpha);
    EXPECT_NEAR(a.omega, b.omega, 1e-12);
  }
}

TEST(Frequency, Errors) {
  const LibrarySpec lib = forced_library();
  const Vector zero = Vector::Zero(static_cast<Index>(library_column_names(lib).size()));
  EXPECT_THROW(reconstruct_frequency(zero, lib), NoForcingDetectedError);
  LibrarySpec no_tcos = lib;
  no_tcos.time_features->families = {TimeFamily::kSin, TimeFamily::kCos};
  EXPECT_THROW(reconstruct_frequency(
                   Vector::Ones(static_cast<Index>(library_column_names(no_tcos).size())),
                   no_tcos),
               ContractError);
  LibrarySpec plain = lib;
  plain.time_features.reset();
  EXPECT_THROW(reconstruct_frequency(Vector::Ones(10), plain), ContractError);
  EXPECT_THROW(reconstruct_frequency(Vector::Ones(3), lib), ContractError);
}

TEST(SpuriousMass, Examples) {
  const LibrarySpec lib = forced_library();
  const double a = std::numbers::pi / 5;
  const Index n = static_cast<Index>(library_column_names(lib).size());
  Vector xi = Vector::Zero(n);
  xi(1) = 5.0;  // polynomial columns never count
  xi(column_of(lib, a, TimeFamily::kSin)) = 1.2;
  xi(column_of(lib, a, TimeFamily::kT2Sin)) = 0.4;
  EXPECT_EQ(spurious_time_mass(xi, lib, a), 0.0);
  xi(column_of(lib, std::numbers::pi, TimeFamily::kCos)) = 0.2;
  xi(column_of(lib, std::numbers::pi / 6, TimeFamily::kTSin)) = -0.3;
  EXPECT_DOUBLE_EQ(spurious_time_mass(xi, lib, a), 0.5);
}

TEST(SpuriousMass, MatchesNameFilterOracle) {
  oracle::Gen gen(4);
  const LibrarySpec lib = forced_library();
  const auto names = library_column_names(lib);
  const Index n = static_cast<Index>(names.size());
  for (int trial = 0; trial < 30; ++trial) {
    Vector xi = Vector::Zero(n);
    for (int k = 0; k < 8; ++k) xi(gen.integer(0, n - 1)) = gen.uniform(-2, 2);
    const double a = harmonic_alphas(6)[static_cast<std::size_t>(gen.integer(0, 5))];
    // A time column is off-frequency when its name does not carry alpha's
    // printed form.
    char buf[64];
    std::snprintf(buf, sizeof buf, "(%.17g*t)", a);
    double ref = 0.0;
    for (Index j = 0; j < n; ++j) {
      const std::string& name = names[static_cast<std::size_t>(j)];
      if (name.find("*t)") != std::string::npos && name.find(buf) == std::string::npos) {
        ref += std::abs(xi(j));
      }
    }
    EXPECT_NEAR(spurious_time_mass(xi, lib, a), ref, 1e-12);
  }
}

TEST(Ensemble, Examples) {
  const EnsembleStats a = ensemble_stats({1, 1, 1});
  EXPECT_EQ(a.mean, 1.0);
  EXPECT_EQ(a.std, 0.0);
  const EnsembleStats b = ensemble_stats({0, 2});
  EXPECT_DOUBLE_EQ(b.mean, 1.0);
  EXPECT_DOUBLE_EQ(b.std, std::sqrt(2.0));
  EXPECT_THROW(ensemble_stats({1.0}), InsufficientSamplesError);
  EXPECT_THROW(ensemble_stats({}), InsufficientSamplesError);
}

TEST(Ensemble, UnitNormalSample) {
  std::mt19937_64 engine(5);
  std::normal_distribution<double> normal;
  std::vector<double> xs(1000);
  for (double& x : xs) x = normal(engine);
  const EnsembleStats s = ensemble_stats(xs);
  EXPECT_LT(std::abs(s.mean), 0.1);
  EXPECT_LT(std::abs(s.std - 1.0), 0.1);
}

TEST(Ensemble, MatchesStreamingWelford) {
  oracle::Gen gen(6);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> xs(static_cast<std::size_t>(gen.integer(2, 300)));
    const double offset = gen.uniform(-100, 100);
    for (double& x : xs) x = offset + gen.uniform(-3, 3);
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      const double delta = xs[k] - mean;
      mean += delta / static_cast<double>(k + 1);
      m2 += delta * (xs[k] - mean);
    }
    const EnsembleStats s = ensemble_stats(xs);
    EXPECT_NEAR(s.mean, mean, 1e-12 * (1 + std::abs(mean)));
    EXPECT_NEAR(s.std, std::sqrt(m2 / static_cast<double>(xs.size() - 1)), 1e-12);
  }
}
