#include "oracles.hpp"
#include "sparseid/errors.hpp"
#include "sparseid/library.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

using namespace sparseid;

namespace {

TimeSeries series(const Matrix& states, std::vector<std::string> names = {}) {
  return TimeSeries(0.0, 0.1, states, std::move(names));
}

std::size_t binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return static_cast<std::size_t>(std::llround(r));
}

// Evaluates a monomial name such as "x^2*y" by parsing it.
double evaluate_name(const std::string& name,
                     const std::vector<std::string>& vars,
                     const Eigen::RowVectorXd& state) {
  if (name == "1") return 1.0;
  double value = 1.0;
  std::stringstream ss(name);
  std::string factor;
  while (std::getline(ss, factor, '*')) {
    const auto caret = factor.find('^');
    const std::string var = factor.substr(0, caret);
    const int power =
        caret == std::string::npos ? 1 : std::stoi(factor.substr(caret + 1));
    const auto k = std::find(vars.begin(), vars.end(), var) - vars.begin();
    value *= std::pow(state(k), power);
  }
  return value;
}

}  // namespace

TEST(PolynomialLibrary, LorenzDegreeSixHas84Columns) {
  oracle::Gen gen(1);
  const FeatureMatrix f =
      build_polynomial_library(series(gen.matrix(10, 3), {"x", "y", "z"}), 6);
  EXPECT_EQ(f.cols(), 84);
  EXPECT_EQ(f.names.size(), 84u);
  EXPECT_EQ(polynomial_column_count(3, 6, true), 84u);
}

TEST(PolynomialLibrary, OneVariableDegreeTwo) {
  Matrix x(3, 1);
  x << 1, 2, 3;
  const FeatureMatrix f = build_polynomial_library(series(x, {"x"}), 2);
  EXPECT_EQ(f.names, (std::vector<std::string>{"1", "x", "x^2"}));
  EXPECT_EQ(f.values.col(2), (Vector(3) << 1, 4, 9).finished());
}

TEST(PolynomialLibrary, ZeroStatesGiveOnlyConstant) {
  for (std::size_t d = 0; d <= 4; ++d) {
    const FeatureMatrix f =
        build_polynomial_library(series(Matrix::Zero(4, 2)), d);
    EXPECT_TRUE(f.values.col(0).isOnes());
    EXPECT_TRUE(f.values.rightCols(f.cols() - 1).isZero(0.0));
  }
}

TEST(PolynomialLibrary, GradedLexicographicNames) {
  const FeatureMatrix f =
      build_polynomial_library(series(Matrix::Ones(2, 2), {"x", "y"}), 3);
  EXPECT_EQ(f.names, (std::vector<std::string>{"1", "x", "y", "x^2", "x*y",
                                               "y^2", "x^3", "x^2*y", "x*y^2",
                                               "y^3"}));
}

TEST(PolynomialLibrary, WithoutConstant) {
  const FeatureMatrix f = build_polynomial_library(
      series(Matrix::Ones(2, 2), {"x", "y"}), 2, false);
  EXPECT_EQ(f.names.front(), "x");
  EXPECT_EQ(f.cols(), 5);
}

TEST(PolynomialLibrary, TooLargeThrows) {
  // 10 variables, degree 6: C(16, 6) = 8008; degree 7: C(17, 7) = 19448.
  const TimeSeries x = series(Matrix::Ones(2, 10));
  EXPECT_NO_THROW(build_polynomial_library(x, 6));
  EXPECT_THROW(build_polynomial_library(x, 7), LibraryTooLargeError);
}

TEST(PolynomialLibraryProperty, CountMatchesBinomial) {
  for (std::size_t n = 1; n <= 4; ++n) {
    for (std::size_t d = 0; d <= 10; ++d) {
      EXPECT_EQ(polynomial_column_count(n, d, true), binomial(n + d, d));
      EXPECT_EQ(monomial_exponents(n, d, true).size(), binomial(n + d, d));
      EXPECT_EQ(polynomial_column_count(n, d, false), binomial(n + d, d) - 1);
    }
  }
}

TEST(PolynomialLibraryProperty, NamesEvaluateToColumnValues) {
  oracle::Gen gen(2);
  const std::vector<std::string> vars = {"x", "y", "z"};
  const Matrix states = gen.matrix(12, 3);
  const FeatureMatrix f = build_polynomial_library(series(states, vars), 4);
  for (Index j = 0; j < f.cols(); ++j) {
    for (Index k = 0; k < states.rows(); ++k) {
      const double ref = evaluate_name(f.names[static_cast<std::size_t>(j)],
                                       vars, states.row(k));
      EXPECT_NEAR(f.values(k, j), ref, 1e-12 * (1.0 + std::abs(ref)));
    }
  }
  Eigen::RowVectorXd s(3);
  s << 2, 3, 0;
  EXPECT_EQ(evaluate_name("x^2*y", vars, s), 12.0);
}

TEST(MonomialNames, Format) {
  EXPECT_EQ(monomial_name({0, 0}, {"x", "y"}), "1");
  EXPECT_EQ(monomial_name({1, 0}, {"x", "y"}), "x");
  EXPECT_EQ(monomial_name({2, 1}, {"x", "y"}), "x^2*y");
}

TEST(TimeLibrary, SinColumnStartsAtZero) {
  const Vector t = Vector::LinSpaced(5, 0.0, 1.0);
  const FeatureMatrix f = build_time_library(
      t, TimeFeatureSpec{{std::numbers::pi / 5}, {TimeFamily::kSin}});
  ASSERT_EQ(f.cols(), 1);
  EXPECT_EQ(f.values(0, 0), 0.0);
  EXPECT_NEAR(f.values(4, 0), std::sin(std::numbers::pi / 5), 1e-15);
}

TEST(TimeLibrary, HarmonicAlphasWithFiveFamiliesGive30Columns) {
  const Vector t = Vector::LinSpaced(11, 0.0, 1.0);
  const FeatureMatrix f =
      build_time_library(t, TimeFeatureSpec{harmonic_alphas(6)});
  EXPECT_EQ(f.cols(), 30);
  EXPECT_EQ(harmonic_alphas(6)[4], std::numbers::pi / 5);
}

TEST(TimeLibrary, TSquaredFamilyVanishesAtTimeZero) {
  const Vector t = Vector::LinSpaced(3, 0.0, 2.0);
  for (double a : {0.3, 1.0, 7.0}) {
    const FeatureMatrix f =
        build_time_library(t, TimeFeatureSpec{{a}, {TimeFamily::kT2Sin}});
    EXPECT_EQ(f.values(0, 0), 0.0);
    EXPECT_NEAR(f.values(2, 0), 4.0 * std::sin(2.0 * a), 1e-14);
  }
}

TEST(TimeLibrary, NamesCarryFullPrecisionAlpha) {
  EXPECT_EQ(time_feature_name(std::numbers::pi / 5, TimeFamily::kTCos),
            "t*cos(0.62831853071795862*t)");
  EXPECT_EQ(time_feature_name(1.0, TimeFamily::kT2Sin), "t^2*sin(1*t)");
}

TEST(TimeLibrary, FamilyNamesRoundTrip) {
  for (TimeFamily f : {TimeFamily::kSin, TimeFamily::kCos, TimeFamily::kTCos,
                       TimeFamily::kTSin, TimeFamily::kT2Sin,
                       TimeFamily::kT2Cos}) {
    EXPECT_EQ(parse_time_family(family_name(f)), f);
  }
  EXPECT_THROW(parse_time_family("tan"), ContractError);
}

TEST(LibrarySpecTest, ValidateRejectsBadTimeFeatures) {
  LibrarySpec spec;
  spec.time_features = TimeFeatureSpec{{1.0, -1.0}};
  EXPECT_THROW(spec.validate(), ContractError);
  spec.time_features = TimeFeatureSpec{{1.0, 1.0}};
  EXPECT_THROW(spec.validate(), ContractError);
  spec.time_features =
      TimeFeatureSpec{{1.0}, {TimeFamily::kSin, TimeFamily::kSin}};
  EXPECT_THROW(spec.validate(), ContractError);
}

TEST(Augment, ConcatenatesInOrder) {
  oracle::Gen gen(3);
  const TimeSeries x = series(gen.matrix(20, 2), {"x", "v"});
  const FeatureMatrix theta = build_polynomial_library(x, 3);
  const FeatureMatrix phi =
      build_time_library(x.times(), TimeFeatureSpec{harmonic_alphas(6)});
  const FeatureMatrix f = augment(theta, phi);
  ASSERT_EQ(f.cols(), 40);
  EXPECT_EQ(f.values.leftCols(10), theta.values);
  EXPECT_EQ(f.values.rightCols(30), phi.values);
  EXPECT_EQ(f.names[10], phi.names[0]);
}

TEST(Augment, EmptyBlockLeavesOtherUnchanged) {
  oracle::Gen gen(4);
  const FeatureMatrix theta =
      build_polynomial_library(series(gen.matrix(5, 2)), 2);
  FeatureMatrix empty;
  empty.values = Matrix(5, 0);
  const FeatureMatrix f = augment(theta, empty);
  EXPECT_EQ(f.values, theta.values);
  EXPECT_EQ(f.names, theta.names);
}

TEST(Augment, RowMismatchAndDuplicateNames) {
  oracle::Gen gen(5);
  const FeatureMatrix a = build_polynomial_library(series(gen.matrix(5, 1)), 1);
  const FeatureMatrix b = build_polynomial_library(series(gen.matrix(6, 1)), 1);
  EXPECT_THROW(augment(a, b), ContractError);
  EXPECT_THROW(augment(a, a), DuplicateTermError);
}

TEST(BuildLibrary, UsesSpecVariableNames) {
  LibrarySpec spec;
  spec.poly_degree = 1;
  spec.variable_names = {"p", "q"};
  const FeatureMatrix f = build_library(series(Matrix::Ones(3, 2)), spec);
  EXPECT_EQ(f.names, (std::vector<std::string>{"1", "p", "q"}));
  EXPECT_EQ(library_column_names(spec), f.names);
  spec.variable_names = {"p"};
  EXPECT_THROW(build_library(series(Matrix::Ones(3, 2)), spec), ContractError);
}

TEST(BuildLibrary, TimeColumnsIndexIntoFullOrder) {
  LibrarySpec spec;
  spec.poly_degree = 3;
  spec.variable_names = {"x", "v"};
  spec.time_features = TimeFeatureSpec{harmonic_alphas(6)};
  const auto cols = time_columns(spec);
  const auto names = library_column_names(spec);
  ASSERT_EQ(cols.size(), 30u);
  for (const auto& c : cols) {
    EXPECT_EQ(names[static_cast<std::size_t>(c.column)],
              time_feature_name(c.alpha, c.family));
  }
}

TEST(Normalize, ThreeFourFive) {
  FeatureMatrix f;
  f.values = (Matrix(2, 1) << 3, 4).finished();
  f.names = {"c"};
  const FeatureMatrix g = normalize_columns(f);
  EXPECT_NEAR(g.values(0, 0), 0.6, 1e-15);
  EXPECT_NEAR(g.values(1, 0), 0.8, 1e-15);
  ASSERT_TRUE(g.scaling);
  EXPECT_DOUBLE_EQ((*g.scaling)(0), 5.0);
}

TEST(Normalize, UnitColumnUnchanged) {
  FeatureMatrix f;
  f.values = (Matrix(2, 1) << 1, 0).finished();
  f.names = {"c"};
  const FeatureMatrix g = normalize_columns(f);
  EXPECT_EQ(g.values, f.values);
  EXPECT_EQ((*g.scaling)(0), 1.0);
}

TEST(Normalize, RandomColumnsHaveUnitNorm) {
  oracle::Gen gen(6);
  FeatureMatrix f;
  f.values = gen.matrix(100, 12) * 7.0;
  for (int j = 0; j < 12; ++j) f.names.push_back("c" + std::to_string(j));
  const FeatureMatrix g = normalize_columns(f);
  for (Index j = 0; j < 12; ++j) EXPECT_NEAR(g.values.col(j).norm(), 1.0, 1e-12);
}

TEST(Normalize, ZeroColumnNamesTheColumn) {
  FeatureMatrix f;
  f.values = Matrix::Zero(3, 2);
  f.values(0, 0) = 1.0;
  f.names = {"a", "dead"};
  try {
    normalize_columns(f);
    FAIL() << "expected DegenerateColumnError";
  } catch (const DegenerateColumnError& e) {
    EXPECT_NE(std::string(e.what()).find("dead"), std::string::npos);
  }
}

TEST(Unscale, Examples) {
  const Vector xi = (Vector(1) << 10).finished();
  EXPECT_EQ(unscale_coefficients(xi, (Vector(1) << 5).finished())(0), 2.0);
  const Vector v = (Vector(3) << 1, -2, 3).finished();
  EXPECT_EQ(unscale_coefficients(v, Vector::Ones(3)), v);
  EXPECT_THROW(unscale_coefficients(v, Vector::Ones(2)), ContractError);
}

TEST(NormalizeProperty, RoundTripMatchesRawSolve) {
  oracle::Gen gen(7);
  for (int trial = 0; trial < 50; ++trial) {
    FeatureMatrix f;
    const long n = gen.integer(1, 8);
    f.values = gen.matrix(30, n);
    for (long j = 0; j < n; ++j) {
      f.values.col(j) *= std::pow(10.0, gen.uniform(-3, 3));
      f.names.push_back("c" + std::to_string(j));
    }
    const Vector b = gen.vector(30);
    const FeatureMatrix g = normalize_columns(f);
    const Vector scaled = oracle::normal_equations(g.values, b);
    const Vector raw = oracle::normal_equations(f.values, b);
    const Vector back = unscale_coefficients(scaled, *g.scaling);
    EXPECT_LT((back - raw).norm(), 1e-8 * (1.0 + raw.norm()));
  }
}

TEST(NormalizeProperty, ComposesScaling) {
  oracle::Gen gen(8);
  FeatureMatrix f;
  f.values = gen.matrix(10, 3) * 4.0;
  f.names = {"a", "b", "c"};
  const FeatureMatrix once = normalize_columns(f);
  const FeatureMatrix twice = normalize_columns(once);
  EXPECT_LT((*twice.scaling - *once.scaling).norm(), 1e-12);
  EXPECT_LT((twice.values - once.values).norm(), 1e-12);
}
