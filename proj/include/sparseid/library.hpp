#pragma once

#include "sparseid/numerics.hpp"
#include "sparseid/timeseries.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sparseid {

inline constexpr std::size_t kMaxLibraryColumns = 10000;

/// Time-dependent forcing feature shapes, evaluated at angular frequency a.
enum class TimeFamily {
  kSin,     // sin(a t)
  kCos,     // cos(a t)
  kTCos,    // t cos(a t)
  kTSin,    // t sin(a t)
  kT2Sin,   // t^2 sin(a t)
  kT2Cos,   // t^2 cos(a t)
};

std::string_view family_name(TimeFamily family);
/// Accepts the names produced by family_name ("sin", "t*cos", "t^2*sin", ...).
TimeFamily parse_time_family(std::string_view name);

/// sin, cos, t*cos, t*sin, t^2*sin.
std::vector<TimeFamily> default_forcing_families();

/// pi / i for i = 1..count.
std::vector<double> harmonic_alphas(std::size_t count);

struct TimeFeatureSpec {
  std::vector<double> alphas;
  std::vector<TimeFamily> families = default_forcing_families();
};

struct LibrarySpec {
  std::size_t poly_degree = 2;
  std::vector<std::string> variable_names;
  std::optional<TimeFeatureSpec> time_features;
  bool include_constant = true;

  /// Throws ContractError on non-positive alphas, duplicate alphas or
  /// families, or an empty time feature list.
  void validate() const;
};

/// Evaluated candidate functions: one named column per library term.
/// When `scaling` is present, column j equals the raw column divided by
/// scaling(j).
struct FeatureMatrix {
  Matrix values;
  std::vector<std::string> names;
  std::optional<Vector> scaling;

  Index rows() const noexcept { return values.rows(); }
  Index cols() const noexcept { return values.cols(); }
  std::optional<Index> column_index(std::string_view name) const;
};

/// Exponent vectors of every monomial of total degree <= degree in
/// `variables` unknowns, graded then lexicographic (x^2 before x*y).
std::vector<std::vector<int>> monomial_exponents(std::size_t variables,
                                                 std::size_t degree,
                                                 bool include_constant);

/// "1", "x", "x^2*y", ...
std::string monomial_name(const std::vector<int>& exponents,
                          const std::vector<std::string>& variables);

/// "sin(a*t)", "t*cos(a*t)", "t^2*sin(a*t)" with a at 17 significant digits.
std::string time_feature_name(double alpha, TimeFamily family);

std::size_t polynomial_column_count(std::size_t variables, std::size_t degree,
                                    bool include_constant);

/// Column names in the order build_library produces them.
std::vector<std::string> library_column_names(const LibrarySpec& spec);

struct TimeColumn {
  Index column;
  double alpha;
  TimeFamily family;
};

/// Time-feature columns of the library described by `spec`, with their
/// positions in the full (polynomial + time) column order.
std::vector<TimeColumn> time_columns(const LibrarySpec& spec);

FeatureMatrix build_polynomial_library(const TimeSeries& x, std::size_t degree,
                                       bool include_constant = true);

/// Columns are family-major: every alpha for the first family, then the
/// next family.
FeatureMatrix build_time_library(const Vector& times,
                                 const TimeFeatureSpec& spec);

/// Column-wise concatenation. Throws ContractError on row mismatch and
/// DuplicateTermError on a shared column name.
FeatureMatrix augment(const FeatureMatrix& theta, const FeatureMatrix& phi);

/// Polynomial library in the spec's variables, augmented with the time
/// library when one is configured.
FeatureMatrix build_library(const TimeSeries& x, const LibrarySpec& spec);

/// Scales each column to unit l2 norm and records the factors.
/// Throws DegenerateColumnError on an all-zero column.
FeatureMatrix normalize_columns(const FeatureMatrix& f);

/// Maps coefficients fitted on a scaled library back to raw columns.
Vector unscale_coefficients(const Vector& xi, const Vector& scaling);

}  // namespace sparseid
