#include "sparseid/library.hpp"

#include "sparseid/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>
#include <string>
#include <unordered_set>

namespace sparseid {

namespace {

constexpr TimeFamily kAllFamilies[] = {
    TimeFamily::kSin,  TimeFamily::kCos,   TimeFamily::kTCos,
    TimeFamily::kTSin, TimeFamily::kT2Sin, TimeFamily::kT2Cos};

// Exponent vectors summing to `remaining` over variables [var, n), with the
// earliest variable taking the largest power first.
void enumerate_degree(std::size_t var, int remaining, std::vector<int>& current,
                      std::vector<std::vector<int>>& out) {
  const std::size_t n = current.size();
  if (var + 1 == n) {
    current[var] = remaining;
    out.push_back(current);
    current[var] = 0;
    return;
  }
  for (int p = remaining; p >= 0; --p) {
    current[var] = p;
    enumerate_degree(var + 1, remaining - p, current, out);
  }
  current[var] = 0;
}

double time_feature_value(double t, double alpha, TimeFamily family) {
  switch (family) {
    case TimeFamily::kSin:
      return std::sin(alpha * t);
    case TimeFamily::kCos:
      return std::cos(alpha * t);
    case TimeFamily::kTCos:
      return t * std::cos(alpha * t);
    case TimeFamily::kTSin:
      return t * std::sin(alpha * t);
    case TimeFamily::kT2Sin:
      return t * t * std::sin(alpha * t);
    case TimeFamily::kT2Cos:
      return t * t * std::cos(alpha * t);
  }
  return 0.0;
}

}  // namespace

std::string_view family_name(TimeFamily family) {
  switch (family) {
    case TimeFamily::kSin:
      return "sin";
    case TimeFamily::kCos:
      return "cos";
    case TimeFamily::kTCos:
      return "t*cos";
    case TimeFamily::kTSin:
      return "t*sin";
    case TimeFamily::kT2Sin:
      return "t^2*sin";
    case TimeFamily::kT2Cos:
      return "t^2*cos";
  }
  return "?";
}

TimeFamily parse_time_family(std::string_view name) {
  for (TimeFamily f : kAllFamilies) {
    if (family_name(f) == name) return f;
  }
  throw ContractError("unknown time feature family '" + std::string(name) +
                      "'");
}

std::vector<TimeFamily> default_forcing_families() {
  return {TimeFamily::kSin, TimeFamily::kCos, TimeFamily::kTCos,
          TimeFamily::kTSin, TimeFamily::kT2Sin};
}

std::vector<double> harmonic_alphas(std::size_t count) {
  std::vector<double> alphas;
  for (std::size_t i = 1; i <= count; ++i) {
    alphas.push_back(std::numbers::pi / static_cast<double>(i));
  }
  return alphas;
}

void LibrarySpec::validate() const {
  if (!time_features) return;
  const auto& tf = *time_features;
  if (tf.alphas.empty() || tf.families.empty()) {
    throw ContractError("time library needs at least one alpha and family");
  }
  std::set<double> seen_alpha;
  for (double a : tf.alphas) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      throw ContractError("time library alphas must be positive and finite");
    }
    if (!seen_alpha.insert(a).second) {
      throw ContractError("duplicate time library alpha");
    }
  }
  std::set<TimeFamily> seen_family;
  for (TimeFamily f : tf.families) {
    if (!seen_family.insert(f).second) {
      throw ContractError("duplicate time library family '" +
                          std::string(family_name(f)) + "'");
    }
  }
}

std::optional<Index> FeatureMatrix::column_index(std::string_view name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return std::nullopt;
  return static_cast<Index>(it - names.begin());
}

std::size_t polynomial_column_count(std::size_t variables, std::size_t degree,
                                    bool include_constant) {
  // C(n + d, d), saturating well above the library cap.
  double count = 1.0;
  for (std::size_t k = 1; k <= degree; ++k) {
    count = count * static_cast<double>(variables + k) / static_cast<double>(k);
    if (count > 1e15) break;
  }
  const double total = std::round(count) - (include_constant ? 0.0 : 1.0);
  return total > 1e15 ? static_cast<std::size_t>(1e15)
                      : static_cast<std::size_t>(total);
}

std::vector<std::vector<int>> monomial_exponents(std::size_t variables,
                                                 std::size_t degree,
                                                 bool include_constant) {
  std::vector<std::vector<int>> out;
  if (variables == 0) {
    if (include_constant) out.emplace_back();
    return out;
  }
  std::vector<int> current(variables, 0);
  for (std::size_t d = include_constant ? 0 : 1; d <= degree; ++d) {
    enumerate_degree(0, static_cast<int>(d), current, out);
  }
  return out;
}

std::string monomial_name(const std::vector<int>& exponents,
                          const std::vector<std::string>& variables) {
  std::string name;
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    if (exponents[i] == 0) continue;
    if (!name.empty()) name += '*';
    name += variables.at(i);
    if (exponents[i] > 1) name += '^' + std::to_string(exponents[i]);
  }
  return name.empty() ? "1" : name;
}

std::string time_feature_name(double alpha, TimeFamily family) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", alpha);
  std::string prefix;
  std::string fn;
  switch (family) {
    case TimeFamily::kSin:
      fn = "sin";
      break;
    case TimeFamily::kCos:
      fn = "cos";
      break;
    case TimeFamily::kTCos:
      prefix = "t*";
      fn = "cos";
      break;
    case TimeFamily::kTSin:
      prefix = "t*";
      fn = "sin";
      break;
    case TimeFamily::kT2Sin:
      prefix = "t^2*";
      fn = "sin";
      break;
    case TimeFamily::kT2Cos:
      prefix = "t^2*";
      fn = "cos";
      break;
  }
  return prefix + fn + "(" + buf + "*t)";
}

std::vector<std::string> library_column_names(const LibrarySpec& spec) {
  spec.validate();
  std::vector<std::string> names;
  for (const auto& e :
       monomial_exponents(spec.variable_names.size(), spec.poly_degree,
                          spec.include_constant)) {
    names.push_back(monomial_name(e, spec.variable_names));
  }
  for (const auto& tc : time_columns(spec)) {
    names.push_back(time_feature_name(tc.alpha, tc.family));
  }
  return names;
}

std::vector<TimeColumn> time_columns(const LibrarySpec& spec) {
  std::vector<TimeColumn> out;
  if (!spec.time_features) return out;
  auto column = static_cast<Index>(polynomial_column_count(
      spec.variable_names.size(), spec.poly_degree, spec.include_constant));
  for (TimeFamily f : spec.time_features->families) {
    for (double a : spec.time_features->alphas) {
      out.push_back({column++, a, f});
    }
  }
  return out;
}

FeatureMatrix build_polynomial_library(const TimeSeries& x, std::size_t degree,
                                       bool include_constant) {
  const auto n = static_cast<std::size_t>(x.dimension());
  const std::size_t count = polynomial_column_count(n, degree, include_constant);
  if (count > kMaxLibraryColumns) {
    throw LibraryTooLargeError("polynomial library would have " +
                               std::to_string(count) + " columns (cap " +
                               std::to_string(kMaxLibraryColumns) + ")");
  }
  const auto exponents = monomial_exponents(n, degree, include_constant);
  const Matrix& s = x.states();

  FeatureMatrix f;
  f.values.resize(s.rows(), static_cast<Index>(exponents.size()));
  for (std::size_t c = 0; c < exponents.size(); ++c) {
    const auto& e = exponents[c];
    auto col = f.values.col(static_cast<Index>(c));
    col.setOnes();
    for (std::size_t v = 0; v < n; ++v) {
      for (int p = 0; p < e[v]; ++p) {
        col.array() *= s.col(static_cast<Index>(v)).array();
      }
    }
    f.names.push_back(monomial_name(e, x.names()));
  }
  return f;
}

FeatureMatrix build_time_library(const Vector& times,
                                 const TimeFeatureSpec& spec) {
  LibrarySpec check;
  check.time_features = spec;
  check.validate();

  FeatureMatrix f;
  f.values.resize(times.size(),
                  static_cast<Index>(spec.alphas.size() * spec.families.size()));
  Index c = 0;
  for (TimeFamily fam : spec.families) {
    for (double a : spec.alphas) {
      for (Index k = 0; k < times.size(); ++k) {
        f.values(k, c) = time_feature_value(times(k), a, fam);
      }
      f.names.push_back(time_feature_name(a, fam));
      ++c;
    }
  }
  return f;
}

FeatureMatrix augment(const FeatureMatrix& theta, const FeatureMatrix& phi) {
  if (phi.cols() == 0) return theta;
  if (theta.cols() == 0) return phi;
  if (theta.rows() != phi.rows()) {
    throw ContractError("augment: row counts differ (" +
                        std::to_string(theta.rows()) + " vs " +
                        std::to_string(phi.rows()) + ")");
  }
  std::unordered_set<std::string> seen(theta.names.begin(), theta.names.end());
  for (const auto& name : phi.names) {
    if (seen.count(name)) {
      throw DuplicateTermError("augment: duplicate term '" + name + "'");
    }
  }
  FeatureMatrix out;
  out.values.resize(theta.rows(), theta.cols() + phi.cols());
  out.values << theta.values, phi.values;
  out.names = theta.names;
  out.names.insert(out.names.end(), phi.names.begin(), phi.names.end());
  if (theta.scaling || phi.scaling) {
    Vector s(out.cols());
    s << (theta.scaling ? *theta.scaling : Vector::Ones(theta.cols())),
        (phi.scaling ? *phi.scaling : Vector::Ones(phi.cols()));
    out.scaling = s;
  }
  return out;
}

FeatureMatrix build_library(const TimeSeries& x, const LibrarySpec& spec) {
  spec.validate();
  const TimeSeries* source = &x;
  std::optional<TimeSeries> renamed;
  if (!spec.variable_names.empty()) {
    if (static_cast<Index>(spec.variable_names.size()) != x.dimension()) {
      throw ContractError("library has " +
                          std::to_string(spec.variable_names.size()) +
                          " variable names for a " +
                          std::to_string(x.dimension()) + "-channel series");
    }
    renamed.emplace(x.t0(), x.dt(), x.states(), spec.variable_names);
    source = &*renamed;
  }
  FeatureMatrix theta =
      build_polynomial_library(*source, spec.poly_degree, spec.include_constant);
  if (!spec.time_features) return theta;
  return augment(theta, build_time_library(x.times(), *spec.time_features));
}

FeatureMatrix normalize_columns(const FeatureMatrix& f) {
  FeatureMatrix out = f;
  Vector scale = f.scaling ? *f.scaling : Vector::Ones(f.cols());
  for (Index j = 0; j < f.cols(); ++j) {
    const double norm = f.values.col(j).norm();
    if (norm == 0.0) {
      throw DegenerateColumnError("cannot normalize all-zero column '" +
                                  f.names.at(static_cast<std::size_t>(j)) +
                                  "'");
    }
    out.values.col(j) /= norm;
    scale(j) *= norm;
  }
  out.scaling = scale;
  return out;
}

Vector unscale_coefficients(const Vector& xi, const Vector& scaling) {
  if (xi.size() != scaling.size()) {
    throw ContractError("unscale_coefficients: length mismatch");
  }
  return xi.array() / scaling.array();
}

}  // namespace sparseid
