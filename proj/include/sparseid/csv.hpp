#pragma once

#include "sparseid/timeseries.hpp"

#include <concepts>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace sparseid {

/// 17 significant digits ("%.17g"); "nan", "inf", "-inf" otherwise.
std::string format_double(double value);

/// Row-at-a-time CSV output. Fields holding a comma, quote or line break
/// are quoted.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  CsvWriter& field(std::string_view text);
  CsvWriter& field(const char* text) { return field(std::string_view(text)); }
  CsvWriter& field(const std::string& text) {
    return field(std::string_view(text));
  }
  CsvWriter& field(double value);
  template <std::integral T>
  CsvWriter& field(T value) {
    raw(std::to_string(value));
    return *this;
  }

  CsvWriter& row(const std::vector<std::string>& fields);
  void end_row();

 private:
  void raw(std::string_view text);

  std::ostream& out_;
  bool first_ = true;
};

/// Opens `path` for writing, creating parent directories. Throws Error.
std::ofstream open_output(const std::filesystem::path& path);

/// Header "t,<names...>", one row per sample.
void write_timeseries_csv(std::ostream& out, const TimeSeries& x);

/// Header "equation,<terms...>", one row per equation.
void write_coefficients_csv(std::ostream& out, const CoefficientMatrix& xi,
                            const std::vector<std::string>& equation_names);

}  // namespace sparseid
