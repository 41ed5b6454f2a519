#include "sparseid/csv.hpp"

#include "sparseid/errors.hpp"

#include <cmath>
#include <cstdio>

namespace sparseid {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void CsvWriter::raw(std::string_view text) {
  if (!first_) out_ << ',';
  out_ << text;
  first_ = false;
}

CsvWriter& CsvWriter::field(std::string_view text) {
  if (text.find_first_of(",\"\n\r") == std::string_view::npos) {
    raw(text);
    return *this;
  }
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  raw(quoted);
  return *this;
}

CsvWriter& CsvWriter::field(double value) {
  raw(format_double(value));
  return *this;
}

CsvWriter& CsvWriter::row(const std::vector<std::string>& fields) {
  for (const auto& f : fields) field(f);
  end_row();
  return *this;
}

void CsvWriter::end_row() {
  out_ << '\n';
  first_ = true;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot open '" + path.string() + "' for writing");
  }
  return out;
}

void write_timeseries_csv(std::ostream& out, const TimeSeries& x) {
  CsvWriter w(out);
  w.field("t");
  for (const auto& n : x.names()) w.field(n);
  w.end_row();
  for (Index k = 0; k < x.samples(); ++k) {
    w.field(x.time(k));
    for (Index j = 0; j < x.dimension(); ++j) w.field(x.states()(k, j));
    w.end_row();
  }
}

void write_coefficients_csv(std::ostream& out, const CoefficientMatrix& xi,
                            const std::vector<std::string>& equation_names) {
  if (static_cast<Index>(equation_names.size()) != xi.equations()) {
    throw ContractError("one equation name per coefficient row required");
  }
  CsvWriter w(out);
  w.field("equation");
  for (const auto& n : xi.column_names) w.field(n);
  w.end_row();
  for (Index i = 0; i < xi.equations(); ++i) {
    w.field(equation_names[static_cast<std::size_t>(i)]);
    for (Index j = 0; j < xi.terms(); ++j) w.field(xi.values(i, j));
    w.end_row();
  }
}

}  // namespace sparseid
