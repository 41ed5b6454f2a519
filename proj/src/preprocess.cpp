#include "sparseid/preprocess.hpp"

#include "sparseid/errors.hpp"
#include "sparseid/random.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace sparseid {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

double parse_number(std::string_view field, std::size_t line) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = first + field.size();
  if (!field.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc() || ptr != last) {
    throw ParseError("not a number: '" + std::string(field) + "'", line);
  }
  if (!std::isfinite(value)) {
    throw ParseError("non-finite value '" + std::string(field) + "'", line);
  }
  return value;
}

}  // namespace

TimeSeries add_gaussian_noise(const TimeSeries& x, const NoiseSpec& spec) {
  if (!(spec.variance >= 0.0)) {
    throw ContractError("noise variance must be non-negative");
  }
  if (spec.variance == 0.0) return x;
  const CounterRng rng(spec.seed);
  const double sigma = std::sqrt(spec.variance);
  Matrix noisy = x.states();
  const auto dim = static_cast<std::uint64_t>(x.dimension());
  for (Index k = 0; k < noisy.rows(); ++k) {
    for (Index j = 0; j < noisy.cols(); ++j) {
      const auto draw = static_cast<std::uint64_t>(k) * dim +
                        static_cast<std::uint64_t>(j);
      noisy(k, j) += sigma * rng.normal_at(draw);
    }
  }
  return x.with_states(std::move(noisy));
}

DerivativeEstimate finite_difference(const TimeSeries& x, int order) {
  if (order != 1 && order != 2) {
    throw ContractError("finite_difference supports order 1 or 2");
  }
  const Index n = x.samples();
  if (n < 5) {
    throw InsufficientDataError("finite differences need at least 5 samples");
  }
  const Matrix& s = x.states();
  const double h = x.dt();
  DerivativeEstimate d;
  d.order = order;
  d.values.resize(n, x.dimension());
  if (order == 1) {
    d.scheme = "central2";
    d.values.row(0) = (-3.0 * s.row(0) + 4.0 * s.row(1) - s.row(2)) / (2.0 * h);
    for (Index k = 1; k + 1 < n; ++k) {
      d.values.row(k) = (s.row(k + 1) - s.row(k - 1)) / (2.0 * h);
    }
    d.values.row(n - 1) =
        (3.0 * s.row(n - 1) - 4.0 * s.row(n - 2) + s.row(n - 3)) / (2.0 * h);
  } else {
    d.scheme = "central2_second";
    const double h2 = h * h;
    d.values.row(0) =
        (2.0 * s.row(0) - 5.0 * s.row(1) + 4.0 * s.row(2) - s.row(3)) / h2;
    for (Index k = 1; k + 1 < n; ++k) {
      d.values.row(k) = (s.row(k + 1) - 2.0 * s.row(k) + s.row(k - 1)) / h2;
    }
    d.values.row(n - 1) = (2.0 * s.row(n - 1) - 5.0 * s.row(n - 2) +
                           4.0 * s.row(n - 3) - s.row(n - 4)) /
                          h2;
  }
  return d;
}

Vector moving_average_smooth(const Vector& x, std::size_t window,
                             std::size_t passes) {
  if (window < 3 || window % 2 == 0) {
    throw ContractError("moving average window must be odd and at least 3");
  }
  if (passes < 1) {
    throw ContractError("moving average needs at least one pass");
  }
  const Index n = x.size();
  if (static_cast<Index>(window) > n) {
    throw InsufficientDataError("moving average window " +
                                std::to_string(window) +
                                " exceeds series length " + std::to_string(n));
  }
  const Index half = static_cast<Index>(window / 2);
  Vector cur = x;
  Vector prefix(n + 1);
  for (std::size_t p = 0; p < passes; ++p) {
    prefix(0) = 0.0;
    for (Index k = 0; k < n; ++k) prefix(k + 1) = prefix(k) + cur(k);
    Vector next(n);
    for (Index k = 0; k < n; ++k) {
      const Index lo = std::max<Index>(0, k - half);
      const Index hi = std::min<Index>(n - 1, k + half);
      if (lo == k - half && hi == k + half) {
        // Direct sum in the interior keeps every window bit-identical under
        // shifts of the input.
        double sum = 0.0;
        for (Index i = lo; i <= hi; ++i) sum += cur(i);
        next(k) = sum / static_cast<double>(window);
      } else {
        next(k) = (prefix(hi + 1) - prefix(lo)) / static_cast<double>(hi - lo + 1);
      }
    }
    cur = std::move(next);
  }
  return cur;
}

TimeSeries smooth_series(const TimeSeries& x, std::size_t window,
                         std::size_t passes) {
  Matrix out(x.samples(), x.dimension());
  for (Index j = 0; j < x.dimension(); ++j) {
    out.col(j) = moving_average_smooth(x.states().col(j), window, passes);
  }
  return x.with_states(std::move(out));
}

TimeSeries parse_tracking_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> names;
  bool have_header = false;
  while (!have_header && std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    for (auto f : split_fields(line)) names.emplace_back(f);
    have_header = true;
  }
  if (!have_header) {
    throw ParseError("empty input: expected a header row", 0);
  }
  if (names.size() < 2 || names.front() != "t") {
    throw ParseError("header must be 't' followed by at least one channel",
                     line_no);
  }
  for (const auto& n : names) {
    if (n.empty()) throw ParseError("empty column name in header", line_no);
  }

  const std::size_t channels = names.size() - 1;
  std::vector<double> times;
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> row_lines;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != names.size()) {
      throw ParseError("expected " + std::to_string(names.size()) +
                           " fields, found " + std::to_string(fields.size()),
                       line_no);
    }
    times.push_back(parse_number(fields[0], line_no));
    std::vector<double> row(channels);
    for (std::size_t j = 0; j < channels; ++j) {
      row[j] = parse_number(fields[j + 1], line_no);
    }
    rows.push_back(std::move(row));
    row_lines.push_back(line_no);
  }
  if (rows.size() < 2) {
    throw InsufficientDataError("tracking file needs at least 2 data rows");
  }
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) {
      throw InvalidDataError("time column not strictly increasing at line " +
                             std::to_string(row_lines[k]));
    }
  }

  std::vector<double> steps(times.size() - 1);
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    steps[k] = times[k + 1] - times[k];
  }
  std::vector<double> sorted = steps;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2,
                   sorted.end());
  double median = sorted[sorted.size() / 2];
  if (sorted.size() % 2 == 0) {
    const double lower =
        *std::max_element(sorted.begin(), sorted.begin() + sorted.size() / 2);
    median = 0.5 * (median + lower);
  }
  double worst = 0.0;
  for (double s : steps) worst = std::max(worst, std::abs(s - median) / median);

  std::vector<std::string> channel_names(names.begin() + 1, names.end());
  if (worst <= 1e-6) {
    Matrix states(static_cast<Index>(rows.size()), static_cast<Index>(channels));
    for (std::size_t k = 0; k < rows.size(); ++k) {
      for (std::size_t j = 0; j < channels; ++j) {
        states(static_cast<Index>(k), static_cast<Index>(j)) = rows[k][j];
      }
    }
    const double dt = (times.back() - times.front()) /
                      static_cast<double>(times.size() - 1);
    return TimeSeries(times.front(), dt, std::move(states),
                      std::move(channel_names));
  }

  const double t0 = times.front();
  const auto count = static_cast<std::size_t>(
                         std::floor((times.back() - t0) / median + 1e-9)) +
                     1;
  Matrix states(static_cast<Index>(count), static_cast<Index>(channels));
  std::size_t seg = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const double t = std::min(t0 + static_cast<double>(k) * median, times.back());
    while (seg + 2 < times.size() && times[seg + 1] < t) ++seg;
    const double w = (t - times[seg]) / (times[seg + 1] - times[seg]);
    for (std::size_t j = 0; j < channels; ++j) {
      states(static_cast<Index>(k), static_cast<Index>(j)) =
          (1.0 - w) * rows[seg][j] + w * rows[seg + 1][j];
    }
  }
  return TimeSeries(t0, median, std::move(states), std::move(channel_names));
}

TimeSeries load_tracking_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open '" + path.string() + "'", 0);
  }
  return parse_tracking_csv(in);
}

}  // namespace sparseid
