#pragma once

#include <cstddef>
#include <exception>
#include <stdexcept>
#include <string>

namespace sparseid {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller broke a documented precondition (shape mismatch, bad argument).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Input data is malformed in value (NaN, non-monotone time, ...).
class InvalidDataError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// Thresholding removed every library column of an equation.
class EmptySupportError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  using Error::Error;
};

class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double last_valid_time)
      : Error(what), last_valid_time_(last_valid_time) {}

  double last_valid_time() const noexcept { return last_valid_time_; }

 private:
  double last_valid_time_;
};

class MissingTermError : public Error {
 public:
  using Error::Error;
};

class LibraryTooLargeError : public Error {
 public:
  using Error::Error;
};

class DuplicateTermError : public Error {
 public:
  using Error::Error;
};

class DegenerateColumnError : public Error {
 public:
  using Error::Error;
};

class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

class NoForcingDetectedError : public Error {
 public:
  using Error::Error;
};

class InsufficientSamplesError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input; `line()` is 1-based, 0 when not line specific.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Fit failure for one equation of a multi-equation system. `cause()` holds
/// the original exception.
class EquationError : public Error {
 public:
  EquationError(std::size_t equation, const std::string& what,
                std::exception_ptr cause = nullptr)
      : Error("equation " + std::to_string(equation) + ": " + what),
        equation_(equation),
        cause_(std::move(cause)) {}

  std::size_t equation() const noexcept { return equation_; }
  const std::exception_ptr& cause() const noexcept { return cause_; }

 private:
  std::size_t equation_;
  std::exception_ptr cause_;
};

}  // namespace sparseid
