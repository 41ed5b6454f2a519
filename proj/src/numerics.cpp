#include "sparseid/numerics.hpp"

#include "sparseid/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace sparseid {

namespace {

Vector cod_solve(const Matrix& a, const Vector& b) {
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod;
  cod.setThreshold(kRankTolerance);
  cod.compute(a);
  return cod.solve(b);
}

Matrix gather_columns(const Matrix& a, const SupportSet& support) {
  Matrix sub(a.rows(), static_cast<Index>(support.size()));
  for (std::size_t k = 0; k < support.size(); ++k) {
    sub.col(static_cast<Index>(k)) = a.col(support[k]);
  }
  return sub;
}

void check_system(const Matrix& a, const Vector& b) {
  if (a.rows() < 1 || a.cols() < 1) {
    throw ContractError("least squares: matrix must be at least 1x1");
  }
  if (b.size() != a.rows()) {
    throw ContractError("least squares: rhs length " +
                        std::to_string(b.size()) + " != rows " +
                        std::to_string(a.rows()));
  }
  require_finite(a, "least squares matrix");
  require_finite(b, "least squares rhs");
}

}  // namespace

SupportSet::SupportSet(std::vector<Index> indices)
    : indices_(std::move(indices)) {
  for (std::size_t k = 0; k < indices_.size(); ++k) {
    if (indices_[k] < 0) {
      throw ContractError("support index must be non-negative");
    }
    if (k > 0 && indices_[k] <= indices_[k - 1]) {
      throw ContractError("support indices must be strictly increasing");
    }
  }
}

SupportSet SupportSet::full(Index n) {
  std::vector<Index> all(static_cast<std::size_t>(std::max<Index>(n, 0)));
  std::iota(all.begin(), all.end(), Index{0});
  return SupportSet(std::move(all));
}

bool SupportSet::contains(Index j) const noexcept {
  return std::binary_search(indices_.begin(), indices_.end(), j);
}

void SupportSet::check_bounds(Index cols) const {
  if (!indices_.empty() && indices_.back() >= cols) {
    throw ContractError("support index " + std::to_string(indices_.back()) +
                        " out of range for " + std::to_string(cols) +
                        " columns");
  }
}

void require_finite(const Matrix& a, const char* what) {
  if (!a.allFinite()) {
    throw InvalidDataError(std::string(what) + " contains non-finite values");
  }
}

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) {
    throw InvalidDataError(std::string(what) + " contains non-finite values");
  }
}

Vector least_squares(const Matrix& a, const Vector& b) {
  check_system(a, b);
  return cod_solve(a, b);
}

Vector restricted_least_squares(const Matrix& a, const Vector& b,
                                const SupportSet& support) {
  check_system(a, b);
  if (support.empty()) {
    throw EmptySupportError("restricted least squares on an empty support");
  }
  support.check_bounds(a.cols());
  const Vector sub = cod_solve(gather_columns(a, support), b);
  Vector x = Vector::Zero(a.cols());
  for (std::size_t k = 0; k < support.size(); ++k) {
    x(support[k]) = sub(static_cast<Index>(k));
  }
  return x;
}

SupportSet top_s_support(const Vector& v, std::size_t s) {
  if (s < 1) {
    throw ContractError("top_s_support: s must be at least 1");
  }
  const auto n = static_cast<std::size_t>(v.size());
  const std::size_t keep = std::min(s, n);
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  // Larger magnitude first; equal magnitudes keep the lower index first.
  std::partial_sort(order.begin(), order.begin() + static_cast<long>(keep),
                    order.end(), [&v](Index i, Index j) {
                      const double ai = std::abs(v(i));
                      const double aj = std::abs(v(j));
                      return ai > aj || (ai == aj && i < j);
                    });
  order.resize(keep);
  std::sort(order.begin(), order.end());
  return SupportSet(std::move(order));
}

SupportSet lambda_support(const Vector& v, double lambda) {
  if (!(lambda >= 0.0)) {
    throw ContractError("lambda_support: lambda must be non-negative");
  }
  std::vector<Index> kept;
  for (Index j = 0; j < v.size(); ++j) {
    if (std::abs(v(j)) > lambda) kept.push_back(j);
  }
  return SupportSet(std::move(kept));
}

ReducedLeastSquares::ReducedLeastSquares(const Matrix& a, const Vector& b)
    : cols_(a.cols()), rhs_norm_(0.0) {
  check_system(a, b);
  rhs_norm_ = b.norm();
  Matrix augmented(a.rows(), a.cols() + 1);
  augmented << a, b;
  const Index width = augmented.cols();
  if (augmented.rows() <= width) {
    factor_ = std::move(augmented);
    return;
  }
  Eigen::HouseholderQR<Matrix> qr(augmented);
  factor_ = qr.matrixQR().topRows(width).triangularView<Eigen::Upper>();
}

Vector ReducedLeastSquares::solve() const {
  return cod_solve(factor_.leftCols(cols_), factor_.col(cols_));
}

Vector ReducedLeastSquares::restricted_solve(const SupportSet& support) const {
  if (support.empty()) {
    throw EmptySupportError("restricted least squares on an empty support");
  }
  support.check_bounds(cols_);
  const Vector sub = cod_solve(gather_columns(factor_, support),
                               factor_.col(cols_));
  Vector x = Vector::Zero(cols_);
  for (std::size_t k = 0; k < support.size(); ++k) {
    x(support[k]) = sub(static_cast<Index>(k));
  }
  return x;
}

Vector ReducedLeastSquares::correlation(const Vector& x) const {
  const auto r = factor_.leftCols(cols_);
  return r.transpose() * (factor_.col(cols_) - r * x);
}

double ReducedLeastSquares::residual_norm(const Vector& x) const {
  return (factor_.leftCols(cols_) * x - factor_.col(cols_)).norm();
}

}  // namespace sparseid
