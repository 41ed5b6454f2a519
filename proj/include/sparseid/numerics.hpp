#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace sparseid {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Pivots below this fraction of the largest pivot count as zero.
inline constexpr double kRankTolerance = 1e-12;

/// Sorted set of column indices.
class SupportSet {
 public:
  SupportSet() = default;

  /// Throws ContractError unless `indices` is strictly increasing and
  /// non-negative.
  explicit SupportSet(std::vector<Index> indices);
  SupportSet(std::initializer_list<Index> indices)
      : SupportSet(std::vector<Index>(indices)) {}

  static SupportSet full(Index n);

  const std::vector<Index>& indices() const noexcept { return indices_; }
  std::size_t size() const noexcept { return indices_.size(); }
  bool empty() const noexcept { return indices_.empty(); }
  bool contains(Index j) const noexcept;

  auto begin() const noexcept { return indices_.begin(); }
  auto end() const noexcept { return indices_.end(); }
  Index operator[](std::size_t k) const noexcept { return indices_[k]; }

  /// Throws ContractError if any index is >= `cols`.
  void check_bounds(Index cols) const;

  friend bool operator==(const SupportSet&, const SupportSet&) = default;

 private:
  std::vector<Index> indices_;
};

/// Minimum-norm solution of min ||A x - b||_2 by complete orthogonal
/// decomposition with column pivoting.
Vector least_squares(const Matrix& a, const Vector& b);

/// Least squares over the columns in `support`; zero elsewhere.
/// Throws EmptySupportError when `support` is empty.
Vector restricted_least_squares(const Matrix& a, const Vector& b,
                                const SupportSet& support);

/// Indices of the min(s, n) entries of largest magnitude, ties to the lower
/// index.
SupportSet top_s_support(const Vector& v, std::size_t s);

/// Indices with |v_j| > lambda.
SupportSet lambda_support(const Vector& v, double lambda);

/// A least-squares problem min ||A x - b|| compressed once by a Householder
/// QR of [A b]. Every support-restricted solve and every gradient A^T(b - Ax)
/// is then evaluated on the (n+1)-row triangular factor instead of the m-row
/// data, which is exact in exact arithmetic since Q is orthonormal.
class ReducedLeastSquares {
 public:
  ReducedLeastSquares(const Matrix& a, const Vector& b);

  Index cols() const noexcept { return cols_; }
  double rhs_norm() const noexcept { return rhs_norm_; }

  Vector solve() const;
  Vector restricted_solve(const SupportSet& support) const;

  /// A^T (b - A x).
  Vector correlation(const Vector& x) const;

  /// ||A x - b||_2.
  double residual_norm(const Vector& x) const;

 private:
  Index cols_;
  double rhs_norm_;
  Matrix factor_;  // [R | Q^T b] with the projected residual folded in.
};

/// Throws InvalidDataError if any entry is NaN or infinite.
void require_finite(const Matrix& a, const char* what);
void require_finite(const Vector& v, const char* what);

}  // namespace sparseid
