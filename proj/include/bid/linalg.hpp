#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bid {

/// Row-major dense real matrix.
class DenseMatrix {
public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  std::vector<double> column(std::size_t j) const;
  void set_column(std::size_t j, std::span<const double> values);
  void fill_column(std::size_t j, double value);

  DenseMatrix transpose() const;
  DenseMatrix select_columns(std::span<const std::size_t> idx) const;
  DenseMatrix select_rows(std::span<const std::size_t> idx) const;

  bool operator==(const DenseMatrix&) const = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b);
double frobenius_norm(const DenseMatrix& a);
double max_abs(const DenseMatrix& a);

/// Column-pivoted QR: A[:, perm] = Q R, Q is rows x min(rows, cols) with
/// orthonormal columns, R is min(rows, cols) x cols upper trapezoidal.
struct PivotedQr {
  DenseMatrix q;
  DenseMatrix r;
  std::vector<std::size_t> perm;
};

/// Householder QR with greedy column pivoting (Businger-Golub). Column norms are
/// downdated after every step and recomputed when cancellation makes the
/// downdate unreliable.
PivotedQr cpqr(const DenseMatrix& a);

/// Numerical rank from the pivoted R diagonal, relative to |R[0,0]|.
std::size_t numerical_rank(const PivotedQr& qr, double rel_tol = 1e-12);

/// W minimizing ||A - C W||_F via Householder QR of C. Throws NumericalError
/// carrying the numerical rank when C is rank-deficient.
DenseMatrix solve_least_squares(const DenseMatrix& c, const DenseMatrix& a);

} // namespace bid
