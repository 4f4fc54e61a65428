#include "bid/linalg.hpp"

#include "bid/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

namespace bid {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw InputError("matrix data length " + std::to_string(data_.size()) + " does not match " +
                     std::to_string(rows_) + "x" + std::to_string(cols_));
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::vector<double> DenseMatrix::column(std::size_t j) const {
  std::vector<double> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

void DenseMatrix::set_column(std::size_t j, std::span<const double> values) {
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = values[i];
}

void DenseMatrix::fill_column(std::size_t j, double value) {
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = value;
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

DenseMatrix DenseMatrix::select_columns(std::span<const std::size_t> idx) const {
  DenseMatrix out(rows_, idx.size());
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t c = 0; c < idx.size(); ++c) out(i, c) = (*this)(i, idx[c]);
  return out;
}

DenseMatrix DenseMatrix::select_rows(std::span<const std::size_t> idx) const {
  DenseMatrix out(idx.size(), cols_);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    auto src = row(idx[r]);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw InputError("multiply: shape mismatch " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " * " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()));
  }
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      auto brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) out[j] += aik * brow[j];
    }
  }
  return c;
}

DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw InputError("subtract: shape mismatch");
  DenseMatrix c = a;
  auto out = c.data();
  auto rhs = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= rhs[i];
  return c;
}

double frobenius_norm(const DenseMatrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

double max_abs(const DenseMatrix& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

namespace {

double tail_norm(const DenseMatrix& w, std::size_t j, std::size_t from) {
  double s = 0.0;
  for (std::size_t i = from; i < w.rows(); ++i) s += w(i, j) * w(i, j);
  return std::sqrt(s);
}

void swap_columns(DenseMatrix& w, std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t i = 0; i < w.rows(); ++i) std::swap(w(i, a), w(i, b));
}

} // namespace

PivotedQr cpqr(const DenseMatrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (m == 0 || n == 0) throw InputError("cpqr: empty matrix");
  const std::size_t p = std::min(m, n);
  const double tol3z = std::sqrt(std::numeric_limits<double>::epsilon());

  DenseMatrix w = a;
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<double> norms(n);
  for (std::size_t j = 0; j < n; ++j) norms[j] = tail_norm(w, j, 0);
  std::vector<double> ref_norms = norms;

  std::vector<std::vector<double>> reflectors(p);
  std::vector<double> betas(p, 0.0);

  for (std::size_t k = 0; k < p; ++k) {
    const std::size_t piv =
        k + static_cast<std::size_t>(std::max_element(norms.begin() + k, norms.end()) -
                                     (norms.begin() + k));
    if (piv != k) {
      swap_columns(w, k, piv);
      std::swap(perm[k], perm[piv]);
      std::swap(norms[k], norms[piv]);
      std::swap(ref_norms[k], ref_norms[piv]);
    }

    std::vector<double>& v = reflectors[k];
    v.assign(m - k, 0.0);
    for (std::size_t i = k; i < m; ++i) v[i - k] = w(i, k);
    const double xnorm = tail_norm(w, k, k);
    if (xnorm > 0.0) {
      const double alpha = v[0] > 0.0 ? -xnorm : xnorm;
      v[0] -= alpha;
      double vtv = 0.0;
      for (double e : v) vtv += e * e;
      betas[k] = vtv > 0.0 ? 2.0 / vtv : 0.0;
      for (std::size_t j = k + 1; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = k; i < m; ++i) s += v[i - k] * w(i, j);
        s *= betas[k];
        for (std::size_t i = k; i < m; ++i) w(i, j) -= s * v[i - k];
      }
      w(k, k) = alpha;
      for (std::size_t i = k + 1; i < m; ++i) w(i, k) = 0.0;
    }

    // Norm downdating for the remaining columns.
    for (std::size_t j = k + 1; j < n; ++j) {
      if (norms[j] == 0.0) continue;
      double t = std::abs(w(k, j)) / norms[j];
      t = std::max(0.0, (1.0 + t) * (1.0 - t));
      const double ratio = norms[j] / ref_norms[j];
      if (t * ratio * ratio <= tol3z) {
        norms[j] = tail_norm(w, j, k + 1);
        ref_norms[j] = norms[j];
      } else {
        norms[j] *= std::sqrt(t);
      }
    }
  }

  PivotedQr out;
  out.r = DenseMatrix(p, n);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i; j < n; ++j) out.r(i, j) = w(i, j);

  out.q = DenseMatrix(m, p);
  for (std::size_t i = 0; i < p; ++i) out.q(i, i) = 1.0;
  for (std::size_t kk = p; kk-- > 0;) {
    if (betas[kk] == 0.0) continue;
    const auto& v = reflectors[kk];
    for (std::size_t j = 0; j < p; ++j) {
      double s = 0.0;
      for (std::size_t i = kk; i < m; ++i) s += v[i - kk] * out.q(i, j);
      s *= betas[kk];
      for (std::size_t i = kk; i < m; ++i) out.q(i, j) -= s * v[i - kk];
    }
  }
  out.perm = std::move(perm);
  return out;
}

std::size_t numerical_rank(const PivotedQr& qr, double rel_tol) {
  const std::size_t p = std::min(qr.r.rows(), qr.r.cols());
  if (p == 0) return 0;
  const double r00 = std::abs(qr.r(0, 0));
  if (r00 == 0.0) return 0;
  std::size_t rank = 0;
  for (std::size_t i = 0; i < p; ++i)
    if (std::abs(qr.r(i, i)) > rel_tol * r00) ++rank;
  return rank;
}

DenseMatrix solve_least_squares(const DenseMatrix& c, const DenseMatrix& a) {
  if (c.rows() != a.rows()) {
    throw InputError("least squares: C has " + std::to_string(c.rows()) + " rows, A has " +
                     std::to_string(a.rows()));
  }
  const std::size_t k = c.cols();
  if (k == 0 || c.rows() < k) {
    throw NumericalError("least squares: C (" + std::to_string(c.rows()) + "x" +
                         std::to_string(k) + ") cannot have full column rank; numerical rank " +
                         std::to_string(std::min(c.rows(), k)));
  }
  const PivotedQr qr = cpqr(c);
  const std::size_t rank = numerical_rank(qr, 1e-11);
  if (rank < k) {
    throw NumericalError("least squares: C is rank-deficient, numerical rank " +
                         std::to_string(rank) + " < " + std::to_string(k));
  }

  // Z = Q^T A (k x n), then back-substitute R Z' = Z, and undo the pivoting.
  const DenseMatrix z = multiply(qr.q.transpose(), a);
  DenseMatrix zp(k, a.cols());
  for (std::size_t col = 0; col < a.cols(); ++col) {
    for (std::size_t i = k; i-- > 0;) {
      double s = z(i, col);
      for (std::size_t j = i + 1; j < k; ++j) s -= qr.r(i, j) * zp(j, col);
      zp(i, col) = s / qr.r(i, i);
    }
  }
  DenseMatrix w(k, a.cols());
  for (std::size_t i = 0; i < k; ++i) {
    auto src = zp.row(i);
    std::copy(src.begin(), src.end(), w.row(qr.perm[i]).begin());
  }
  return w;
}

} // namespace bid
