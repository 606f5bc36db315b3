#ifndef EOW_SERIES_MATRIX_HPP
#define EOW_SERIES_MATRIX_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include "eow/error.hpp"
#include "eow/series/scalar.hpp"

namespace eow {

/// Row-major dense matrix for the small exact/float blocks that show up in
/// frames and quadratic forms.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, const T& fill = T(0))
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw PreconditionError("matrix dimension mismatch");
    Matrix r(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T& aik = a(i, k);
        if (aik == T(0)) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) r(i, j) += aik * b(k, j);
      }
    return r;
  }

  friend std::vector<T> operator*(const Matrix& a, const std::vector<T>& v) {
    if (a.cols_ != v.size()) throw PreconditionError("matrix/vector dimension mismatch");
    std::vector<T> r(a.rows_, T(0));
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) r[i] += a(i, k) * v[k];
    return r;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  std::vector<T> column(std::size_t c) const {
    std::vector<T> v(rows_);
    for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
    return v;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<T> data_;
};

using QMatrix = Matrix<Scalar>;
using DMatrix = Matrix<double>;

inline DMatrix to_double(const QMatrix& m) {
  DMatrix d(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) d(r, c) = to_double(m(r, c));
  return d;
}

/// Exact determinant by Gaussian elimination over Q.
inline Scalar determinant(QMatrix a) {
  const std::size_t n = a.rows();
  if (n != a.cols()) throw PreconditionError("determinant of non-square matrix");
  Scalar det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a(p, c) == 0) ++p;
    if (p == n) return Scalar(0);
    if (p != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(p, j), a(c, j));
      det = -det;
    }
    det *= a(c, c);
    for (std::size_t r = c + 1; r < n; ++r) {
      if (a(r, c) == 0) continue;
      Scalar f = a(r, c) / a(c, c);
      for (std::size_t j = c; j < n; ++j) a(r, j) -= f * a(c, j);
    }
  }
  return det;
}

/// Exact inverse; nullopt when singular.
inline std::optional<QMatrix> inverse(const QMatrix& m) {
  const std::size_t n = m.rows();
  if (n != m.cols()) throw PreconditionError("inverse of non-square matrix");
  QMatrix a = m, inv = QMatrix::identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a(p, c) == 0) ++p;
    if (p == n) return std::nullopt;
    if (p != c)
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a(p, j), a(c, j));
        std::swap(inv(p, j), inv(c, j));
      }
    Scalar piv = a(c, c);
    for (std::size_t j = 0; j < n; ++j) {
      a(c, j) /= piv;
      inv(c, j) /= piv;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a(r, c) == 0) continue;
      Scalar f = a(r, c);
      for (std::size_t j = 0; j < n; ++j) {
        a(r, j) -= f * a(c, j);
        inv(r, j) -= f * inv(c, j);
      }
    }
  }
  return inv;
}

/// Exact solution of the (possibly overdetermined, consistent) system A x = b;
/// nullopt if inconsistent or underdetermined.
inline std::optional<std::vector<Scalar>> solve_exact(const QMatrix& A, const std::vector<Scalar>& b) {
  const std::size_t m = A.rows(), n = A.cols();
  QMatrix a(m, n + 1);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < n; ++c) a(r, c) = A(r, c);
    a(r, n) = b[r];
  }
  std::vector<std::size_t> pivcol;
  std::size_t row = 0;
  for (std::size_t c = 0; c < n && row < m; ++c) {
    std::size_t p = row;
    while (p < m && a(p, c) == 0) ++p;
    if (p == m) continue;
    for (std::size_t j = 0; j <= n; ++j) std::swap(a(p, j), a(row, j));
    Scalar piv = a(row, c);
    for (std::size_t j = 0; j <= n; ++j) a(row, j) /= piv;
    for (std::size_t r = 0; r < m; ++r) {
      if (r == row || a(r, c) == 0) continue;
      Scalar f = a(r, c);
      for (std::size_t j = 0; j <= n; ++j) a(r, j) -= f * a(row, j);
    }
    pivcol.push_back(c);
    ++row;
  }
  if (pivcol.size() != n) return std::nullopt;
  for (std::size_t r = row; r < m; ++r)
    if (a(r, n) != 0) return std::nullopt;
  std::vector<Scalar> x(n);
  for (std::size_t i = 0; i < n; ++i) x[pivcol[i]] = a(i, n);
  return x;
}

inline Scalar dot(const std::vector<Scalar>& a, const std::vector<Scalar>& b) {
  Scalar s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace eow

#endif  // EOW_SERIES_MATRIX_HPP
