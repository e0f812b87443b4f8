#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "definetti/rational.hpp"

namespace definetti {

/// Dense row-major matrix. Rows index the source of a morphism and columns
/// its target, so composition "f then g" is the product F * G.
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

  static Matrix row_vector(std::span<const T> values) {
    Matrix m(1, values.size());
    for (std::size_t j = 0; j < values.size(); ++j) m(0, j) = values[j];
    return m;
  }

  static Matrix column_vector(std::span<const T> values) {
    Matrix m(values.size(), 1);
    for (std::size_t i = 0; i < values.size(); ++i) m(i, 0) = values[i];
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const T> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::span<T> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }

  std::vector<T> row_copy(std::size_t i) const {
    auto r = row(i);
    return {r.begin(), r.end()};
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Matrix& operator*=(const T& s) {
    for (auto& x : data_) x *= s;
    return *this;
  }

  Matrix& operator+=(const Matrix& other) {
    require_same_shape(other, "addition");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
  }

  Matrix& operator-=(const Matrix& other) {
    require_same_shape(other, "subtraction");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, const T& s) { return a *= s; }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) {
      throw std::invalid_argument("matrix product: inner dimensions " + std::to_string(a.cols_) +
                                  " and " + std::to_string(b.rows_) + " differ");
    }
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T& aik = a(i, k);
        if (aik == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) {
          if (b(k, j) != 0) c(i, j) += aik * b(k, j);
        }
      }
    }
    return c;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  const std::vector<T>& data() const { return data_; }

 private:
  void require_same_shape(const Matrix& other, const char* what) const {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
      throw std::invalid_argument(std::string("matrix ") + what + ": shape mismatch");
    }
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using QMatrix = Matrix<Rational>;

template <class T>
Matrix<T> kronecker(const Matrix<T>& a, const Matrix<T>& b) {
  Matrix<T> k(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (a(i, j) == 0) continue;
      for (std::size_t p = 0; p < b.rows(); ++p)
        for (std::size_t q = 0; q < b.cols(); ++q)
          k(i * b.rows() + p, j * b.cols() + q) = a(i, j) * b(p, q);
    }
  return k;
}

template <class T>
Matrix<T> kronecker_power(const Matrix<T>& a, std::size_t n) {
  Matrix<T> result = Matrix<T>::identity(1);
  for (std::size_t i = 0; i < n; ++i) result = kronecker(result, a);
  return result;
}

/// Largest |a_ij - b_ij|. Shapes must agree.
template <class T>
T max_abs_deviation(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("deviation: shape mismatch (" + std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                                std::to_string(b.cols()) + ")");
  }
  T worst(0);
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    T d = a.data()[i] - b.data()[i];
    if (d < 0) d = -d;
    if (d > worst) worst = d;
  }
  return worst;
}

template <class T>
Matrix<T> diagonal(std::span<const T> values) {
  Matrix<T> d(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) d(i, i) = values[i];
  return d;
}

template <class T>
struct RightFactor {
  Matrix<T> factor;
  T deviation;  // max |factor * E - H|; zero iff H factors through E
};

/// Finds M with M * E = H for E of full row rank, by inverting E on a set of
/// pivot columns and then measuring how far M * E is from H on all columns.
/// Throws std::domain_error if E does not have full row rank.
template <class T>
RightFactor<T> solve_right_factor(const Matrix<T>& h, const Matrix<T>& e) {
  if (h.cols() != e.cols()) throw std::invalid_argument("right factor: column counts differ");
  const std::size_t r = e.rows();
  const std::size_t c = e.cols();

  // Row echelon form of E; its pivot columns give an invertible r x r block.
  std::vector<std::size_t> pivots;
  {
    Matrix<T> work = e;
    std::size_t rank = 0;
    for (std::size_t col = 0; col < c && rank < r; ++col) {
      std::size_t pivot_row = r;
      for (std::size_t i = rank; i < r; ++i) {
        if (work(i, col) != 0) {
          pivot_row = i;
          break;
        }
      }
      if (pivot_row == r) continue;
      if (pivot_row != rank)
        for (std::size_t j = 0; j < c; ++j) std::swap(work(pivot_row, j), work(rank, j));
      for (std::size_t i = rank + 1; i < r; ++i) {
        if (work(i, col) == 0) continue;
        const T f = work(i, col) / work(rank, col);
        for (std::size_t j = col; j < c; ++j) work(i, j) -= f * work(rank, j);
      }
      pivots.push_back(col);
      ++rank;
    }
    if (rank < r) throw std::domain_error("right factor: equaliser matrix is not of full row rank");
  }

  // Solve M * E_J = H_J, i.e. E_J^T * M^T = H_J^T.
  Matrix<T> a(r, r + h.rows());
  for (std::size_t k = 0; k < r; ++k) {
    for (std::size_t i = 0; i < r; ++i) a(k, i) = e(i, pivots[k]);
    for (std::size_t m = 0; m < h.rows(); ++m) a(k, r + m) = h(m, pivots[k]);
  }
  for (std::size_t col = 0; col < r; ++col) {
    std::size_t p = col;
    while (a(p, col) == 0) ++p;
    if (p != col)
      for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a(p, j), a(col, j));
    const T inv = T(1) / a(col, col);
    for (std::size_t j = col; j < a.cols(); ++j) a(col, j) *= inv;
    for (std::size_t i = 0; i < r; ++i) {
      if (i == col || a(i, col) == 0) continue;
      const T f = a(i, col);
      for (std::size_t j = col; j < a.cols(); ++j) a(i, j) -= f * a(col, j);
    }
  }
  Matrix<T> m(h.rows(), r);
  for (std::size_t i = 0; i < h.rows(); ++i)
    for (std::size_t k = 0; k < r; ++k) m(i, k) = a(k, r + i);

  T deviation = max_abs_deviation(m * e, h);
  return {std::move(m), std::move(deviation)};
}

}  // namespace definetti
