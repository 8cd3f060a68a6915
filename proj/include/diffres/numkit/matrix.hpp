/*
 * Copyright (C) 2026 The diffres Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef DIFFRES_NUMKIT_MATRIX_HPP
#define DIFFRES_NUMKIT_MATRIX_HPP

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "diffres/autodiff/dual.hpp"
#include "diffres/error.hpp"

namespace diffres {

/// Dense row-major matrix over a scalar field (double or Dual).
template <class S> class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, const S &fill = S(0.0))
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<S> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_)
      throw Error(ErrorCode::DimensionMismatch, "matrix data length != rows*cols");
  }
  Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto &r : rows) {
      if (r.size() != cols_)
        throw Error(ErrorCode::DimensionMismatch, "ragged matrix literal");
      for (double v : r)
        data_.push_back(S(v));
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      m(i, i) = S(1.0);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  S &operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const S &operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<S> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const S> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::vector<S> &data() { return data_; }
  const std::vector<S> &data() const { return data_; }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        t(j, i) = (*this)(i, j);
    return t;
  }

  Matrix &operator+=(const Matrix &o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k)
      data_[k] += o.data_[k];
    return *this;
  }
  Matrix &operator-=(const Matrix &o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k)
      data_[k] -= o.data_[k];
    return *this;
  }
  Matrix &operator*=(const S &a) {
    for (auto &x : data_)
      x *= a;
    return *this;
  }

private:
  void check_same(const Matrix &o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw Error(ErrorCode::DimensionMismatch, "matrix shapes differ");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<S> data_;
};

template <class S> Matrix<S> operator+(Matrix<S> a, const Matrix<S> &b) { return a += b; }
template <class S> Matrix<S> operator-(Matrix<S> a, const Matrix<S> &b) { return a -= b; }
template <class S> Matrix<S> operator*(Matrix<S> a, const S &s) { return a *= s; }

template <class A, class B> auto matmul(const Matrix<A> &a, const Matrix<B> &b) {
  using R = decltype(A() * B());
  if (a.cols() != b.rows())
    throw Error(ErrorCode::DimensionMismatch, "matmul inner dimensions differ");
  Matrix<R> c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const A &aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j)
        c(i, j) += aik * b(k, j);
    }
  return c;
}

template <class A, class B> auto matvec(const Matrix<A> &a, std::span<const B> x) {
  using R = decltype(A() * B());
  if (a.cols() != x.size())
    throw Error(ErrorCode::DimensionMismatch, "matvec dimensions differ");
  std::vector<R> y(a.rows(), R(0.0));
  for (std::size_t i = 0; i < a.rows(); ++i) {
    R acc(0.0);
    for (std::size_t j = 0; j < a.cols(); ++j)
      acc += a(i, j) * x[j];
    y[i] = acc;
  }
  return y;
}

template <class A, class B> auto matvec(const Matrix<A> &a, const std::vector<B> &x) {
  return matvec(a, std::span<const B>(x));
}

template <class A, class B> auto dot(std::span<const A> a, std::span<const B> b) {
  using R = decltype(A() * B());
  if (a.size() != b.size())
    throw Error(ErrorCode::DimensionMismatch, "dot dimensions differ");
  R acc(0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    acc += a[i] * b[i];
  return acc;
}

template <class S> Matrix<double> value_of(const Matrix<S> &m) {
  Matrix<double> v(m.rows(), m.cols());
  for (std::size_t k = 0; k < m.data().size(); ++k)
    v.data()[k] = value_of(m.data()[k]);
  return v;
}

template <class S> Matrix<S> lift_matrix(const Matrix<double> &m) {
  Matrix<S> r(m.rows(), m.cols());
  for (std::size_t k = 0; k < m.data().size(); ++k)
    r.data()[k] = S(m.data()[k]);
  return r;
}

template <class S> std::vector<double> value_of(const std::vector<S> &v) {
  std::vector<double> r(v.size());
  for (std::size_t k = 0; k < v.size(); ++k)
    r[k] = value_of(v[k]);
  return r;
}

} // namespace diffres

#endif // DIFFRES_NUMKIT_MATRIX_HPP
