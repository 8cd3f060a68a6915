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

#ifndef DIFFRES_NUMKIT_SPD_HPP
#define DIFFRES_NUMKIT_SPD_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "diffres/numkit/matrix.hpp"

namespace diffres {

struct SymmetricEigen {
  Matrix<double> vectors; // columns are eigenvectors
  std::vector<double> values; // ascending
};

/// Cyclic Jacobi eigendecomposition of a symmetric real matrix.
SymmetricEigen jacobi_eigh(const Matrix<double> &a);

/**
 * Eigendecomposition of a symmetric positive definite matrix.
 *
 * The eigenbasis is computed on values; in dual mode the source matrix keeps
 * its tangents and matrix functions propagate them through the divided
 * difference (Daleckii-Krein) formula, so derivatives remain exact even with
 * repeated eigenvalues.
 */
template <class S> class SpdFactor {
public:
  SpdFactor() = default;
  SpdFactor(Matrix<S> source, SymmetricEigen eig)
      : source_(std::move(source)), eig_(std::move(eig)) {
    inverse_ = apply([](auto l) { return 1.0 / l; });
    log_det_ = S(0.0);
    auto lam = eigvals();
    for (const auto &l : lam)
      log_det_ += log(l);
  }

  std::size_t dim() const { return source_.rows(); }
  const Matrix<S> &matrix() const { return source_; }
  const Matrix<double> &eigvecs() const { return eig_.vectors; }
  const std::vector<double> &eigvals_value() const { return eig_.values; }
  const Matrix<S> &inverse() const { return inverse_; }
  const S &log_det() const { return log_det_; }

  /// Eigenvalues with first-order tangents diag(Q^T dA Q).
  std::vector<S> eigvals() const {
    std::vector<S> out(dim());
    for (std::size_t i = 0; i < dim(); ++i) {
      if constexpr (is_dual_v<S>) {
        S acc(eig_.values[i]);
        for (std::size_t p = 0; p < S::width; ++p) {
          double t = 0.0;
          for (std::size_t r = 0; r < dim(); ++r)
            for (std::size_t c = 0; c < dim(); ++c)
              t += eig_.vectors(r, i) * source_(r, c).tangent()[p] * eig_.vectors(c, i);
          acc.tangent()[p] = t;
        }
        out[i] = acc;
      } else {
        out[i] = eig_.values[i];
      }
    }
    return out;
  }

  /// Q diag(g(lambda)) Q^T; g must accept double and Dual<1>.
  template <class Fn> Matrix<S> apply(Fn &&g) const {
    const std::size_t d = dim();
    const auto &Q = eig_.vectors;
    const auto &lam = eig_.values;
    std::vector<double> gl(d);
    for (std::size_t i = 0; i < d; ++i)
      gl[i] = value_of(g(lam[i]));
    Matrix<S> out(d, d);
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = r; c < d; ++c) {
        double v = 0.0;
        for (std::size_t i = 0; i < d; ++i)
          v += Q(r, i) * gl[i] * Q(c, i);
        out(r, c) = S(v);
        out(c, r) = S(v);
      }
    if constexpr (is_dual_v<S>) {
      std::vector<double> dg(d);
      for (std::size_t i = 0; i < d; ++i)
        dg[i] = g(Dual<1>::seed(lam[i], 0)).tangent()[0];
      Matrix<double> G(d, d);
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
          double gap = lam[i] - lam[j];
          double scale = std::max(std::abs(lam[i]), std::abs(lam[j]));
          G(i, j) = std::abs(gap) > 1e-8 * scale ? (gl[i] - gl[j]) / gap : 0.5 * (dg[i] + dg[j]);
        }
      Matrix<double> dA(d, d), tmp(d, d), inner(d, d);
      for (std::size_t p = 0; p < S::width; ++p) {
        for (std::size_t r = 0; r < d; ++r)
          for (std::size_t c = 0; c < d; ++c)
            dA(r, c) = source_(r, c).tangent()[p];
        // Q^T dA Q, Hadamard with G, then back to the original basis
        auto qt_da = matmul(Q.transpose(), dA);
        inner = matmul(qt_da, Q);
        for (std::size_t i = 0; i < d; ++i)
          for (std::size_t j = 0; j < d; ++j)
            inner(i, j) *= G(i, j);
        tmp = matmul(matmul(Q, inner), Q.transpose());
        for (std::size_t r = 0; r < d; ++r)
          for (std::size_t c = 0; c < d; ++c)
            out(r, c).tangent()[p] = 0.5 * (tmp(r, c) + tmp(c, r));
      }
    }
    return out;
  }

  /// Factor of g(A) sharing this eigenbasis; g must map eigenvalues to positive values.
  template <class Fn> SpdFactor mapped(Fn &&g) const {
    SymmetricEigen eig = eig_;
    for (auto &l : eig.values) {
      l = value_of(g(l));
      if (!(l > 0.0))
        throw Error(ErrorCode::NonPositive, "mapped factor is not positive definite");
    }
    return SpdFactor(apply(g), std::move(eig));
  }

private:
  Matrix<S> source_;
  SymmetricEigen eig_;
  Matrix<S> inverse_;
  S log_det_{0.0};
};

/// Default jitter: 1e-9 * trace / d with an absolute floor of 1e-12.
template <class S> double default_jitter(const Matrix<S> &m) {
  double tr = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    tr += value_of(m(i, i));
  return std::max(1e-9 * tr / double(m.rows()), 1e-12);
}

template <class S> SpdFactor<S> spd_eigh(const Matrix<S> &m, double jitter) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw Error(ErrorCode::DimensionMismatch, "spd_eigh needs a non-empty square matrix");
  const std::size_t d = m.rows();
  double scale = 0.0;
  for (const auto &x : m.data())
    scale = std::max(scale, std::abs(value_of(x)));
  Matrix<S> sym(d, d);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) {
      double gap = std::abs(value_of(m(r, c)) - value_of(m(c, r)));
      if (!(gap <= 1e-8 * std::max(scale, 1e-300)) && gap != 0.0)
        throw Error(ErrorCode::NonSymmetric, "matrix is not symmetric");
      sym(r, c) = 0.5 * (m(r, c) + m(c, r));
    }
  for (std::size_t i = 0; i < d; ++i)
    sym(i, i) += jitter;
  auto eig = jacobi_eigh(value_of(sym));
  for (double l : eig.values)
    if (!(l > 0.0))
      throw Error(ErrorCode::NonPositive, "matrix is not positive definite");
  return SpdFactor<S>(std::move(sym), std::move(eig));
}

template <class S> SpdFactor<S> spd_eigh(const Matrix<S> &m) { return spd_eigh(m, default_jitter(m)); }

template <class S, class G> Matrix<S> spd_fn(const SpdFactor<S> &f, G &&g) { return f.apply(std::forward<G>(g)); }

/// Sigma^{-1} v via the cached inverse.
template <class S, class V> auto spd_solve(const SpdFactor<S> &f, const std::vector<V> &v) {
  return matvec(f.inverse(), v);
}

} // namespace diffres

#endif // DIFFRES_NUMKIT_SPD_HPP
