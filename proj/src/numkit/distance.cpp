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

#include "diffres/numkit/distance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "diffres/randkit/rng.hpp"

namespace diffres {

namespace {

struct Atom {
  double x;
  double w;
};

std::vector<Atom> sorted_atoms(std::span<const double> x, std::span<const double> w) {
  std::vector<Atom> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    out[i] = {x[i], w.empty() ? 1.0 / double(x.size()) : w[i]};
  std::sort(out.begin(), out.end(), [](const Atom &l, const Atom &r) { return l.x < r.x; });
  return out;
}

} // namespace

double w1_1d(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty())
    throw Error(ErrorCode::EmptyInput, "w1_1d needs non-empty inputs");
  if (a.size() == b.size()) {
    std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    double acc = 0.0;
    for (std::size_t i = 0; i < sa.size(); ++i)
      acc += std::abs(sa[i] - sb[i]);
    return acc / double(sa.size());
  }
  return w1_1d(a, {}, b, {});
}

double w1_1d(std::span<const double> a, std::span<const double> wa, std::span<const double> b,
             std::span<const double> wb) {
  if (a.empty() || b.empty())
    throw Error(ErrorCode::EmptyInput, "w1_1d needs non-empty inputs");
  if ((!wa.empty() && wa.size() != a.size()) || (!wb.empty() && wb.size() != b.size()))
    throw Error(ErrorCode::DimensionMismatch, "w1_1d weight length differs from sample length");
  auto pa = sorted_atoms(a, wa);
  auto pb = sorted_atoms(b, wb);
  // integral of |F_a - F_b| over the merged breakpoints
  std::size_t i = 0, j = 0;
  double fa = 0.0, fb = 0.0, acc = 0.0;
  double prev = std::min(pa.front().x, pb.front().x);
  while (i < pa.size() || j < pb.size()) {
    double next;
    if (j >= pb.size() || (i < pa.size() && pa[i].x <= pb[j].x))
      next = pa[i].x;
    else
      next = pb[j].x;
    acc += std::abs(fa - fb) * (next - prev);
    while (i < pa.size() && pa[i].x == next)
      fa += pa[i++].w;
    while (j < pb.size() && pb[j].x == next)
      fb += pb[j++].w;
    prev = next;
  }
  return acc;
}

Matrix<double> random_directions(std::size_t d, std::size_t n_proj, std::uint64_t seed) {
  RngStream rng(seed);
  Matrix<double> dirs(n_proj, d);
  for (std::size_t p = 0; p < n_proj; ++p) {
    double norm = 0.0;
    do {
      norm = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        dirs(p, k) = rng.normal();
        norm += dirs(p, k) * dirs(p, k);
      }
    } while (norm == 0.0);
    norm = std::sqrt(norm);
    for (std::size_t k = 0; k < d; ++k)
      dirs(p, k) /= norm;
  }
  return dirs;
}

double sliced_w1(const Matrix<double> &a, const Matrix<double> &b, std::size_t n_proj, std::uint64_t seed,
                 std::span<const double> wa, std::span<const double> wb) {
  if (a.rows() == 0 || b.rows() == 0 || n_proj == 0)
    throw Error(ErrorCode::EmptyInput, "sliced_w1 needs non-empty inputs");
  if (a.cols() != b.cols())
    throw Error(ErrorCode::DimensionMismatch, "sliced_w1 dimensions differ");
  const std::size_t d = a.cols();
  const auto dirs = random_directions(d, n_proj, seed);
  std::vector<double> pa(a.rows()), pb(b.rows());
  const bool uniform = wa.empty() && wb.empty();
  double total = 0.0;
  for (std::size_t p = 0; p < n_proj; ++p) {
    auto dir = dirs.row(p);
    for (std::size_t i = 0; i < a.rows(); ++i)
      pa[i] = dot(a.row(i), dir);
    for (std::size_t i = 0; i < b.rows(); ++i)
      pb[i] = dot(b.row(i), dir);
    total += uniform ? w1_1d(pa, pb) : w1_1d(pa, wa, pb, wb);
  }
  return total / double(n_proj);
}

} // namespace diffres
