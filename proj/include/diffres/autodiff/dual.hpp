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

#ifndef DIFFRES_AUTODIFF_DUAL_HPP
#define DIFFRES_AUTODIFF_DUAL_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <ostream>
#include <type_traits>

#include "diffres/error.hpp"

namespace diffres {

/**
 * Forward-mode dual scalar carrying a fixed-width tangent.
 *
 * The tangent holds the derivatives of the value with respect to P free
 * parameters. Every primitive applies the chain rule exactly; comparisons and
 * branch decisions only look at the value, so a program takes the same path in
 * real and dual mode.
 */
template <std::size_t P> class Dual {
public:
  using Tangent = std::array<double, P>;
  static constexpr std::size_t width = P;

  constexpr Dual() : value_(0.0), tangent_{} {}
  // Implicit: plain reals enter dual arithmetic as constants.
  constexpr Dual(double v) : value_(v), tangent_{} {}
  constexpr Dual(double v, const Tangent &t) : value_(v), tangent_(t) {}

  /// Independent variable with a unit tangent on `axis`.
  static Dual seed(double v, std::size_t axis) {
    Dual d(v);
    d.tangent_[axis] = 1.0;
    return d;
  }

  constexpr double value() const { return value_; }
  constexpr const Tangent &tangent() const { return tangent_; }
  Tangent &tangent() { return tangent_; }
  constexpr double tangent(std::size_t axis) const { return tangent_[axis]; }

  Dual &operator+=(const Dual &o) {
    value_ += o.value_;
    for (std::size_t p = 0; p < P; ++p)
      tangent_[p] += o.tangent_[p];
    return *this;
  }
  Dual &operator-=(const Dual &o) {
    value_ -= o.value_;
    for (std::size_t p = 0; p < P; ++p)
      tangent_[p] -= o.tangent_[p];
    return *this;
  }
  Dual &operator*=(const Dual &o) {
    for (std::size_t p = 0; p < P; ++p)
      tangent_[p] = tangent_[p] * o.value_ + value_ * o.tangent_[p];
    value_ *= o.value_;
    return *this;
  }
  Dual &operator/=(const Dual &o) {
    const double q = value_ / o.value_;
    for (std::size_t p = 0; p < P; ++p)
      tangent_[p] = (tangent_[p] - q * o.tangent_[p]) / o.value_;
    value_ = q;
    return *this;
  }
  Dual &operator+=(double o) {
    value_ += o;
    return *this;
  }
  Dual &operator-=(double o) {
    value_ -= o;
    return *this;
  }
  Dual &operator*=(double o) {
    value_ *= o;
    for (auto &t : tangent_)
      t *= o;
    return *this;
  }
  Dual &operator/=(double o) {
    value_ /= o;
    for (auto &t : tangent_)
      t /= o;
    return *this;
  }

  Dual operator-() const {
    Dual r(-value_);
    for (std::size_t p = 0; p < P; ++p)
      r.tangent_[p] = -tangent_[p];
    return r;
  }
  Dual operator+() const { return *this; }

  /// Builds f(x) given f(value) and f'(value).
  Dual chain(double fv, double dfv) const {
    Dual r(fv);
    for (std::size_t p = 0; p < P; ++p)
      r.tangent_[p] = dfv * tangent_[p];
    return r;
  }

private:
  double value_;
  Tangent tangent_;
};

template <std::size_t P> Dual<P> operator+(Dual<P> a, const Dual<P> &b) { return a += b; }
template <std::size_t P> Dual<P> operator-(Dual<P> a, const Dual<P> &b) { return a -= b; }
template <std::size_t P> Dual<P> operator*(Dual<P> a, const Dual<P> &b) { return a *= b; }
template <std::size_t P> Dual<P> operator/(Dual<P> a, const Dual<P> &b) { return a /= b; }
template <std::size_t P> Dual<P> operator+(Dual<P> a, double b) { return a += b; }
template <std::size_t P> Dual<P> operator-(Dual<P> a, double b) { return a -= b; }
template <std::size_t P> Dual<P> operator*(Dual<P> a, double b) { return a *= b; }
template <std::size_t P> Dual<P> operator/(Dual<P> a, double b) { return a /= b; }
template <std::size_t P> Dual<P> operator+(double a, Dual<P> b) { return b += a; }
template <std::size_t P> Dual<P> operator-(double a, const Dual<P> &b) { return (-b) += a; }
template <std::size_t P> Dual<P> operator*(double a, Dual<P> b) { return b *= a; }
template <std::size_t P> Dual<P> operator/(double a, const Dual<P> &b) {
  const double q = a / b.value();
  return b.chain(q, -q / b.value());
}

// Comparisons look at values only.
template <std::size_t P> bool operator==(const Dual<P> &a, const Dual<P> &b) { return a.value() == b.value(); }
template <std::size_t P> bool operator!=(const Dual<P> &a, const Dual<P> &b) { return a.value() != b.value(); }
template <std::size_t P> bool operator<(const Dual<P> &a, const Dual<P> &b) { return a.value() < b.value(); }
template <std::size_t P> bool operator<=(const Dual<P> &a, const Dual<P> &b) { return a.value() <= b.value(); }
template <std::size_t P> bool operator>(const Dual<P> &a, const Dual<P> &b) { return a.value() > b.value(); }
template <std::size_t P> bool operator>=(const Dual<P> &a, const Dual<P> &b) { return a.value() >= b.value(); }
template <std::size_t P> bool operator==(const Dual<P> &a, double b) { return a.value() == b; }
template <std::size_t P> bool operator!=(const Dual<P> &a, double b) { return a.value() != b; }
template <std::size_t P> bool operator<(const Dual<P> &a, double b) { return a.value() < b; }
template <std::size_t P> bool operator<=(const Dual<P> &a, double b) { return a.value() <= b; }
template <std::size_t P> bool operator>(const Dual<P> &a, double b) { return a.value() > b; }
template <std::size_t P> bool operator>=(const Dual<P> &a, double b) { return a.value() >= b; }
template <std::size_t P> bool operator<(double a, const Dual<P> &b) { return a < b.value(); }
template <std::size_t P> bool operator<=(double a, const Dual<P> &b) { return a <= b.value(); }
template <std::size_t P> bool operator>(double a, const Dual<P> &b) { return a > b.value(); }
template <std::size_t P> bool operator>=(double a, const Dual<P> &b) { return a >= b.value(); }

template <std::size_t P> Dual<P> exp(const Dual<P> &x) {
  const double e = std::exp(x.value());
  return x.chain(e, e);
}

template <std::size_t P> Dual<P> log(const Dual<P> &x) {
  if (!(x.value() > 0.0))
    throw Error(ErrorCode::DomainError, "log of a nonpositive dual value");
  return x.chain(std::log(x.value()), 1.0 / x.value());
}

template <std::size_t P> Dual<P> sqrt(const Dual<P> &x) {
  if (!(x.value() > 0.0))
    throw Error(ErrorCode::DomainError, "sqrt of a nonpositive dual value");
  const double s = std::sqrt(x.value());
  return x.chain(s, 0.5 / s);
}

template <std::size_t P> Dual<P> tanh(const Dual<P> &x) {
  const double t = std::tanh(x.value());
  return x.chain(t, 1.0 - t * t);
}

template <std::size_t P> Dual<P> abs(const Dual<P> &x) {
  if (x.value() > 0.0)
    return x;
  if (x.value() < 0.0)
    return -x;
  return x.chain(0.0, 0.0);
}

template <std::size_t P> Dual<P> expm1(const Dual<P> &x) {
  return x.chain(std::expm1(x.value()), std::exp(x.value()));
}

template <std::size_t P> Dual<P> log1p(const Dual<P> &x) {
  if (!(x.value() > -1.0))
    throw Error(ErrorCode::DomainError, "log1p argument <= -1");
  return x.chain(std::log1p(x.value()), 1.0 / (1.0 + x.value()));
}

/// Ties go to the first operand, matching the real-mode tie-break.
template <std::size_t P> Dual<P> max(const Dual<P> &a, const Dual<P> &b) {
  return b.value() > a.value() ? b : a;
}

template <std::size_t P> Dual<P> min(const Dual<P> &a, const Dual<P> &b) {
  return b.value() < a.value() ? b : a;
}

template <std::size_t P> bool isfinite(const Dual<P> &x) {
  if (!std::isfinite(x.value()))
    return false;
  for (double t : x.tangent())
    if (!std::isfinite(t))
      return false;
  return true;
}

template <std::size_t P> std::ostream &operator<<(std::ostream &os, const Dual<P> &x) {
  os << x.value() << " [";
  for (std::size_t p = 0; p < P; ++p)
    os << (p ? ", " : "") << x.tangent(p);
  return os << "]";
}

// ---------------------------------------------------------------------------
// Scalar-field interface shared by every numeric module.

template <class S> struct ScalarTraits {
  static constexpr bool is_dual = false;
  static constexpr std::size_t width = 0;
};

template <std::size_t P> struct ScalarTraits<Dual<P>> {
  static constexpr bool is_dual = true;
  static constexpr std::size_t width = P;
};

template <class S> inline constexpr bool is_dual_v = ScalarTraits<S>::is_dual;

template <class S>
concept Scalar = std::is_same_v<S, double> || is_dual_v<S>;

inline constexpr double value_of(double x) { return x; }
template <std::size_t P> constexpr double value_of(const Dual<P> &x) { return x.value(); }

/// Tangent component `axis`; zero for plain reals.
inline constexpr double tangent_of(double, std::size_t) { return 0.0; }
template <std::size_t P> constexpr double tangent_of(const Dual<P> &x, std::size_t axis) {
  return x.tangent(axis);
}

template <class S> constexpr S lift(double x) { return S(x); }

using std::abs;
using std::exp;
using std::expm1;
using std::isfinite;
using std::log;
using std::log1p;
using std::sqrt;
using std::tanh;

inline double max(double a, double b) { return b > a ? b : a; }
inline double min(double a, double b) { return b < a ? b : a; }

} // namespace diffres

#endif // DIFFRES_AUTODIFF_DUAL_HPP
