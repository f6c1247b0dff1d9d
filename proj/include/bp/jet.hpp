// SPDX-License-Identifier: Apache-2.0
#pragma once

// Truncated Taylor jets for forward-mode differentiation of metric
// expressions. Jet<1> carries value and gradient, Jet<2> adds the Hessian.

#include "bp/types.hpp"

#include <array>
#include <cmath>

namespace bp {

template <int Order>
struct Jet {
  static_assert(Order == 1 || Order == 2);

  int n = 0;
  double v = 0.0;
  std::array<double, kMaxDim> d{};
  std::array<double, (Order == 2 ? kMaxDim * kMaxDim : 1)> h{};

  static Jet constant(int dim, double value) {
    Jet j;
    j.n = dim;
    j.v = value;
    return j;
  }

  static Jet variable(int dim, int index, double value) {
    Jet j = constant(dim, value);
    j.d[index] = 1.0;
    return j;
  }

  double hess(int a, int b) const { return h[a * kMaxDim + b]; }
  double& hess(int a, int b) { return h[a * kMaxDim + b]; }
};

/// Composition with a scalar function f given f(v), f'(v) and f''(v).
template <int Order>
Jet<Order> chain(const Jet<Order>& a, double f0, double f1, double f2) {
  Jet<Order> r;
  r.n = a.n;
  r.v = f0;
  for (int i = 0; i < a.n; ++i) r.d[i] = f1 * a.d[i];
  if constexpr (Order == 2) {
    for (int i = 0; i < a.n; ++i)
      for (int j = 0; j < a.n; ++j) r.hess(i, j) = f1 * a.hess(i, j) + f2 * a.d[i] * a.d[j];
  }
  return r;
}

template <int Order>
Jet<Order> operator+(const Jet<Order>& a, const Jet<Order>& b) {
  Jet<Order> r = a;
  r.v += b.v;
  for (int i = 0; i < a.n; ++i) r.d[i] += b.d[i];
  if constexpr (Order == 2) {
    for (int i = 0; i < a.n; ++i)
      for (int j = 0; j < a.n; ++j) r.hess(i, j) += b.hess(i, j);
  }
  return r;
}

template <int Order>
Jet<Order> operator-(const Jet<Order>& a) {
  return chain(a, -a.v, -1.0, 0.0);
}

template <int Order>
Jet<Order> operator-(const Jet<Order>& a, const Jet<Order>& b) {
  return a + (-b);
}

template <int Order>
Jet<Order> operator*(const Jet<Order>& a, const Jet<Order>& b) {
  Jet<Order> r;
  r.n = a.n;
  r.v = a.v * b.v;
  for (int i = 0; i < a.n; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
  if constexpr (Order == 2) {
    for (int i = 0; i < a.n; ++i)
      for (int j = 0; j < a.n; ++j)
        r.hess(i, j) = a.hess(i, j) * b.v + a.v * b.hess(i, j) + a.d[i] * b.d[j] + a.d[j] * b.d[i];
  }
  return r;
}

/// Reciprocal; the caller is responsible for rejecting a zero value.
template <int Order>
Jet<Order> reciprocal(const Jet<Order>& a) {
  const double inv = 1.0 / a.v;
  return chain(a, inv, -inv * inv, 2.0 * inv * inv * inv);
}

template <int Order>
Jet<Order> operator/(const Jet<Order>& a, const Jet<Order>& b) {
  return a * reciprocal(b);
}

template <int Order>
Jet<Order> sin(const Jet<Order>& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return chain(a, s, c, -s);
}

template <int Order>
Jet<Order> cos(const Jet<Order>& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return chain(a, c, -s, -c);
}

template <int Order>
Jet<Order> sinh(const Jet<Order>& a) {
  const double s = std::sinh(a.v), c = std::cosh(a.v);
  return chain(a, s, c, s);
}

template <int Order>
Jet<Order> cosh(const Jet<Order>& a) {
  const double s = std::sinh(a.v), c = std::cosh(a.v);
  return chain(a, c, s, c);
}

template <int Order>
Jet<Order> exp(const Jet<Order>& a) {
  const double e = std::exp(a.v);
  return chain(a, e, e, e);
}

template <int Order>
Jet<Order> log(const Jet<Order>& a) {
  const double inv = 1.0 / a.v;
  return chain(a, std::log(a.v), inv, -inv * inv);
}

template <int Order>
Jet<Order> sqrt(const Jet<Order>& a) {
  const double s = std::sqrt(a.v);
  return chain(a, s, 0.5 / s, -0.25 / (s * a.v));
}

/// a^c for a constant exponent c (valid for negative a when c is an integer).
template <int Order>
Jet<Order> pow_const(const Jet<Order>& a, double c) {
  const double f0 = std::pow(a.v, c);
  const double f1 = c == 0.0 ? 0.0 : c * std::pow(a.v, c - 1.0);
  const double f2 = (c == 0.0 || c == 1.0) ? 0.0 : c * (c - 1.0) * std::pow(a.v, c - 2.0);
  return chain(a, f0, f1, f2);
}

template <int Order>
bool is_constant(const Jet<Order>& a) {
  for (int i = 0; i < a.n; ++i)
    if (a.d[i] != 0.0) return false;
  if constexpr (Order == 2) {
    for (int i = 0; i < a.n; ++i)
      for (int j = 0; j < a.n; ++j)
        if (a.hess(i, j) != 0.0) return false;
  }
  return true;
}

}  // namespace bp
