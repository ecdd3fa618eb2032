#pragma once

// Second-order forward-mode jets: a value together with its first and second
// derivative along one scalar variable. Radial coefficient profiles and phase
// functions are evaluated as Jet<double> so that every consumer gets exact
// (non-FD) derivatives.

#include <cmath>

namespace curlwave {

template <class T>
struct Jet {
  T v{};
  T d1{};
  T d2{};

  constexpr Jet() = default;
  constexpr Jet(T value) : v(value) {}  // NOLINT: constants promote implicitly
  constexpr Jet(T value, T first, T second) : v(value), d1(first), d2(second) {}

  static constexpr Jet variable(T x) { return Jet(x, T(1), T(0)); }

  constexpr Jet operator-() const { return Jet(-v, -d1, -d2); }

  constexpr Jet& operator+=(const Jet& o) {
    v += o.v;
    d1 += o.d1;
    d2 += o.d2;
    return *this;
  }
  constexpr Jet& operator-=(const Jet& o) { return *this += -o; }
  constexpr Jet& operator*=(const Jet& o) {
    *this = Jet(v * o.v, d1 * o.v + v * o.d1, d2 * o.v + T(2) * d1 * o.d1 + v * o.d2);
    return *this;
  }
  constexpr Jet& operator/=(const Jet& o) {
    // (f/g)' = (f' - q g')/g,  (f/g)'' = (f'' - 2 q' g' - q g'')/g  with q = f/g
    const T q = v / o.v;
    const T q1 = (d1 - q * o.d1) / o.v;
    const T q2 = (d2 - T(2) * q1 * o.d1 - q * o.d2) / o.v;
    *this = Jet(q, q1, q2);
    return *this;
  }
};

template <class T> constexpr Jet<T> operator+(Jet<T> a, const Jet<T>& b) { return a += b; }
template <class T> constexpr Jet<T> operator-(Jet<T> a, const Jet<T>& b) { return a -= b; }
template <class T> constexpr Jet<T> operator*(Jet<T> a, const Jet<T>& b) { return a *= b; }
template <class T> constexpr Jet<T> operator/(Jet<T> a, const Jet<T>& b) { return a /= b; }
template <class T> constexpr Jet<T> operator+(Jet<T> a, T b) { return a += Jet<T>(b); }
template <class T> constexpr Jet<T> operator+(T a, Jet<T> b) { return b += Jet<T>(a); }
template <class T> constexpr Jet<T> operator-(Jet<T> a, T b) { return a -= Jet<T>(b); }
template <class T> constexpr Jet<T> operator-(T a, const Jet<T>& b) { return Jet<T>(a) - b; }
template <class T> constexpr Jet<T> operator*(Jet<T> a, T b) { return Jet<T>(a.v * b, a.d1 * b, a.d2 * b); }
template <class T> constexpr Jet<T> operator*(T a, Jet<T> b) { return b * a; }
template <class T> constexpr Jet<T> operator/(Jet<T> a, T b) { return Jet<T>(a.v / b, a.d1 / b, a.d2 / b); }
template <class T> constexpr Jet<T> operator/(T a, const Jet<T>& b) { return Jet<T>(a) / b; }

/// Applies a scalar function given its value and first two derivatives at a.v.
template <class T>
constexpr Jet<T> chain(const Jet<T>& a, T f, T df, T ddf) {
  return Jet<T>(f, df * a.d1, ddf * a.d1 * a.d1 + df * a.d2);
}

template <class T>
Jet<T> exp(const Jet<T>& a) {
  const T e = std::exp(a.v);
  return chain(a, e, e, e);
}

template <class T>
Jet<T> log(const Jet<T>& a) {
  return chain(a, std::log(a.v), T(1) / a.v, -T(1) / (a.v * a.v));
}

template <class T>
Jet<T> sqrt(const Jet<T>& a) {
  const T s = std::sqrt(a.v);
  return chain(a, s, T(0.5) / s, -T(0.25) / (s * a.v));
}

/// a^k for a > 0 and real k.
template <class T>
Jet<T> pow(const Jet<T>& a, T k) {
  const T f = std::pow(a.v, k);
  const T df = k * std::pow(a.v, k - T(1));
  const T ddf = k * (k - T(1)) * std::pow(a.v, k - T(2));
  return chain(a, f, df, ddf);
}

/// a^n for integer n >= 0; exact at a = 0.
template <class T>
Jet<T> ipow(const Jet<T>& a, int n) {
  if (n == 0) return Jet<T>(T(1));
  const T f = std::pow(a.v, n);
  const T df = T(n) * std::pow(a.v, n - 1);
  const T ddf = n >= 2 ? T(n) * T(n - 1) * std::pow(a.v, n - 2) : T(0);
  return chain(a, f, df, ddf);
}

}  // namespace curlwave
