#pragma once

#include <cmath>
#include <complex>
#include <type_traits>

namespace resfree {

/// Forward-mode scalar carrying a value and its first three derivatives
/// with respect to a single seed variable. Used to obtain the closed-form
/// derivatives of the distortion map, the Jacobian and the potential
/// families without hand-expanded chain rules.
template <class T>
struct Jet {
  T v[4]{};  // v[k] = k-th derivative

  Jet() = default;
  Jet(T value) { v[0] = value; }
  Jet(T value, T d1) {
    v[0] = value;
    v[1] = d1;
  }
  Jet(T value, T d1, T d2, T d3) {
    v[0] = value;
    v[1] = d1;
    v[2] = d2;
    v[3] = d3;
  }

  static Jet variable(T value) { return Jet(value, T(1)); }

  T value() const { return v[0]; }
  T d1() const { return v[1]; }
  T d2() const { return v[2]; }
  T d3() const { return v[3]; }

  /// The jet of the derivative, one order shorter (third derivative unknown,
  /// set to zero; callers must not rely on .d3() of a shifted jet).
  Jet derivative() const { return Jet(v[1], v[2], v[3], T(0)); }

  template <class U>
  operator Jet<U>() const {
    static_assert(std::is_convertible_v<T, U>);
    return Jet<U>(U(v[0]), U(v[1]), U(v[2]), U(v[3]));
  }
};

template <class T>
Jet<T> operator+(const Jet<T>& a, const Jet<T>& b) {
  return {a.v[0] + b.v[0], a.v[1] + b.v[1], a.v[2] + b.v[2], a.v[3] + b.v[3]};
}
template <class T>
Jet<T> operator-(const Jet<T>& a, const Jet<T>& b) {
  return {a.v[0] - b.v[0], a.v[1] - b.v[1], a.v[2] - b.v[2], a.v[3] - b.v[3]};
}
template <class T>
Jet<T> operator-(const Jet<T>& a) {
  return {-a.v[0], -a.v[1], -a.v[2], -a.v[3]};
}

// Leibniz rule through order three.
template <class T>
Jet<T> operator*(const Jet<T>& a, const Jet<T>& b) {
  return {a.v[0] * b.v[0],
          a.v[1] * b.v[0] + a.v[0] * b.v[1],
          a.v[2] * b.v[0] + T(2) * a.v[1] * b.v[1] + a.v[0] * b.v[2],
          a.v[3] * b.v[0] + T(3) * a.v[2] * b.v[1] + T(3) * a.v[1] * b.v[2] +
              a.v[0] * b.v[3]};
}

template <class T>
Jet<T> operator*(const T& c, const Jet<T>& a) {
  return {c * a.v[0], c * a.v[1], c * a.v[2], c * a.v[3]};
}
template <class T>
Jet<T> operator*(const Jet<T>& a, const T& c) {
  return c * a;
}
template <class T>
Jet<T> operator+(const Jet<T>& a, const T& c) {
  Jet<T> r = a;
  r.v[0] += c;
  return r;
}
template <class T>
Jet<T> operator+(const T& c, const Jet<T>& a) {
  return a + c;
}
template <class T>
Jet<T> operator-(const Jet<T>& a, const T& c) {
  Jet<T> r = a;
  r.v[0] -= c;
  return r;
}
template <class T>
Jet<T> operator-(const T& c, const Jet<T>& a) {
  return (-a) + c;
}

/// Composition h = f∘u for an outer function given by its derivatives
/// f(u0), f'(u0), f''(u0), f'''(u0) (Faa di Bruno through order three).
template <class T>
Jet<T> compose(const T& f0, const T& f1, const T& f2, const T& f3,
               const Jet<T>& u) {
  const T u1 = u.v[1], u2 = u.v[2], u3 = u.v[3];
  return {f0, f1 * u1, f2 * u1 * u1 + f1 * u2,
          f3 * u1 * u1 * u1 + T(3) * f2 * u1 * u2 + f1 * u3};
}

template <class T>
Jet<T> recip(const Jet<T>& u) {
  const T x = u.v[0];
  const T i1 = T(1) / x;
  return compose(i1, -i1 * i1, T(2) * i1 * i1 * i1,
                 T(-6) * i1 * i1 * i1 * i1, u);
}

template <class T>
Jet<T> operator/(const Jet<T>& a, const Jet<T>& b) {
  return a * recip(b);
}
template <class T>
Jet<T> operator/(const Jet<T>& a, const T& c) {
  return a * (T(1) / c);
}
template <class T>
Jet<T> operator/(const T& c, const Jet<T>& a) {
  return c * recip(a);
}

template <class T>
Jet<T> exp(const Jet<T>& u) {
  using std::exp;
  const T e = exp(u.v[0]);
  return compose(e, e, e, e, u);
}

template <class T>
Jet<T> log(const Jet<T>& u) {
  using std::log;
  const T x = u.v[0];
  const T i1 = T(1) / x;
  return compose(log(x), i1, -i1 * i1, T(2) * i1 * i1 * i1, u);
}

/// u^p for a real constant exponent, principal branch for complex u.
template <class T>
Jet<T> pow(const Jet<T>& u, double p) {
  using std::pow;
  const T x = u.v[0];
  const T f0 = pow(x, p);
  const T f1 = T(p) * pow(x, p - 1);
  const T f2 = T(p) * T(p - 1) * pow(x, p - 2);
  const T f3 = T(p) * T(p - 1) * T(p - 2) * pow(x, p - 3);
  return compose(f0, f1, f2, f3, u);
}

template <class T>
Jet<T> sqrt(const Jet<T>& u) {
  return pow(u, 0.5);
}

using CJet = Jet<std::complex<double>>;
using RJet = Jet<double>;

inline CJet to_complex(const RJet& a) {
  return CJet(a.v[0], a.v[1], a.v[2], a.v[3]);
}

}  // namespace resfree
