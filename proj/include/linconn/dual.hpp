#pragma once

// Forward-mode AD scalars.
//
// Dual<T> carries one tangent direction and nests: Dual<Dual<double>> holds a
// value, two first directional derivatives and the mixed second derivative.
// Dual1 carries a dense vector of tangent directions (one pass per Jacobian).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <type_traits>
#include <utility>
#include <vector>

namespace linconn {

template <class T>
struct Dual {
  T re{};
  T eps{};

  constexpr Dual() = default;
  constexpr Dual(double v) : re(v), eps(0.0) {}  // NOLINT: implicit lift of constants
  template <class U = T>
    requires(!std::is_same_v<U, double>)
  constexpr Dual(const T& r) : re(r), eps(0.0) {}  // NOLINT
  constexpr Dual(T r, T e) : re(std::move(r)), eps(std::move(e)) {}

  friend Dual operator+(const Dual& a, const Dual& b) { return {a.re + b.re, a.eps + b.eps}; }
  friend Dual operator-(const Dual& a, const Dual& b) { return {a.re - b.re, a.eps - b.eps}; }
  friend Dual operator-(const Dual& a) { return {-a.re, -a.eps}; }
  friend Dual operator*(const Dual& a, const Dual& b) {
    return {a.re * b.re, a.re * b.eps + a.eps * b.re};
  }
  friend Dual operator/(const Dual& a, const Dual& b) {
    T q = a.re / b.re;
    return {q, (a.eps - q * b.eps) / b.re};
  }
  Dual& operator+=(const Dual& o) { return *this = *this + o; }
  Dual& operator-=(const Dual& o) { return *this = *this - o; }
  Dual& operator*=(const Dual& o) { return *this = *this * o; }

  friend Dual sin(const Dual& a) {
    using std::cos;
    using std::sin;
    return {sin(a.re), cos(a.re) * a.eps};
  }
  friend Dual cos(const Dual& a) {
    using std::cos;
    using std::sin;
    return {cos(a.re), -sin(a.re) * a.eps};
  }
  friend Dual exp(const Dual& a) {
    using std::exp;
    T e = exp(a.re);
    return {e, e * a.eps};
  }
  friend Dual log(const Dual& a) {
    using std::log;
    return {log(a.re), a.eps / a.re};
  }
  friend Dual sqrt(const Dual& a) {
    using std::sqrt;
    T r = sqrt(a.re);
    return {r, a.eps / (2.0 * r)};
  }
  // Callers guarantee a nonzero real part.
  friend Dual abs(const Dual& a) { return value_of(a.re) < 0.0 ? -a : a; }

 private:
  static double value_of(double v) { return v; }
  template <class U>
  static double value_of(const Dual<U>& d) { return value_of(d.re); }
};

using Dual2 = Dual<Dual<double>>;

/// Dense multi-direction dual. An empty `eps` stands for an all-zero tangent.
struct Dual1 {
  double re = 0.0;
  std::vector<double> eps;

  Dual1() = default;
  Dual1(double v) : re(v) {}  // NOLINT
  Dual1(double v, std::vector<double> e) : re(v), eps(std::move(e)) {}

  double d(std::size_t i) const { return i < eps.size() ? eps[i] : 0.0; }

  friend Dual1 operator+(const Dual1& a, const Dual1& b) {
    return {a.re + b.re, combine(a, 1.0, b, 1.0)};
  }
  friend Dual1 operator-(const Dual1& a, const Dual1& b) {
    return {a.re - b.re, combine(a, 1.0, b, -1.0)};
  }
  friend Dual1 operator-(const Dual1& a) { return {-a.re, combine(a, -1.0, a, 0.0)}; }
  friend Dual1 operator*(const Dual1& a, const Dual1& b) {
    return {a.re * b.re, combine(a, b.re, b, a.re)};
  }
  friend Dual1 operator/(const Dual1& a, const Dual1& b) {
    double q = a.re / b.re;
    return {q, combine(a, 1.0 / b.re, b, -q / b.re)};
  }
  Dual1& operator+=(const Dual1& o) { return *this = *this + o; }
  Dual1& operator-=(const Dual1& o) { return *this = *this - o; }
  Dual1& operator*=(const Dual1& o) { return *this = *this * o; }

  friend Dual1 sin(const Dual1& a) { return chain(a, std::sin(a.re), std::cos(a.re)); }
  friend Dual1 cos(const Dual1& a) { return chain(a, std::cos(a.re), -std::sin(a.re)); }
  friend Dual1 exp(const Dual1& a) {
    double e = std::exp(a.re);
    return chain(a, e, e);
  }
  friend Dual1 log(const Dual1& a) { return chain(a, std::log(a.re), 1.0 / a.re); }
  friend Dual1 sqrt(const Dual1& a) {
    double r = std::sqrt(a.re);
    return chain(a, r, 0.5 / r);
  }
  friend Dual1 abs(const Dual1& a) { return a.re < 0.0 ? -a : a; }

 private:
  // alpha * a.eps + beta * b.eps
  static std::vector<double> combine(const Dual1& a, double alpha, const Dual1& b, double beta) {
    std::vector<double> out(std::max(a.eps.size(), b.eps.size()), 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = alpha * a.d(i) + beta * b.d(i);
    return out;
  }
  static Dual1 chain(const Dual1& a, double value, double slope) {
    std::vector<double> e(a.eps.size());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = slope * a.eps[i];
    return {value, std::move(e)};
  }
};

// Real part, recursively.
inline double value_of(double v) { return v; }
inline double value_of(const Dual1& v) { return v.re; }
template <class T>
double value_of(const Dual<T>& v) {
  return value_of(v.re);
}

template <class S>
inline constexpr bool is_real_v = std::is_same_v<S, double>;

/// Seeded variable: value v moving with unit speed along the tangent `dir`.
template <class T>
Dual<T> make_dual(T v, T dir) {
  return {std::move(v), std::move(dir)};
}

/// Lift a plain vector into constants of Dual<T>.
template <class T>
std::vector<Dual<T>> lift(const std::vector<T>& v) {
  std::vector<Dual<T>> out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back(Dual<T>(e, T(0.0)));
  return out;
}

/// point + s * dir as a Dual<T> vector.
template <class T>
std::vector<Dual<T>> seed(const std::vector<T>& point, const std::vector<T>& dir) {
  std::vector<Dual<T>> out;
  out.reserve(point.size());
  for (std::size_t i = 0; i < point.size(); ++i) out.push_back(Dual<T>(point[i], dir[i]));
  return out;
}

template <class T>
std::vector<T> values(const std::vector<Dual<T>>& v) {
  std::vector<T> out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back(e.re);
  return out;
}

template <class T>
std::vector<T> tangents(const std::vector<Dual<T>>& v) {
  std::vector<T> out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back(e.eps);
  return out;
}

// Dual2 accessors: f, derivative along the inner seed u, along the outer
// seed v, and the mixed second derivative.
inline double f(const Dual2& d) { return d.re.re; }
inline double fu(const Dual2& d) { return d.re.eps; }
inline double fv(const Dual2& d) { return d.eps.re; }
inline double fuv(const Dual2& d) { return d.eps.eps; }

}  // namespace linconn
