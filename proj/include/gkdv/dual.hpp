#pragma once

// Forward-mode dual numbers. Nesting Dual<Dual<...>> gives exact higher
// derivatives: seed the variable at every level with seed_variable<T>(x)
// and read the k-th derivative with derivative<k>(f).

#include <cmath>
#include <concepts>
#include <type_traits>

namespace gkdv {

template <class T>
struct Dual;

template <class T>
struct is_dual : std::false_type {};
template <class T>
struct is_dual<Dual<T>> : std::true_type {};
template <class T>
inline constexpr bool is_dual_v = is_dual<T>::value;

template <class T>
struct Dual {
  T val{};
  T der{};

  constexpr Dual() = default;
  constexpr Dual(T v, T d) : val(v), der(d) {}
  template <class S>
    requires std::is_arithmetic_v<S>
  constexpr Dual(S v) : val(static_cast<T>(v)), der(static_cast<T>(0)) {}

  constexpr Dual& operator+=(const Dual& o) {
    val += o.val;
    der += o.der;
    return *this;
  }
  constexpr Dual& operator-=(const Dual& o) {
    val -= o.val;
    der -= o.der;
    return *this;
  }
  constexpr Dual& operator*=(const Dual& o) {
    der = der * o.val + val * o.der;
    val *= o.val;
    return *this;
  }
  constexpr Dual& operator/=(const Dual& o) {
    T inv = T(1) / o.val;
    val *= inv;
    der = (der - val * o.der) * inv;
    return *this;
  }
};

/// Innermost real value of a (possibly nested) dual.
template <class T>
constexpr auto primal(const T& x) {
  if constexpr (is_dual_v<T>) {
    return primal(x.val);
  } else {
    return x;
  }
}

template <class T>
constexpr bool is_all_zero(const T& x) {
  if constexpr (is_dual_v<T>) {
    return is_all_zero(x.val) && is_all_zero(x.der);
  } else {
    return x == T(0);
  }
}

/// True when every derivative component (at every nesting level) is zero.
template <class T>
constexpr bool is_constant(const T& x) {
  if constexpr (is_dual_v<T>) {
    return is_constant(x.val) && is_all_zero(x.der);
  } else {
    return true;
  }
}

template <class T>
constexpr bool is_all_finite(const T& x) {
  if constexpr (is_dual_v<T>) {
    return is_all_finite(x.val) && is_all_finite(x.der);
  } else {
    return std::isfinite(x);
  }
}

/// Independent variable x lifted to T with unit seed at every nesting level.
template <class T, class S>
constexpr T seed_variable(S x) {
  if constexpr (is_dual_v<T>) {
    using Inner = decltype(T{}.val);
    return T(seed_variable<Inner>(x), Inner(1));
  } else {
    return static_cast<T>(x);
  }
}

/// K-th derivative of a result computed from seed_variable (K <= nesting depth).
template <int K, class T>
constexpr auto derivative(const T& f) {
  if constexpr (K == 0) {
    return primal(f);
  } else {
    static_assert(is_dual_v<T>, "derivative order exceeds nesting depth");
    return derivative<K - 1>(f.der);
  }
}

template <class T>
constexpr Dual<T> operator-(const Dual<T>& a) {
  return {-a.val, -a.der};
}

template <class T>
constexpr Dual<T> operator+(Dual<T> a, const Dual<T>& b) {
  return a += b;
}
template <class T>
constexpr Dual<T> operator-(Dual<T> a, const Dual<T>& b) {
  return a -= b;
}
template <class T>
constexpr Dual<T> operator*(Dual<T> a, const Dual<T>& b) {
  return a *= b;
}
template <class T>
constexpr Dual<T> operator/(Dual<T> a, const Dual<T>& b) {
  return a /= b;
}

template <class T, class S>
  requires std::is_arithmetic_v<S>
constexpr Dual<T> operator+(Dual<T> a, S b) {
  a.val += b;
  return a;
}
template <class T, class S>
  requires std::is_arithmetic_v<S>
constexpr Dual<T> operator+(S a, Dual<T> b) {
  b.val += a;
  return b;
}
template <class T, class S>
  requires std::is_arithmetic_v<S>
constexpr Dual<T> operator-(Dual<T> a, S b) {
  a.val -= b;
  return a;
}
template <class T, class S>
  requires std::is_arithmetic_v<S>
constexpr Dual<T> operator-(S a, const Dual<T>& b) {
  return {a - b.val, -b.der};
}
template <class T, class S>
  requires std::is_arithmetic_v<S>
constexpr Dual<T> operator*(const Dual<T>& a, S b) {
  return {a.val * b, a.der * b};
}
template <class T, class S>
  requires std::is_arithmetic_v<S>
constexpr Dual<T> operator*(S a, const Dual<T>& b) {
  return {a * b.val, a * b.der};
}
template <class T, class S>
  requires std::is_arithmetic_v<S>
constexpr Dual<T> operator/(const Dual<T>& a, S b) {
  return {a.val / b, a.der / b};
}
template <class T, class S>
  requires std::is_arithmetic_v<S>
constexpr Dual<T> operator/(S a, const Dual<T>& b) {
  T v = a / b.val;
  return {v, -v * b.der / b.val};
}

template <class T>
constexpr bool operator<(const Dual<T>& a, const Dual<T>& b) {
  return primal(a) < primal(b);
}
template <class T>
constexpr bool operator>(const Dual<T>& a, const Dual<T>& b) {
  return primal(a) > primal(b);
}

template <class T>
Dual<T> sqrt(const Dual<T>& a) {
  using std::sqrt;
  T r = sqrt(a.val);
  return {r, a.der / (T(2) * r)};
}
template <class T>
Dual<T> exp(const Dual<T>& a) {
  using std::exp;
  T e = exp(a.val);
  return {e, e * a.der};
}
template <class T>
Dual<T> log(const Dual<T>& a) {
  using std::log;
  return {log(a.val), a.der / a.val};
}
template <class T>
Dual<T> abs(const Dual<T>& a) {
  // derivative at 0 is undefined; callers that care must check beforehand
  return primal(a.val) < 0 ? -a : a;
}
template <class T>
Dual<T> sin(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  return {sin(a.val), cos(a.val) * a.der};
}
template <class T>
Dual<T> cos(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  return {cos(a.val), -sin(a.val) * a.der};
}
template <class T>
Dual<T> tan(const Dual<T>& a) {
  using std::tan;
  T t = tan(a.val);
  return {t, (T(1) + t * t) * a.der};
}
template <class T>
Dual<T> sinh(const Dual<T>& a) {
  using std::cosh;
  using std::sinh;
  return {sinh(a.val), cosh(a.val) * a.der};
}
template <class T>
Dual<T> cosh(const Dual<T>& a) {
  using std::cosh;
  using std::sinh;
  return {cosh(a.val), sinh(a.val) * a.der};
}
template <class T>
Dual<T> tanh(const Dual<T>& a) {
  using std::tanh;
  T t = tanh(a.val);
  return {t, (T(1) - t * t) * a.der};
}

/// x^p for a constant real exponent; valid for negative x when p is integral.
template <class T, class S>
  requires std::is_arithmetic_v<S>
Dual<T> pow(const Dual<T>& x, S p) {
  using std::pow;
  if (p == S(0)) return Dual<T>(1);
  T head = pow(x.val, static_cast<double>(p) - 1.0);
  return {pow(x.val, static_cast<double>(p)), T(p) * head * x.der};
}

template <class T>
Dual<T> pow(const Dual<T>& x, const Dual<T>& y) {
  using std::log;
  using std::pow;
  if (is_all_zero(y.der)) {
    // constant exponent: power rule, keeps integral powers of negatives real
    if (is_all_zero(y.val)) return Dual<T>(1);
    T head = pow(x.val, y.val - T(1));
    return {pow(x.val, y.val), y.val * head * x.der};
  }
  T v = pow(x.val, y.val);
  return {v, v * (y.der * log(x.val) + y.val * x.der / x.val)};
}

}  // namespace gkdv
