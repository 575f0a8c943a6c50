#pragma once

#include <cmath>
#include <utility>

namespace fssml {

/// Cartesian complex number over an arbitrary real-like scalar.
///
/// The physics kernels are written once against `Complex<T>` and
/// instantiated for `double` (plain evaluation) and for dual numbers
/// (forward-mode derivatives). All operators spell out the textbook
/// formulas so that the value part of a dual evaluation performs exactly
/// the same floating-point operations as the plain one.
template <class T>
struct Complex {
    T re{};
    T im{};

    constexpr Complex() = default;
    constexpr Complex(T r) : re(std::move(r)), im(0.0) {}
    constexpr Complex(T r, T i) : re(std::move(r)), im(std::move(i)) {}

    Complex operator-() const { return {-re, -im}; }
};

using ComplexScalar = Complex<double>;

inline constexpr ComplexScalar kJ{0.0, 1.0};

template <class A, class B>
auto operator+(const Complex<A>& x, const Complex<B>& y) {
    using R = decltype(x.re + y.re);
    return Complex<R>{x.re + y.re, x.im + y.im};
}

template <class A, class B>
auto operator-(const Complex<A>& x, const Complex<B>& y) {
    using R = decltype(x.re - y.re);
    return Complex<R>{x.re - y.re, x.im - y.im};
}

template <class A, class B>
auto operator*(const Complex<A>& x, const Complex<B>& y) {
    using R = decltype(x.re * y.re);
    return Complex<R>{x.re * y.re - x.im * y.im, x.re * y.im + x.im * y.re};
}

template <class A, class B>
auto operator/(const Complex<A>& x, const Complex<B>& y) {
    auto den = y.re * y.re + y.im * y.im;
    using R = decltype((x.re * y.re + x.im * y.im) / den);
    return Complex<R>{(x.re * y.re + x.im * y.im) / den, (x.im * y.re - x.re * y.im) / den};
}

template <class A>
Complex<A> operator*(const Complex<A>& x, double s) {
    return {x.re * s, x.im * s};
}

template <class A>
Complex<A> operator*(double s, const Complex<A>& x) {
    return {s * x.re, s * x.im};
}

template <class A>
Complex<A> operator/(const Complex<A>& x, double s) {
    return {x.re / s, x.im / s};
}

template <class A, class B>
Complex<A>& operator+=(Complex<A>& x, const Complex<B>& y) {
    x.re = x.re + y.re;
    x.im = x.im + y.im;
    return x;
}

template <class T>
Complex<T> conj(const Complex<T>& z) {
    return {z.re, -z.im};
}

/// |z|^2
template <class T>
T norm(const Complex<T>& z) {
    return z.re * z.re + z.im * z.im;
}

inline double abs(const ComplexScalar& z) { return std::hypot(z.re, z.im); }

inline double arg(const ComplexScalar& z) { return std::atan2(z.im, z.re); }

inline bool isfinite(const ComplexScalar& z) { return std::isfinite(z.re) && std::isfinite(z.im); }

inline bool operator==(const ComplexScalar& x, const ComplexScalar& y) {
    return x.re == y.re && x.im == y.im;
}

}  // namespace fssml
