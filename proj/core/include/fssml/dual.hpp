#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace fssml {

/// Forward-mode dual number with `N` simultaneous tangent directions.
///
/// `v` is the primal value; `d[k]` is the derivative along direction k.
/// The primal arithmetic is identical to the corresponding `double`
/// expression, which lets dual and plain evaluations agree bit for bit.
template <std::size_t N>
struct Dual {
    double v = 0.0;
    std::array<double, N> d{};

    constexpr Dual() = default;
    constexpr Dual(double value) : v(value) {}
    constexpr Dual(double value, const std::array<double, N>& tangents) : v(value), d(tangents) {}

    /// Independent variable seeded along direction `k`.
    static constexpr Dual variable(double value, std::size_t k) {
        Dual x(value);
        x.d[k] = 1.0;
        return x;
    }

    Dual operator-() const {
        Dual r(-v);
        for (std::size_t k = 0; k < N; ++k) r.d[k] = -d[k];
        return r;
    }
};

template <std::size_t N>
Dual<N> operator+(const Dual<N>& a, const Dual<N>& b) {
    Dual<N> r(a.v + b.v);
    for (std::size_t k = 0; k < N; ++k) r.d[k] = a.d[k] + b.d[k];
    return r;
}

template <std::size_t N>
Dual<N> operator-(const Dual<N>& a, const Dual<N>& b) {
    Dual<N> r(a.v - b.v);
    for (std::size_t k = 0; k < N; ++k) r.d[k] = a.d[k] - b.d[k];
    return r;
}

template <std::size_t N>
Dual<N> operator*(const Dual<N>& a, const Dual<N>& b) {
    Dual<N> r(a.v * b.v);
    for (std::size_t k = 0; k < N; ++k) r.d[k] = a.d[k] * b.v + a.v * b.d[k];
    return r;
}

template <std::size_t N>
Dual<N> operator/(const Dual<N>& a, const Dual<N>& b) {
    Dual<N> r(a.v / b.v);
    const double inv_b2 = 1.0 / (b.v * b.v);
    for (std::size_t k = 0; k < N; ++k) r.d[k] = (a.d[k] * b.v - a.v * b.d[k]) * inv_b2;
    return r;
}

template <std::size_t N>
Dual<N> operator+(const Dual<N>& a, double b) {
    Dual<N> r(a.v + b, a.d);
    return r;
}

template <std::size_t N>
Dual<N> operator+(double a, const Dual<N>& b) {
    return Dual<N>(a + b.v, b.d);
}

template <std::size_t N>
Dual<N> operator-(const Dual<N>& a, double b) {
    return Dual<N>(a.v - b, a.d);
}

template <std::size_t N>
Dual<N> operator-(double a, const Dual<N>& b) {
    Dual<N> r(a - b.v);
    for (std::size_t k = 0; k < N; ++k) r.d[k] = -b.d[k];
    return r;
}

template <std::size_t N>
Dual<N> operator*(const Dual<N>& a, double b) {
    Dual<N> r(a.v * b);
    for (std::size_t k = 0; k < N; ++k) r.d[k] = a.d[k] * b;
    return r;
}

template <std::size_t N>
Dual<N> operator*(double a, const Dual<N>& b) {
    Dual<N> r(a * b.v);
    for (std::size_t k = 0; k < N; ++k) r.d[k] = a * b.d[k];
    return r;
}

template <std::size_t N>
Dual<N> operator/(const Dual<N>& a, double b) {
    Dual<N> r(a.v / b);
    for (std::size_t k = 0; k < N; ++k) r.d[k] = a.d[k] / b;
    return r;
}

template <std::size_t N>
Dual<N> operator/(double a, const Dual<N>& b) {
    Dual<N> r(a / b.v);
    const double scale = -a / (b.v * b.v);
    for (std::size_t k = 0; k < N; ++k) r.d[k] = scale * b.d[k];
    return r;
}

template <std::size_t N>
Dual<N> sqrt(const Dual<N>& a) {
    Dual<N> r(std::sqrt(a.v));
    const double scale = 0.5 / r.v;
    for (std::size_t k = 0; k < N; ++k) r.d[k] = scale * a.d[k];
    return r;
}

template <std::size_t N>
Dual<N> exp(const Dual<N>& a) {
    Dual<N> r(std::exp(a.v));
    for (std::size_t k = 0; k < N; ++k) r.d[k] = r.v * a.d[k];
    return r;
}

template <std::size_t N>
Dual<N> log(const Dual<N>& a) {
    Dual<N> r(std::log(a.v));
    for (std::size_t k = 0; k < N; ++k) r.d[k] = a.d[k] / a.v;
    return r;
}

template <std::size_t N>
Dual<N> sin(const Dual<N>& a) {
    Dual<N> r(std::sin(a.v));
    const double c = std::cos(a.v);
    for (std::size_t k = 0; k < N; ++k) r.d[k] = c * a.d[k];
    return r;
}

template <std::size_t N>
Dual<N> cos(const Dual<N>& a) {
    Dual<N> r(std::cos(a.v));
    const double s = -std::sin(a.v);
    for (std::size_t k = 0; k < N; ++k) r.d[k] = s * a.d[k];
    return r;
}

inline double value_of(double x) { return x; }

template <std::size_t N>
double value_of(const Dual<N>& x) {
    return x.v;
}

}  // namespace fssml
