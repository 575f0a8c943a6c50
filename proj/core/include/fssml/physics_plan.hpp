#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fssml/dual.hpp"
#include "fssml/em.hpp"
#include "fssml/errors.hpp"

namespace fssml::em {

/// Precomputed, parameter-independent part of f_phys for one topology and
/// grid: spacer ABCD matrices at every frequency and the port reference
/// impedance. Evaluating the same plan with `double` or `Dual<N>`
/// parameters performs identical primal arithmetic.
class PhysicsPlan {
public:
    PhysicsPlan(Topology topology, FrequencyGrid grid, double z0_free = kFreeSpaceImpedance);

    const Topology& topology() const noexcept { return topology_; }
    const FrequencyGrid& grid() const noexcept { return grid_; }
    double z0_free() const noexcept { return z0_free_; }
    /// Port reference impedance, z0_free / sqrt(port eps_r).
    double z_ref() const noexcept { return z_ref_; }
    std::size_t n_params() const noexcept { return topology_.n_params(); }

    const ABCDMatrix& line(std::size_t point, std::size_t spacer) const {
        return lines_[point * topology_.spacers.size() + spacer];
    }

    template <class T>
    SPointT<T> evaluate(std::size_t point, std::span<const T> params) const;

private:
    Topology topology_;
    FrequencyGrid grid_;
    double z0_free_;
    double z_ref_;
    std::vector<ABCDMatrix> lines_;
};

namespace detail {

/// Reactance-type quantity whose zero marks a series-LC pole.
template <class T>
T series_reactance(const T& inductance, const T& capacitance, double omega) {
    return omega * inductance - 1.0 / (omega * capacitance);
}

/// Screen admittance; std::nullopt signals a series-LC pole.
template <class T>
std::optional<Complex<T>> screen_admittance(ResonatorKind kind, const T& inductance, const T& capacitance,
                                            double frequency) {
    const double omega = 2.0 * kPi * frequency;
    if (kind == ResonatorKind::ParallelLC) {
        T susceptance = omega * capacitance - 1.0 / (omega * inductance);
        return Complex<T>{T(0.0), susceptance};
    }
    T reactance = series_reactance(inductance, capacitance, omega);
    if (value_of(reactance) == 0.0) return std::nullopt;
    // 1 / (j X) = -j / X
    return Complex<T>{T(0.0), -1.0 / reactance};
}

/// m * [[1, 0], [y, 1]]
template <class T>
Abcd<T> times_shunt(const Abcd<T>& m, const Complex<T>& y) {
    return Abcd<T>{m.a + m.b * y, m.b, m.c + m.d * y, m.d};
}

template <class T>
SPointT<T> to_s(const Abcd<T>& m, double z0) {
    const Complex<T> bz = m.b / z0;
    const Complex<T> cz = m.c * z0;
    const Complex<T> delta = m.a + bz + cz + m.d;
    if (value_of(delta.re) == 0.0 && value_of(delta.im) == 0.0) {
        throw SingularNetworkError("ABCD to S conversion: A + B/z0 + C z0 + D = 0");
    }
    const Complex<T> two{T(2.0), T(0.0)};
    SPointT<T> s;
    s.s11 = (m.a + bz - cz - m.d) / delta;
    s.s21 = two / delta;
    s.s12 = (two * m.det()) / delta;
    s.s22 = (m.d + bz - cz - m.a) / delta;
    return s;
}

/// Short-circuit limit of a cascade containing shunts of infinite
/// admittance: nothing is transmitted, port 1 sees the first short through
/// `before`, port 2 sees the last short through `after`.
template <class T>
SPointT<T> shorted_limit(const Abcd<T>& before, const Abcd<T>& after, double z0) {
    SPointT<T> s;
    const Complex<T> zero{T(0.0), T(0.0)};
    s.s21 = zero;
    s.s12 = zero;
    s.s11 = (before.b - before.d * z0) / (before.b + before.d * z0);
    s.s22 = (after.b - after.a * z0) / (after.b + after.a * z0);
    return s;
}

}  // namespace detail

template <class T>
SPointT<T> PhysicsPlan::evaluate(std::size_t point, std::span<const T> params) const {
    const double f = grid_[point];
    const std::size_t n = topology_.screens.size();

    // m accumulates the product since the last shorted screen (or port 1).
    Abcd<T> m;
    std::optional<Abcd<T>> before_first_pole;
    for (std::size_t k = 0; k < n; ++k) {
        if (k > 0) m = m * line(point, k - 1);
        auto y = detail::screen_admittance(topology_.screens[k], params[2 * k], params[2 * k + 1], f);
        if (!y) {
            if (!before_first_pole) before_first_pole = m;
            m = Abcd<T>{};
            continue;
        }
        m = detail::times_shunt(m, *y);
    }
    if (before_first_pole) return detail::shorted_limit(*before_first_pole, m, z_ref_);
    return detail::to_s(m, z_ref_);
}

}  // namespace fssml::em
