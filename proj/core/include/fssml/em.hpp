#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fssml/complex.hpp"

/// Equivalent-circuit physics of a stack of FSS screens: lumped screen
/// admittances, spacer transmission lines, ABCD cascades and the
/// conversion to S-parameters.
namespace fssml::em {

inline constexpr double kSpeedOfLight = 299792458.0;        // m/s
inline constexpr double kFreeSpaceImpedance = 376.730313668;  // ohm
inline constexpr double kPi = 3.14159265358979323846;

/// Uniform frequency grid, endpoints inclusive. Frequencies in Hz.
class FrequencyGrid {
public:
    FrequencyGrid(double f_start, double f_stop, std::size_t n_points);

    /// 6-16 GHz, 201 points.
    static FrequencyGrid standard();

    double start() const noexcept { return f_start_; }
    double stop() const noexcept { return f_stop_; }
    std::size_t size() const noexcept { return n_points_; }

    double operator[](std::size_t j) const noexcept {
        return f_start_ + static_cast<double>(j) * (f_stop_ - f_start_) / static_cast<double>(n_points_ - 1);
    }

    std::vector<double> points() const;

    friend bool operator==(const FrequencyGrid&, const FrequencyGrid&) = default;

private:
    double f_start_;
    double f_stop_;
    std::size_t n_points_;
};

enum class ResonatorKind {
    ParallelLC,  // slot screen, band-pass
    SeriesLC,    // patch screen, band-stop
};

struct Spacer {
    double eps_r = 1.0;
    double length = 0.0;  // m

    friend bool operator==(const Spacer&, const Spacer&) = default;
};

/// Cascade layout: screen, spacer, screen, ..., screen.
struct Topology {
    std::vector<ResonatorKind> screens;
    std::vector<Spacer> spacers;
    double port_eps_r = 1.0;

    /// Throws DomainError / UsageError when the structural rules are broken.
    void validate() const;

    std::size_t n_screens() const noexcept { return screens.size(); }
    std::size_t n_params() const noexcept { return 2 * screens.size(); }

    /// Two parallel-LC screens separated by an air gap.
    static Topology two_screen(double separation_m);

    friend bool operator==(const Topology&, const Topology&) = default;
};

/// Flattened circuit vector [L1, C1, L2, C2, ...] in henry / farad.
class CircuitParams {
public:
    CircuitParams() = default;
    explicit CircuitParams(std::vector<double> values);

    std::size_t size() const noexcept { return values_.size(); }
    std::size_t n_screens() const noexcept { return values_.size() / 2; }
    double inductance(std::size_t screen) const { return values_.at(2 * screen); }
    double capacitance(std::size_t screen) const { return values_.at(2 * screen + 1); }
    double operator[](std::size_t k) const { return values_[k]; }
    std::span<const double> values() const noexcept { return values_; }

    /// 1 / (2 pi sqrt(L C)) of the given screen.
    double resonance(std::size_t screen) const;

    friend bool operator==(const CircuitParams&, const CircuitParams&) = default;

private:
    std::vector<double> values_;
};

template <class T>
struct Abcd {
    Complex<T> a{1.0}, b{0.0}, c{0.0}, d{1.0};

    Complex<T> det() const { return a * d - b * c; }
};

using ABCDMatrix = Abcd<double>;

template <class A, class B>
auto operator*(const Abcd<A>& m, const Abcd<B>& n) {
    using R = decltype(m.a.re * n.a.re);
    return Abcd<R>{m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d, m.c * n.a + m.d * n.c,
                   m.c * n.b + m.d * n.d};
}

template <class T>
struct SPointT {
    Complex<T> s11, s21, s12, s22;
};

using SPoint = SPointT<double>;

struct SResponse {
    FrequencyGrid grid;
    std::vector<SPoint> points;

    SResponse(FrequencyGrid g, std::vector<SPoint> p);
    explicit SResponse(FrequencyGrid g);

    std::size_t size() const noexcept { return points.size(); }
};

/// Lossless screen admittance in siemens.
/// Throws DomainError for non-positive inputs and PoleError for a series
/// resonator exactly at resonance.
ComplexScalar admittance(ResonatorKind kind, double inductance, double capacitance, double frequency);

/// [[1, 0], [y, 1]]
ABCDMatrix abcd_shunt(ComplexScalar y);

/// Lossless TEM line section of physical `length` in a medium of relative
/// permittivity `eps_r`.
ABCDMatrix abcd_line(double length, double eps_r, double frequency, double z0_free = kFreeSpaceImpedance);

/// Ordered product, port-1 element first.
ABCDMatrix cascade(std::span<const ABCDMatrix> ms);

/// Throws SingularNetworkError when A + B/z0 + C z0 + D vanishes.
SPoint abcd_to_s(const ABCDMatrix& m, double z0);

/// Circuit vector to S-parameters over a grid. Pure and deterministic.
SResponse f_phys(const CircuitParams& c, const Topology& topology, const FrequencyGrid& grid,
                 double z0_free = kFreeSpaceImpedance);

}  // namespace fssml::em
