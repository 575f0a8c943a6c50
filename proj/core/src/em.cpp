#include "fssml/em.hpp"

#include <cmath>
#include <string>

#include "fssml/errors.hpp"
#include "fssml/physics_plan.hpp"

namespace fssml::em {

FrequencyGrid::FrequencyGrid(double f_start, double f_stop, std::size_t n_points)
    : f_start_(f_start), f_stop_(f_stop), n_points_(n_points) {
    if (!(std::isfinite(f_start) && std::isfinite(f_stop)) || !(f_start < f_stop)) {
        throw DomainError("frequency grid requires finite f_start < f_stop");
    }
    if (f_start <= 0.0) throw DomainError("frequency grid must start above 0 Hz");
    if (n_points < 2) throw DomainError("frequency grid needs at least 2 points");
}

FrequencyGrid FrequencyGrid::standard() { return FrequencyGrid(6e9, 16e9, 201); }

std::vector<double> FrequencyGrid::points() const {
    std::vector<double> out(n_points_);
    for (std::size_t j = 0; j < n_points_; ++j) out[j] = (*this)[j];
    return out;
}

void Topology::validate() const {
    if (screens.empty()) throw UsageError("topology needs at least one screen");
    if (spacers.size() + 1 != screens.size()) {
        throw UsageError("topology needs exactly n_screens - 1 spacers, got " + std::to_string(spacers.size()) +
                         " for " + std::to_string(screens.size()) + " screens");
    }
    for (const Spacer& s : spacers) {
        if (!(s.length > 0.0) || !std::isfinite(s.length)) throw DomainError("spacer length must be > 0");
        if (!(s.eps_r >= 1.0) || !std::isfinite(s.eps_r)) throw DomainError("spacer eps_r must be >= 1");
    }
    if (!(port_eps_r >= 1.0) || !std::isfinite(port_eps_r)) throw DomainError("port eps_r must be >= 1");
}

Topology Topology::two_screen(double separation_m) {
    Topology t;
    t.screens = {ResonatorKind::ParallelLC, ResonatorKind::ParallelLC};
    t.spacers = {Spacer{1.0, separation_m}};
    t.validate();
    return t;
}

CircuitParams::CircuitParams(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty() || values_.size() % 2 != 0) {
        throw UsageError("circuit vector must hold an (L, C) pair per screen");
    }
    for (double v : values_) {
        if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("circuit parameters must be finite and > 0");
    }
}

double CircuitParams::resonance(std::size_t screen) const {
    return 1.0 / (2.0 * kPi * std::sqrt(inductance(screen) * capacitance(screen)));
}

SResponse::SResponse(FrequencyGrid g, std::vector<SPoint> p) : grid(g), points(std::move(p)) {
    if (points.size() != grid.size()) {
        throw UsageError("S-response has " + std::to_string(points.size()) + " points for a grid of " +
                         std::to_string(grid.size()));
    }
}

SResponse::SResponse(FrequencyGrid g) : grid(g), points(g.size()) {}

ComplexScalar admittance(ResonatorKind kind, double inductance, double capacitance, double frequency) {
    if (!(inductance > 0.0) || !(capacitance > 0.0) || !(frequency > 0.0)) {
        throw DomainError("admittance requires L > 0, C > 0 and f > 0");
    }
    auto y = detail::screen_admittance(kind, inductance, capacitance, frequency);
    if (!y) throw PoleError("series LC evaluated exactly at resonance");
    return *y;
}

ABCDMatrix abcd_shunt(ComplexScalar y) {
    if (!isfinite(y)) throw DomainError("shunt admittance must be finite");
    return ABCDMatrix{{1.0, 0.0}, {0.0, 0.0}, y, {1.0, 0.0}};
}

ABCDMatrix abcd_line(double length, double eps_r, double frequency, double z0_free) {
    if (!(length >= 0.0) || !(eps_r >= 1.0) || !(frequency > 0.0) || !(z0_free > 0.0)) {
        throw DomainError("line section requires length >= 0, eps_r >= 1, f > 0 and z0 > 0");
    }
    const double root_eps = std::sqrt(eps_r);
    const double beta = 2.0 * kPi * frequency * root_eps / kSpeedOfLight;
    const double z = z0_free / root_eps;
    const double cs = std::cos(beta * length);
    const double sn = std::sin(beta * length);
    return ABCDMatrix{{cs, 0.0}, {0.0, z * sn}, {0.0, sn / z}, {cs, 0.0}};
}

ABCDMatrix cascade(std::span<const ABCDMatrix> ms) {
    if (ms.empty()) throw UsageError("cascade of an empty sequence");
    ABCDMatrix total = ms.front();
    for (std::size_t k = 1; k < ms.size(); ++k) total = total * ms[k];
    return total;
}

SPoint abcd_to_s(const ABCDMatrix& m, double z0) {
    if (!(z0 > 0.0)) throw DomainError("reference impedance must be > 0");
    return detail::to_s(m, z0);
}

PhysicsPlan::PhysicsPlan(Topology topology, FrequencyGrid grid, double z0_free)
    : topology_(std::move(topology)), grid_(grid), z0_free_(z0_free) {
    topology_.validate();
    if (!(z0_free > 0.0)) throw DomainError("free-space impedance must be > 0");
    z_ref_ = z0_free_ / std::sqrt(topology_.port_eps_r);
    const std::size_t n_spacers = topology_.spacers.size();
    lines_.reserve(grid_.size() * n_spacers);
    for (std::size_t j = 0; j < grid_.size(); ++j) {
        for (const Spacer& s : topology_.spacers) lines_.push_back(abcd_line(s.length, s.eps_r, grid_[j], z0_free_));
    }
}

SResponse f_phys(const CircuitParams& c, const Topology& topology, const FrequencyGrid& grid, double z0_free) {
    if (c.size() != topology.n_params()) {
        throw UsageError("circuit vector has " + std::to_string(c.size()) + " entries, topology needs " +
                         std::to_string(topology.n_params()));
    }
    const PhysicsPlan plan(topology, grid, z0_free);
    SResponse out(grid);
    for (std::size_t j = 0; j < grid.size(); ++j) out.points[j] = plan.evaluate<double>(j, c.values());
    return out;
}

}  // namespace fssml::em
