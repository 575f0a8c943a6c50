#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "fssml/em.hpp"

namespace fssml::data {

/// Two-screen slot FSS geometry in millimetres.
struct Geometry {
    double slot_length = 0.0;
    double separation = 0.0;
    double slot_length_2 = 0.0;

    static constexpr std::size_t kDim = 3;

    std::array<double, kDim> values() const { return {slot_length, separation, slot_length_2}; }
    static Geometry from(std::span<const double> v);

    friend bool operator==(const Geometry&, const Geometry&) = default;
};

struct SweepDimension {
    double min = 0.0;
    double max = 0.0;
    std::size_t n_levels = 1;

    /// Level i of n, evenly spaced and endpoint-inclusive; a single level sits at `min`.
    double level(std::size_t i) const;

    friend bool operator==(const SweepDimension&, const SweepDimension&) = default;
};

/// Constants of the surrogate "measurement" used in place of a full-wave
/// solver. See oracle.hpp for the formulas.
struct OracleConfig {
    double alpha = 0.02;          // dispersion of the screen capacitance
    double weak = 0.005;          // strength of the parasitic second resonance
    double second_ratio = 1.9;    // parasitic resonance / main resonance
    double f_ref = 10.2e9;        // Hz, main resonance at l_ref
    double l_ref = 14.825;        // mm
    double gamma = 10.0;          // f0 ~ l^-gamma
    double z_r = 100.0;           // ohm, sqrt(L/C) of each screen
    double kappa = 0.15;          // near-field loading of C at the smallest gap
    double sep_ref = 8.79;        // mm
    double sep_decay = 1.5;       // mm

    void validate() const;

    friend bool operator==(const OracleConfig&, const OracleConfig&) = default;
};

struct SweepSpec {
    SweepDimension slot_length{14.75, 14.9, 9};
    SweepDimension separation{8.79, 10.3, 9};
    SweepDimension slot_length_2{14.75, 14.9, 9};
    em::FrequencyGrid grid = em::FrequencyGrid::standard();
    OracleConfig oracle;

    void validate() const;
    std::size_t size() const noexcept { return slot_length.n_levels * separation.n_levels * slot_length_2.n_levels; }
    bool contains(const Geometry& x) const;

    friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

/// Full factorial grid. slot_length varies slowest, slot_length_2 fastest.
std::vector<Geometry> generate_sweep(const SweepSpec& spec);

/// Circuit topology of a geometry: two slot screens, air gap of `separation`.
em::Topology geometry_topology(const Geometry& x);

}  // namespace fssml::data
