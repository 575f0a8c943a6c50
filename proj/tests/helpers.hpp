#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "fssml/em.hpp"

namespace testing {

/// Circuit with resonances spread over the standard band.
inline fssml::em::CircuitParams random_circuit(std::mt19937_64& rng, std::size_t n_screens = 2) {
    std::uniform_real_distribution<double> f0(7e9, 15e9);
    std::uniform_real_distribution<double> zr(std::log(3.0), std::log(300.0));
    std::vector<double> v;
    for (std::size_t k = 0; k < n_screens; ++k) {
        const double w0 = 2.0 * fssml::em::kPi * f0(rng);
        const double z = std::exp(zr(rng));
        v.push_back(z / w0);
        v.push_back(1.0 / (w0 * z));
    }
    return fssml::em::CircuitParams(std::move(v));
}

/// L log-uniform in [0.1, 10] nH and C log-uniform in [0.01, 1] pF per screen.
inline fssml::em::CircuitParams random_lc(std::mt19937_64& rng, std::size_t n_screens) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v;
    for (std::size_t k = 0; k < n_screens; ++k) {
        v.push_back(1e-10 * std::pow(100.0, u(rng)));
        v.push_back(1e-14 * std::pow(100.0, u(rng)));
    }
    return fssml::em::CircuitParams(std::move(v));
}

struct Draw {
    fssml::em::CircuitParams c;
    fssml::em::Topology topology;
};

/// One or two screens of random kind with random_lc values, spacer 1-20 mm.
inline Draw random_draw(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Draw d;
    const std::size_t n = u(rng) < 0.5 ? 1 : 2;
    for (std::size_t k = 0; k < n; ++k)
        d.topology.screens.push_back(u(rng) < 0.5 ? fssml::em::ResonatorKind::ParallelLC
                                                  : fssml::em::ResonatorKind::SeriesLC);
    if (n == 2) d.topology.spacers.push_back(fssml::em::Spacer{1.0, 1e-3 * std::pow(20.0, u(rng))});
    d.c = random_lc(rng, n);
    return d;
}

inline fssml::em::Topology single_screen() {
    fssml::em::Topology t;
    t.screens = {fssml::em::ResonatorKind::ParallelLC};
    return t;
}

inline double rel_err(double a, double b, double floor = 1e-300) {
    return std::abs(a - b) / std::max(std::max(std::abs(a), std::abs(b)), floor);
}

}  // namespace testing
