#include "fssml/oracle.hpp"

#include <array>
#include <cmath>

#include "fssml/errors.hpp"

namespace fssml::data {

em::CircuitParams nominal_circuit(const Geometry& x, const OracleConfig& cfg) {
    cfg.validate();
    if (!(x.slot_length > 0.0 && x.slot_length_2 > 0.0 && x.separation > 0.0))
        throw DomainError("geometry entries must be positive");
    const double loading = 1.0 + cfg.kappa * std::exp(-(x.separation - cfg.sep_ref) / cfg.sep_decay);
    std::vector<double> c;
    for (double l : {x.slot_length, x.slot_length_2}) {
        const double f0 = cfg.f_ref * std::pow(cfg.l_ref / l, cfg.gamma);
        const double w0 = 2.0 * em::kPi * f0;
        c.push_back(cfg.z_r / w0);
        c.push_back(loading / (w0 * cfg.z_r));
    }
    return em::CircuitParams(std::move(c));
}

ComplexScalar oracle_screen_admittance(double inductance, double capacitance, double frequency,
                                       const OracleConfig& cfg) {
    const double w = 2.0 * em::kPi * frequency;
    const double ratio = frequency / kOracleFMax;
    const double cf = capacitance * (1.0 + cfg.alpha * ratio * ratio);
    double b = w * cf - 1.0 / (w * inductance);
    if (cfg.weak > 0.0) {
        const double w0 = 1.0 / std::sqrt(inductance * capacitance);
        const double w2 = cfg.second_ratio * w0;
        const double cb = cfg.weak * capacitance;
        const double lb = 1.0 / (w2 * w2 * cb);
        // 1 / (j X) = -j / X
        const double x = w * lb - 1.0 / (w * cb);
        if (x == 0.0) throw PoleError("oracle parasitic branch evaluated at its resonance");
        b -= 1.0 / x;
    }
    return {0.0, b};
}

em::SResponse oracle_simulate(const Geometry& x, const em::FrequencyGrid& grid, const OracleConfig& cfg) {
    const em::CircuitParams c = nominal_circuit(x, cfg);
    const double sep = x.separation * 1e-3;
    em::SResponse out(grid);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double f = grid[j];
        const std::array<em::ABCDMatrix, 3> chain{
            em::abcd_shunt(oracle_screen_admittance(c.inductance(0), c.capacitance(0), f, cfg)),
            em::abcd_line(sep, 1.0, f),
            em::abcd_shunt(oracle_screen_admittance(c.inductance(1), c.capacitance(1), f, cfg)),
        };
        out.points[j] = em::abcd_to_s(em::cascade(chain), em::kFreeSpaceImpedance);
    }
    return out;
}

em::SResponse oracle_simulate(const Geometry& x, const SweepSpec& spec) {
    return oracle_simulate(x, spec.grid, spec.oracle);
}

}  // namespace fssml::data
