#pragma once

#include "fssml/em.hpp"
#include "fssml/sweep.hpp"

/// Surrogate stand-in for full-wave simulation.
///
/// Each screen k with slot length l_k gets a nominal circuit
///
///     f0_k = f_ref * (l_ref / l_k)^gamma
///     L_k  = z_r / (2 pi f0_k)
///     C_k  = 1 / (2 pi f0_k z_r) * (1 + kappa * exp(-(s - sep_ref) / sep_decay))
///
/// where s is the separation. The simulated screen is richer than the
/// student model: its capacitance is dispersive, C_k(f) = C_k (1 + alpha (f/f_max)^2)
/// with f_max = 16 GHz, and a series-LC branch with capacitance weak * C_k
/// resonating at second_ratio * f0_k sits in parallel with it. Admittances
/// stay purely imaginary and the spacer is lossless, so every response is
/// lossless.
namespace fssml::data {

inline constexpr double kOracleFMax = 16e9;

/// Nominal [L1, C1, L2, C2] of a geometry (the circuit without the
/// dispersion and parasitic branch).
em::CircuitParams nominal_circuit(const Geometry& x, const OracleConfig& cfg);

/// Admittance of one simulated screen at `frequency`.
ComplexScalar oracle_screen_admittance(double inductance, double capacitance, double frequency,
                                       const OracleConfig& cfg);

/// Deterministic "measured" response of a geometry.
em::SResponse oracle_simulate(const Geometry& x, const em::FrequencyGrid& grid, const OracleConfig& cfg);
em::SResponse oracle_simulate(const Geometry& x, const SweepSpec& spec);

}  // namespace fssml::data
