#pragma once

#include <cstddef>

#include "fssml/em.hpp"

namespace fssml::data {

struct ExtractionOptions {
    std::size_t max_iterations = 5000;
    double gradient_tolerance = 1e-9;  // on the log-space gradient of the residual
    double initial_damping = 1e-3;
    double max_damping = 1e12;
};

struct ExtractionResult {
    em::CircuitParams c;
    /// Sum over grid points of |s21 - s21_hat|^2 at the returned iterate.
    double residual = 0.0;
    /// Mean |s21 - s21_hat| at the returned iterate.
    double mean_abs_error = 0.0;
    std::size_t iterations = 0;
    /// False when the iteration cap or the damping cap ended the fit.
    bool converged = false;
};

/// Least-squares fit of the circuit to the transmission response, in
/// log-parameters, by damped Gauss-Newton (Levenberg-Marquardt) steps built
/// from the forward-mode Jacobian. Always returns the best iterate seen.
/// For two screens of one kind the screen order is then picked by s11.
ExtractionResult extract_circuit_params(const em::SResponse& s, const em::Topology& topology,
                                        const em::FrequencyGrid& grid, const em::CircuitParams& init,
                                        const ExtractionOptions& options = {});

/// Starting point read off the response: the lowest-frequency |s21|^2 peak
/// above half the maximum (or the deepest notch for band-stop screens)
/// gives f0 and the half-power bandwidth, and every screen starts from
/// C = 2 / (z0 w0 FBW), L = 1 / (w0^2 C). Screens are then nudged apart by
/// +/- `asymmetry` in log-space, first screen up, so that a symmetric
/// start does not sit on the screen-swap saddle.
em::CircuitParams resonance_init(const em::SResponse& s, const em::Topology& topology, double asymmetry = 0.01);

}  // namespace fssml::data
