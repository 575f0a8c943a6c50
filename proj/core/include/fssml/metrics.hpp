#pragma once

#include <span>

#include "fssml/em.hpp"

namespace fssml::eval {

enum class Port { S11, S21 };

/// Mean over samples and frequencies of |pred - target| for the chosen parameter.
double mae_complex(std::span<const em::SResponse> pred, std::span<const em::SResponse> target, Port which);

/// Mean over samples and frequencies of ||pred| - |target||.
double mae_magnitude(std::span<const em::SResponse> pred, std::span<const em::SResponse> target, Port which);

/// Max over samples and frequencies of | |s11|^2 + |s21|^2 - 1 |.
double power_residual(std::span<const em::SResponse> pred);

/// (1/N) sum_j (|s21|_{j+1} - 2 |s21|_j + |s21|_{j-1})^2 over the N grid points.
double smoothness(const em::SResponse& pred);

/// Mean of smoothness() over a set.
double mean_smoothness(std::span<const em::SResponse> pred);

}  // namespace fssml::eval
