#pragma once

#include <cmath>
#include <span>

#include "fssml/em.hpp"
#include "fssml/network.hpp"

namespace fssml::nn {

/// |s21 - s21_hat| at one frequency.
inline double s21_modulus_term(const em::SPoint& pred, const em::SPoint& target) {
    const double re = pred.s21.re - target.s21.re;
    const double im = pred.s21.im - target.s21.im;
    return std::sqrt(re * re + im * im);
}

/// |s21 - s21_hat|^2 + |s11 - s11_hat|^2 at one frequency.
inline double phase_aware_term(const em::SPoint& pred, const em::SPoint& target) {
    const double r21 = pred.s21.re - target.s21.re;
    const double i21 = pred.s21.im - target.s21.im;
    const double r11 = pred.s11.re - target.s11.re;
    const double i11 = pred.s11.im - target.s11.im;
    return (r21 * r21 + i21 * i21) + (r11 * r11 + i11 * i11);
}

/// Mean over samples and frequencies of |s21 - s21_hat|; the loss used to
/// train circuit-label models before end-to-end training existed.
double loss_eq1(std::span<const em::SResponse> pred, std::span<const em::SResponse> target);

/// End-to-end S21 mean absolute error. Same form as loss_eq1.
double loss_eq3(std::span<const em::SResponse> pred, std::span<const em::SResponse> target);

/// Phase-aware loss: mean of |ds21|^2 + |ds11|^2.
double loss_eq5(std::span<const em::SResponse> pred, std::span<const em::SResponse> target);

enum class CircuitLossForm {
    SquaredL2,  // mean over samples of ||u - u_hat||^2
    Mae,        // mean over samples and entries of |u - u_hat|
};

/// Circuit-label loss in normalized (log-space) units.
double loss_eq2(std::span<const em::CircuitParams> pred, std::span<const em::CircuitParams> target,
                const CircuitNormalization& norm, CircuitLossForm form = CircuitLossForm::SquaredL2);

}  // namespace fssml::nn
