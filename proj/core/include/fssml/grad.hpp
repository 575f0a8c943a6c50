#pragma once

#include <cstddef>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

#include "fssml/dual.hpp"
#include "fssml/em.hpp"
#include "fssml/errors.hpp"
#include "fssml/physics_plan.hpp"

/// Exact derivatives of the circuit physics with respect to the circuit
/// vector, computed in forward mode with one tangent per parameter.
namespace fssml::grad {

template <std::size_t N>
using DualScalar = Dual<N>;

/// Largest circuit vector (8 screens) with a compiled dual instantiation.
inline constexpr std::size_t kMaxTangents = 16;

enum class SComponent : std::size_t { ReS11 = 0, ImS11 = 1, ReS21 = 2, ImS21 = 3 };

/// dS/dc over a grid: n_points x 4 x n_params, per unit (H or F) of each
/// circuit parameter.
class PhysicsJacobian {
public:
    PhysicsJacobian(em::FrequencyGrid grid, std::size_t n_params)
        : grid_(grid), n_params_(n_params), entries_(grid.size() * 4 * n_params, 0.0) {}

    const em::FrequencyGrid& grid() const noexcept { return grid_; }
    std::size_t n_params() const noexcept { return n_params_; }
    std::size_t n_points() const noexcept { return grid_.size(); }

    double& operator()(std::size_t point, SComponent comp, std::size_t param) {
        return entries_[(point * 4 + static_cast<std::size_t>(comp)) * n_params_ + param];
    }
    double operator()(std::size_t point, SComponent comp, std::size_t param) const {
        return entries_[(point * 4 + static_cast<std::size_t>(comp)) * n_params_ + param];
    }

private:
    em::FrequencyGrid grid_;
    std::size_t n_params_;
    std::vector<double> entries_;
};

struct DualResponse {
    em::SResponse response;
    PhysicsJacobian jacobian;
};

/// f_phys together with its Jacobian. The response is bit-identical to
/// em::f_phys on the same inputs.
DualResponse f_phys_dual(const em::CircuitParams& c, const em::Topology& topology, const em::FrequencyGrid& grid,
                         double z0_free = em::kFreeSpaceImpedance);
DualResponse f_phys_dual(const em::CircuitParams& c, const em::PhysicsPlan& plan);

enum class LossKind {
    Legacy,      // mean |s21 - s21_hat| as used by earlier circuit-label training
    S21Mae,      // same form, applied end to end
    PhaseAware,  // mean |s21 - s21_hat|^2 + |s11 - s11_hat|^2
};

struct LossGradient {
    double loss = 0.0;
    std::vector<double> grad;  // dLoss/dc, per H or F
};

/// Per-sample loss of f_phys(c) against `target` and its gradient in c.
/// MAE terms use subgradient 0 at exactly zero residual.
LossGradient loss_grad_circuit(const em::CircuitParams& c, const em::SResponse& target,
                               const em::Topology& topology, const em::FrequencyGrid& grid, LossKind kind,
                               double z0_free = em::kFreeSpaceImpedance);
LossGradient loss_grad_circuit(const em::CircuitParams& c, const em::SResponse& target,
                               const em::PhysicsPlan& plan, LossKind kind);
LossGradient loss_grad_circuit(std::span<const double> c, const em::SResponse& target,
                               const em::PhysicsPlan& plan, LossKind kind);

/// Max over all Jacobian entries of |analytic - central difference|, each
/// divided by the largest |analytic| entry in its parameter's column.
/// Parameter k is perturbed by `step * c_k`.
double finite_diff_check(const em::CircuitParams& c, const em::Topology& topology, const em::FrequencyGrid& grid,
                         double step, double z0_free = em::kFreeSpaceImpedance);

/// Calls `fn(std::integral_constant<std::size_t, N>{})` for the compiled
/// tangent count N equal to `n`.
template <class Fn>
decltype(auto) with_tangent_count(std::size_t n, Fn&& fn) {
    switch (n) {
        case 2: return fn(std::integral_constant<std::size_t, 2>{});
        case 4: return fn(std::integral_constant<std::size_t, 4>{});
        case 6: return fn(std::integral_constant<std::size_t, 6>{});
        case 8: return fn(std::integral_constant<std::size_t, 8>{});
        case 10: return fn(std::integral_constant<std::size_t, 10>{});
        case 12: return fn(std::integral_constant<std::size_t, 12>{});
        case 14: return fn(std::integral_constant<std::size_t, 14>{});
        case 16: return fn(std::integral_constant<std::size_t, 16>{});
        default: throw UsageError("unsupported circuit vector length for dual evaluation");
    }
}

/// Seeds `c` as N independent dual variables.
template <std::size_t N>
std::array<Dual<N>, N> seed(std::span<const double> c) {
    std::array<Dual<N>, N> out;
    for (std::size_t k = 0; k < N; ++k) out[k] = Dual<N>::variable(c[k], k);
    return out;
}

}  // namespace fssml::grad
