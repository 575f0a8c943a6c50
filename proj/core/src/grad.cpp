#include "fssml/grad.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fssml/losses.hpp"

namespace fssml::grad {

namespace {

void check_grid(const em::SResponse& target, const em::PhysicsPlan& plan) {
    if (!(target.grid == plan.grid())) throw UsageError("target response is on a different frequency grid");
}

void check_size(std::size_t n, const em::PhysicsPlan& plan) {
    if (n != plan.n_params()) {
        throw UsageError("circuit vector has " + std::to_string(n) + " entries, topology needs " +
                         std::to_string(plan.n_params()));
    }
}

template <std::size_t N>
DualResponse evaluate_dual(std::span<const double> c, const em::PhysicsPlan& plan) {
    const auto x = seed<N>(c);
    const std::span<const Dual<N>> xs(x);
    DualResponse out{em::SResponse(plan.grid()), PhysicsJacobian(plan.grid(), N)};
    for (std::size_t j = 0; j < plan.grid().size(); ++j) {
        const em::SPointT<Dual<N>> s = plan.evaluate<Dual<N>>(j, xs);
        out.response.points[j] = em::SPoint{{s.s11.re.v, s.s11.im.v},
                                            {s.s21.re.v, s.s21.im.v},
                                            {s.s12.re.v, s.s12.im.v},
                                            {s.s22.re.v, s.s22.im.v}};
        for (std::size_t k = 0; k < N; ++k) {
            out.jacobian(j, SComponent::ReS11, k) = s.s11.re.d[k];
            out.jacobian(j, SComponent::ImS11, k) = s.s11.im.d[k];
            out.jacobian(j, SComponent::ReS21, k) = s.s21.re.d[k];
            out.jacobian(j, SComponent::ImS21, k) = s.s21.im.d[k];
        }
    }
    return out;
}

// Accumulates d|r| = (re dre + im dim) / |r|; zero residual contributes 0.
template <std::size_t N>
void add_modulus_grad(const Complex<Dual<N>>& r, double scale, std::vector<double>& grad) {
    const double m = std::sqrt(r.re.v * r.re.v + r.im.v * r.im.v);
    if (m == 0.0) return;
    const double a = scale * r.re.v / m;
    const double b = scale * r.im.v / m;
    for (std::size_t k = 0; k < N; ++k) grad[k] += a * r.re.d[k] + b * r.im.d[k];
}

template <std::size_t N>
void add_norm_grad(const Complex<Dual<N>>& r, double scale, std::vector<double>& grad) {
    const double a = 2.0 * scale * r.re.v;
    const double b = 2.0 * scale * r.im.v;
    for (std::size_t k = 0; k < N; ++k) grad[k] += a * r.re.d[k] + b * r.im.d[k];
}

template <std::size_t N>
LossGradient loss_grad_impl(std::span<const double> c, const em::SResponse& target, const em::PhysicsPlan& plan,
                            LossKind kind) {
    const auto x = seed<N>(c);
    const std::span<const Dual<N>> xs(x);
    const std::size_t n_f = plan.grid().size();
    const double scale = 1.0 / static_cast<double>(n_f);

    LossGradient out;
    out.grad.assign(N, 0.0);
    double sum = 0.0;
    for (std::size_t j = 0; j < n_f; ++j) {
        const em::SPointT<Dual<N>> s = plan.evaluate<Dual<N>>(j, xs);
        const em::SPoint& t = target.points[j];
        const Complex<Dual<N>> r21 = s.s21 - t.s21;
        const em::SPoint primal{{s.s11.re.v, s.s11.im.v}, {s.s21.re.v, s.s21.im.v}, {}, {}};
        if (kind == LossKind::PhaseAware) {
            const Complex<Dual<N>> r11 = s.s11 - t.s11;
            sum += nn::phase_aware_term(primal, t);
            add_norm_grad(r21, scale, out.grad);
            add_norm_grad(r11, scale, out.grad);
        } else {
            sum += nn::s21_modulus_term(primal, t);
            add_modulus_grad(r21, scale, out.grad);
        }
    }
    out.loss = sum / static_cast<double>(n_f);
    return out;
}

}  // namespace

DualResponse f_phys_dual(const em::CircuitParams& c, const em::PhysicsPlan& plan) {
    check_size(c.size(), plan);
    return with_tangent_count(c.size(), [&](auto n) { return evaluate_dual<decltype(n)::value>(c.values(), plan); });
}

DualResponse f_phys_dual(const em::CircuitParams& c, const em::Topology& topology, const em::FrequencyGrid& grid,
                         double z0_free) {
    check_size(c.size(), em::PhysicsPlan(topology, grid, z0_free));
    return f_phys_dual(c, em::PhysicsPlan(topology, grid, z0_free));
}

LossGradient loss_grad_circuit(std::span<const double> c, const em::SResponse& target, const em::PhysicsPlan& plan,
                               LossKind kind) {
    check_size(c.size(), plan);
    check_grid(target, plan);
    return with_tangent_count(c.size(),
                              [&](auto n) { return loss_grad_impl<decltype(n)::value>(c, target, plan, kind); });
}

LossGradient loss_grad_circuit(const em::CircuitParams& c, const em::SResponse& target, const em::PhysicsPlan& plan,
                               LossKind kind) {
    return loss_grad_circuit(c.values(), target, plan, kind);
}

LossGradient loss_grad_circuit(const em::CircuitParams& c, const em::SResponse& target,
                               const em::Topology& topology, const em::FrequencyGrid& grid, LossKind kind,
                               double z0_free) {
    return loss_grad_circuit(c.values(), target, em::PhysicsPlan(topology, grid, z0_free), kind);
}

double finite_diff_check(const em::CircuitParams& c, const em::Topology& topology, const em::FrequencyGrid& grid,
                         double step, double z0_free) {
    constexpr double kFloor = 1e-300;
    const em::PhysicsPlan plan(topology, grid, z0_free);
    const DualResponse analytic = f_phys_dual(c, plan);

    std::vector<double> values(c.values().begin(), c.values().end());
    double worst = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
        double scale = kFloor;
        for (std::size_t j = 0; j < grid.size(); ++j)
            for (std::size_t comp = 0; comp < 4; ++comp)
                scale = std::max(scale, std::abs(analytic.jacobian(j, static_cast<SComponent>(comp), k)));
        const double h = step * values[k];
        std::vector<double> up = values;
        std::vector<double> down = values;
        up[k] += h;
        down[k] -= h;
        const double width = up[k] - down[k];
        for (std::size_t j = 0; j < grid.size(); ++j) {
            const em::SPoint sp = plan.evaluate<double>(j, std::span<const double>(up));
            const em::SPoint sm = plan.evaluate<double>(j, std::span<const double>(down));
            const double fd[4] = {(sp.s11.re - sm.s11.re) / width, (sp.s11.im - sm.s11.im) / width,
                                  (sp.s21.re - sm.s21.re) / width, (sp.s21.im - sm.s21.im) / width};
            for (std::size_t comp = 0; comp < 4; ++comp) {
                const double a = analytic.jacobian(j, static_cast<SComponent>(comp), k);
                worst = std::max(worst, std::abs(a - fd[comp]) / scale);
            }
        }
    }
    return worst;
}

}  // namespace fssml::grad
