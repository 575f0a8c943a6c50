#include <doctest.h>

#include <functional>
#include <random>

#include "fssml/dual.hpp"
#include "fssml/grad.hpp"
#include "fssml/losses.hpp"
#include "helpers.hpp"

using namespace fssml;
using namespace fssml::em;

namespace {

double central_diff(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

SResponse shifted_target(const CircuitParams& c, const PhysicsPlan& plan, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.9, 1.1);
    std::vector<double> v(c.values().begin(), c.values().end());
    for (double& x : v) x *= u(rng);
    return f_phys(CircuitParams(v), plan.topology(), plan.grid());
}

}  // namespace

TEST_SUITE("grad") {

TEST_CASE("dual arithmetic carries exact derivatives") {
    using D = Dual<2>;
    const D x = D::variable(0.7, 0);
    const D y = D::variable(-1.3, 1);
    const D f = sin(x * y) / (exp(x) + y * y) + sqrt(x) * log(x + 2.0) - cos(y) / x;
    const auto g = [](double a, double b) {
        return std::sin(a * b) / (std::exp(a) + b * b) + std::sqrt(a) * std::log(a + 2.0) - std::cos(b) / a;
    };
    CHECK(f.v == doctest::Approx(g(0.7, -1.3)).epsilon(1e-15));
    const double h = 1e-6;
    CHECK(testing::rel_err(f.d[0], central_diff([&](double a) { return g(a, -1.3); }, 0.7, h)) < 1e-8);
    CHECK(testing::rel_err(f.d[1], central_diff([&](double b) { return g(0.7, b); }, -1.3, h)) < 1e-8);
}

TEST_CASE("dual and plain evaluation give bit-identical values") {
    std::mt19937_64 rng(3);
    const PhysicsPlan plan(Topology::two_screen(9.5e-3), FrequencyGrid::standard());
    for (int trial = 0; trial < 10; ++trial) {
        const CircuitParams c = testing::random_circuit(rng);
        const grad::DualResponse dr = grad::f_phys_dual(c, plan);
        const SResponse s = f_phys(c, plan.topology(), plan.grid());
        for (std::size_t j = 0; j < s.size(); ++j) {
            CHECK(dr.response.points[j].s11 == s.points[j].s11);
            CHECK(dr.response.points[j].s21 == s.points[j].s21);
        }
    }
}

TEST_CASE("single-screen tangent of Re s21 in L matches a central difference") {
    const CircuitParams c({1e-10, 2.5e-12});
    const double f = 9.7e9;
    const FrequencyGrid grid(f, 2.0 * f, 2);
    const grad::DualResponse dr = grad::f_phys_dual(c, testing::single_screen(), grid);
    const double h = 1e-6 * c[0];
    const auto re_s21 = [&](double L) {
        return f_phys(CircuitParams({L, c[1]}), testing::single_screen(), grid).points[0].s21.re;
    };
    const double fd = central_diff(re_s21, c[0], h);
    CHECK(testing::rel_err(dr.jacobian(0, grad::SComponent::ReS21, 0), fd) < 1e-6);
}

TEST_CASE("finite-difference check passes on both default topologies") {
    std::mt19937_64 rng(5);
    const FrequencyGrid grid = FrequencyGrid::standard();
    for (int trial = 0; trial < 10; ++trial) {
        CHECK(grad::finite_diff_check(testing::random_circuit(rng), Topology::two_screen(9.5e-3), grid, 1e-6) < 1e-5);
        CHECK(grad::finite_diff_check(testing::random_circuit(rng, 1), testing::single_screen(), grid, 1e-6) < 1e-5);
    }
}

TEST_CASE("finite-difference check passes on random screens of either kind") {
    std::mt19937_64 rng(6);
    const FrequencyGrid grid = FrequencyGrid::standard();
    for (int trial = 0; trial < 30; ++trial) {
        const testing::Draw d = testing::random_draw(rng);
        CHECK(grad::finite_diff_check(d.c, d.topology, grid, 1e-6) < 1e-5);
    }
}

TEST_CASE("loss gradients match central differences") {
    std::mt19937_64 rng(9);
    const PhysicsPlan plan(Topology::two_screen(9.5e-3), FrequencyGrid::standard());
    for (grad::LossKind kind : {grad::LossKind::Legacy, grad::LossKind::S21Mae, grad::LossKind::PhaseAware}) {
        for (int trial = 0; trial < 5; ++trial) {
            const CircuitParams c = testing::random_circuit(rng);
            const SResponse target = shifted_target(c, plan, rng);
            const grad::LossGradient lg = grad::loss_grad_circuit(c, target, plan, kind);
            for (std::size_t k = 0; k < 4; ++k) {
                const auto loss_at = [&](double v) {
                    std::vector<double> x(c.values().begin(), c.values().end());
                    x[k] = v;
                    return grad::loss_grad_circuit(CircuitParams(x), target, plan, kind).loss;
                };
                const double fd = central_diff(loss_at, c[k], 1e-6 * c[k]);
                // compared in log-parameter units, where all four entries are O(1)
                const double scale = std::max(std::abs(fd), std::abs(lg.grad[k])) * c[k];
                CHECK(std::abs(lg.grad[k] - fd) * c[k] <= 1e-5 * scale + 1e-10);
            }
        }
    }
}

TEST_CASE("loss at the true circuit is zero") {
    std::mt19937_64 rng(13);
    const PhysicsPlan plan(Topology::two_screen(9.5e-3), FrequencyGrid::standard());
    const CircuitParams c = testing::random_circuit(rng);
    const SResponse s = f_phys(c, plan.topology(), plan.grid());
    const grad::LossGradient lg = grad::loss_grad_circuit(c, s, plan, grad::LossKind::PhaseAware);
    CHECK(lg.loss == 0.0);
    for (double g : lg.grad) CHECK(g == 0.0);
}

TEST_CASE("phase-aware loss is invariant to a common phase rotation") {
    std::mt19937_64 rng(17);
    const PhysicsPlan plan(Topology::two_screen(9.5e-3), FrequencyGrid::standard());
    const CircuitParams c = testing::random_circuit(rng);
    const SResponse pred = f_phys(c, plan.topology(), plan.grid());
    SResponse target = shifted_target(c, plan, rng);
    const double before = nn::loss_eq5(std::span(&pred, 1), std::span(&target, 1));
    const ComplexScalar rot{std::cos(0.7), std::sin(0.7)};
    SResponse pr = pred, tr = target;
    for (std::size_t j = 0; j < pr.size(); ++j) {
        pr.points[j].s11 = pr.points[j].s11 * rot;
        pr.points[j].s21 = pr.points[j].s21 * rot;
        tr.points[j].s11 = tr.points[j].s11 * rot;
        tr.points[j].s21 = tr.points[j].s21 * rot;
    }
    CHECK(nn::loss_eq5(std::span(&pr, 1), std::span(&tr, 1)) == doctest::Approx(before).epsilon(1e-12));
}

TEST_CASE("mismatched inputs are rejected") {
    const PhysicsPlan plan(Topology::two_screen(9.5e-3), FrequencyGrid::standard());
    const SResponse other(FrequencyGrid(1e9, 2e9, 11));
    CHECK_THROWS_AS(grad::loss_grad_circuit(CircuitParams({1e-10, 1e-12, 1e-10, 1e-12}), other, plan,
                                            grad::LossKind::S21Mae),
                    UsageError);
    CHECK_THROWS_AS(grad::f_phys_dual(CircuitParams({1e-10, 1e-12}), plan), UsageError);
}

}
