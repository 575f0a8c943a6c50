#include "fssml/extraction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "fssml/errors.hpp"
#include "fssml/grad.hpp"
#include "fssml/physics_plan.hpp"

namespace fssml::data {

namespace {

struct Evaluation {
    Eigen::VectorXd residual;  // [Re ds21 (all points), Im ds21 (all points)]
    Eigen::MatrixXd jacobian;  // d residual / d log c
    double cost = std::numeric_limits<double>::infinity();
};

bool evaluate(const em::PhysicsPlan& plan, const em::SResponse& target, const Eigen::VectorXd& logc,
              Evaluation& out) {
    const std::size_t n = plan.grid().size();
    const std::size_t m = static_cast<std::size_t>(logc.size());
    std::vector<double> values(m);
    for (std::size_t k = 0; k < m; ++k) values[k] = std::exp(logc[static_cast<Eigen::Index>(k)]);
    if (!std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v) && v > 0.0; }))
        return false;
    try {
        const grad::DualResponse d = grad::f_phys_dual(em::CircuitParams(values), plan);
        out.residual.resize(static_cast<Eigen::Index>(2 * n));
        out.jacobian.resize(static_cast<Eigen::Index>(2 * n), static_cast<Eigen::Index>(m));
        for (std::size_t j = 0; j < n; ++j) {
            const auto row_re = static_cast<Eigen::Index>(j);
            const auto row_im = static_cast<Eigen::Index>(n + j);
            out.residual[row_re] = d.response.points[j].s21.re - target.points[j].s21.re;
            out.residual[row_im] = d.response.points[j].s21.im - target.points[j].s21.im;
            for (std::size_t k = 0; k < m; ++k) {
                const auto col = static_cast<Eigen::Index>(k);
                out.jacobian(row_re, col) = d.jacobian(j, grad::SComponent::ReS21, k) * values[k];
                out.jacobian(row_im, col) = d.jacobian(j, grad::SComponent::ImS21, k) * values[k];
            }
        }
    } catch (const SingularNetworkError&) {
        return false;
    }
    out.cost = out.residual.squaredNorm();
    return std::isfinite(out.cost);
}

em::CircuitParams from_log(const Eigen::VectorXd& logc) {
    std::vector<double> v(static_cast<std::size_t>(logc.size()));
    for (Eigen::Index k = 0; k < logc.size(); ++k) v[static_cast<std::size_t>(k)] = std::exp(logc[k]);
    return em::CircuitParams(std::move(v));
}

double reflection_error(const em::PhysicsPlan& plan, const em::SResponse& target, const Eigen::VectorXd& logc) {
    const em::CircuitParams c = from_log(logc);
    double total = 0.0;
    for (std::size_t j = 0; j < target.size(); ++j)
        total += norm(plan.evaluate<double>(j, c.values()).s11 - target.points[j].s11);
    return total;
}

}  // namespace

ExtractionResult extract_circuit_params(const em::SResponse& s, const em::Topology& topology,
                                        const em::FrequencyGrid& grid, const em::CircuitParams& init,
                                        const ExtractionOptions& options) {
    topology.validate();
    if (!(s.grid == grid)) throw UsageError("response grid differs from the extraction grid");
    if (init.size() != topology.n_params()) throw UsageError("initial circuit does not match the topology");

    const em::PhysicsPlan plan(topology, grid);
    const auto m = static_cast<Eigen::Index>(init.size());
    Eigen::VectorXd logc(m);
    for (Eigen::Index k = 0; k < m; ++k) logc[k] = std::log(init[static_cast<std::size_t>(k)]);

    Evaluation cur;
    if (!evaluate(plan, s, logc, cur)) throw DomainError("extraction start point cannot be evaluated");

    ExtractionResult result;
    double damping = options.initial_damping;
    std::size_t it = 0;
    for (; it < options.max_iterations; ++it) {
        const Eigen::VectorXd g = cur.jacobian.transpose() * cur.residual;
        if (2.0 * g.norm() < options.gradient_tolerance) {
            result.converged = true;
            break;
        }
        const Eigen::MatrixXd h = cur.jacobian.transpose() * cur.jacobian;
        bool accepted = false;
        while (damping <= options.max_damping) {
            Eigen::MatrixXd a = h;
            a.diagonal() += damping * h.diagonal() + Eigen::VectorXd::Constant(m, 1e-30);
            const Eigen::VectorXd step = a.ldlt().solve(-g);
            Evaluation trial;
            if (step.allFinite() && evaluate(plan, s, logc + step, trial) && trial.cost < cur.cost) {
                logc += step;
                cur = std::move(trial);
                damping = std::max(damping / 3.0, 1e-12);
                accepted = true;
                break;
            }
            damping *= 4.0;
        }
        if (!accepted) break;
    }

    // Two screens of one kind give the same s21 in either order; keep the
    // order whose s11 (not part of the fit) is closer to the target.
    if (topology.screens.size() == 2 && topology.screens[0] == topology.screens[1]) {
        Eigen::VectorXd swapped(4);
        swapped << logc[2], logc[3], logc[0], logc[1];
        Evaluation other;
        if (evaluate(plan, s, swapped, other) &&
            reflection_error(plan, s, swapped) < reflection_error(plan, s, logc)) {
            logc = swapped;
            cur = std::move(other);
        }
    }

    result.c = from_log(logc);
    result.residual = cur.cost;
    const std::size_t n = grid.size();
    double mae = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        mae += std::hypot(cur.residual[static_cast<Eigen::Index>(j)], cur.residual[static_cast<Eigen::Index>(n + j)]);
    result.mean_abs_error = mae / static_cast<double>(n);
    result.iterations = it;
    return result;
}

em::CircuitParams resonance_init(const em::SResponse& s, const em::Topology& topology, double asymmetry) {
    topology.validate();
    const std::size_t n = s.size();
    if (n < 3) throw UsageError("resonance_init needs at least 3 grid points");

    const bool band_stop = topology.screens.front() == em::ResonatorKind::SeriesLC;
    // Band-pass: look for the transmission peak. Band-stop: the reflection peak.
    std::vector<double> m2(n);
    for (std::size_t j = 0; j < n; ++j) m2[j] = band_stop ? norm(s.points[j].s11) : norm(s.points[j].s21);

    const double peak = *std::max_element(m2.begin(), m2.end());
    std::size_t i = static_cast<std::size_t>(std::max_element(m2.begin(), m2.end()) - m2.begin());
    for (std::size_t k = 1; k + 1 < n; ++k) {
        if (m2[k] >= 0.5 * peak && m2[k] >= m2[k - 1] && m2[k] >= m2[k + 1]) {
            i = k;
            break;
        }
    }
    const double half = 0.5 * m2[i];
    std::size_t lo = i;
    while (lo > 0 && m2[lo] > half) --lo;
    std::size_t hi = i;
    while (hi + 1 < n && m2[hi] > half) ++hi;

    const double fp = s.grid[i];
    const double fbw = std::max((s.grid[hi] - s.grid[lo]) / fp, 0.01);
    const double w0 = 2.0 * em::kPi * fp;
    const double z_ref = em::kFreeSpaceImpedance / std::sqrt(topology.port_eps_r);
    // Shunt parallel LC between z0 ports: half-power fractional bandwidth 2 / (z0 w0 C).
    // Shunt series LC: the stop band spans |X| < z0 / 2, i.e. FBW = z0 / (2 w0 L).
    double cap = 2.0 / (z_ref * w0 * fbw);
    double ind = 1.0 / (w0 * w0 * cap);
    if (band_stop) {
        ind = z_ref / (2.0 * w0 * fbw);
        cap = 1.0 / (w0 * w0 * ind);
    }

    const std::size_t screens = topology.n_screens();
    std::vector<double> c;
    for (std::size_t k = 0; k < screens; ++k) {
        const double shift =
            screens > 1 ? asymmetry * (1.0 - 2.0 * static_cast<double>(k) / static_cast<double>(screens - 1)) : 0.0;
        c.push_back(ind * std::exp(shift));
        c.push_back(cap * std::exp(shift));
    }
    return em::CircuitParams(std::move(c));
}

}  // namespace fssml::data
