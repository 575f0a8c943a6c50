#include "fssml/adam.hpp"

#include <cmath>

#include "fssml/errors.hpp"

namespace fssml::nn {

void adam_update(AdamState& state, Eigen::VectorXd& params, const Eigen::VectorXd& grads) {
    if (params.size() != grads.size() || state.m.size() != params.size() || state.v.size() != params.size()) {
        throw UsageError("Adam state, parameters and gradients must have the same length");
    }
    const AdamConfig& cfg = state.config;
    state.step += 1;
    const double t = static_cast<double>(state.step);
    const double bc1 = 1.0 - std::pow(cfg.beta1, t);
    const double bc2 = 1.0 - std::pow(cfg.beta2, t);
    state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * grads;
    state.v = cfg.beta2 * state.v + (1.0 - cfg.beta2) * grads.cwiseProduct(grads);
    params.array() -= cfg.learning_rate * (state.m.array() / bc1) / ((state.v.array() / bc2).sqrt() + cfg.epsilon);
}

AdamResult adam_step(const AdamState& state, const Eigen::VectorXd& params, const Eigen::VectorXd& grads) {
    AdamResult r{state, params};
    adam_update(r.state, r.params, grads);
    return r;
}

}  // namespace fssml::nn
