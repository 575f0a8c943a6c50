#pragma once

#include <cstdint>

#include <Eigen/Core>

namespace fssml::nn {

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    AdamConfig config;
    std::uint64_t step = 0;
    Eigen::VectorXd m;  // first moment
    Eigen::VectorXd v;  // second moment

    AdamState() = default;
    AdamState(AdamConfig cfg, Eigen::Index n_params)
        : config(cfg), m(Eigen::VectorXd::Zero(n_params)), v(Eigen::VectorXd::Zero(n_params)) {}
};

struct AdamResult {
    AdamState state;
    Eigen::VectorXd params;
};

/// One bias-corrected Adam step; inputs are left untouched.
AdamResult adam_step(const AdamState& state, const Eigen::VectorXd& params, const Eigen::VectorXd& grads);

/// In-place variant used by the training loops.
void adam_update(AdamState& state, Eigen::VectorXd& params, const Eigen::VectorXd& grads);

}  // namespace fssml::nn
