#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fssml/em.hpp"

/// Dense networks: the geometry-to-circuit MLP and the direct S-parameter
/// baselines share this representation.
namespace fssml::nn {

enum class Activation { Tanh, Relu, Softplus, Identity };

const char* to_string(Activation a);
Activation activation_from_string(const std::string& name);

/// Fully connected network. All learnable scalars live in `theta`; layer k
/// stores its weight matrix (out x in, column-major) followed by its bias.
struct MLPParams {
    std::vector<std::size_t> layer_sizes;
    Activation hidden = Activation::Tanh;
    Activation output = Activation::Softplus;
    Eigen::VectorXd theta;

    MLPParams() = default;
    MLPParams(std::vector<std::size_t> sizes, Activation hidden_act, Activation output_act);

    /// Glorot-uniform weights (He-uniform under ReLU), zero biases.
    static MLPParams random(std::vector<std::size_t> sizes, Activation hidden_act, Activation output_act,
                            std::uint64_t seed);

    std::size_t n_layers() const noexcept { return layer_sizes.size() - 1; }
    std::size_t input_size() const { return layer_sizes.front(); }
    std::size_t output_size() const { return layer_sizes.back(); }

    Eigen::Map<const Eigen::MatrixXd> weight(std::size_t layer) const;
    Eigen::Map<Eigen::MatrixXd> weight(std::size_t layer);
    Eigen::Map<const Eigen::VectorXd> bias(std::size_t layer) const;
    Eigen::Map<Eigen::VectorXd> bias(std::size_t layer);

    std::size_t weight_offset(std::size_t layer) const;
    std::size_t bias_offset(std::size_t layer) const { return weight_offset(layer) + layer_sizes[layer] * layer_sizes[layer + 1]; }
};

/// Sum over layers of in*out + out.
std::size_t count_params(const MLPParams& p);

/// Intermediate values of a batched forward pass, kept for backprop.
struct ForwardCache {
    std::vector<Eigen::MatrixXd> inputs;       // input to each layer (columns are samples)
    std::vector<Eigen::MatrixXd> preacts;      // W x + b of each layer
    std::vector<Eigen::MatrixXd> dropout;      // per hidden layer mask already scaled by 1/(1-p); empty if off
};

struct DropoutConfig {
    double rate = 0.0;
    std::mt19937_64* rng = nullptr;  // required when rate > 0
};

/// Batched forward pass; columns of `x` are samples.
Eigen::MatrixXd forward(const MLPParams& p, const Eigen::MatrixXd& x, ForwardCache* cache = nullptr,
                        DropoutConfig dropout = {});

/// Gradient of sum_ij upstream(i,j) * out(i,j) with respect to theta.
Eigen::VectorXd backward(const MLPParams& p, const ForwardCache& cache, const Eigen::MatrixXd& upstream);

/// Zero-mean, unit-variance scaling of geometry features.
struct GeometryNormalization {
    Eigen::VectorXd mean;
    Eigen::VectorXd stddev;

    static GeometryNormalization fit(const Eigen::MatrixXd& x);  // columns are samples
    Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
    Eigen::VectorXd apply(std::span<const double> x) const;
};

/// Circuit values are learned in log space: u = (log c - log_mean) / log_std + margin.
/// The margin keeps every training target comfortably inside the range of
/// the softplus output head.
struct CircuitNormalization {
    Eigen::VectorXd log_mean;
    Eigen::VectorXd log_std;
    double margin = 4.0;

    static CircuitNormalization fit(std::span<const em::CircuitParams> cs, double margin = 4.0);
    Eigen::VectorXd to_unit(const em::CircuitParams& c) const;
    em::CircuitParams from_unit(const Eigen::VectorXd& u) const;
    /// dc_k/du_k at the given circuit value.
    Eigen::VectorXd jacobian_diag(const em::CircuitParams& c) const;
};

struct Normalization {
    GeometryNormalization x;
    CircuitNormalization c;
};

/// Geometry vector to strictly positive circuit parameters.
em::CircuitParams mlp_forward(const MLPParams& p, std::span<const double> x, const Normalization& norm);

/// Gradient in theta of <upstream, c(x)>, where upstream = dLoss/dc.
Eigen::VectorXd mlp_backward(const MLPParams& p, std::span<const double> x, const Normalization& norm,
                             std::span<const double> upstream);

}  // namespace fssml::nn
