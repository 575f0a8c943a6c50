#pragma once

#include <cstddef>
#include <cstdint>

#include <Eigen/Core>

namespace fssml::nn {

struct RBFNConfig {
    std::size_t n_centers = 200;   // clamped to the number of training points
    double width_scale = 1.0;      // width_k = width_scale * distance to the nearest other center
    double ridge = 1e-6;           // Tikhonov weight on output weights and bias
    std::size_t kmeans_iterations = 100;

    void validate() const;
};

/// Gaussian radial basis network: phi_k(x) = exp(-|x - c_k|^2 / (2 w_k^2)),
/// y = W phi(x) + b.
struct RBFNParams {
    Eigen::MatrixXd centers;  // n_centers x d
    Eigen::VectorXd widths;   // n_centers
    Eigen::MatrixXd weights;  // n_outputs x n_centers
    Eigen::VectorXd bias;     // n_outputs

    std::size_t n_centers() const noexcept { return static_cast<std::size_t>(centers.rows()); }
};

std::size_t count_params(const RBFNParams& p);

/// Seeded k-means++ followed by Lloyd iterations. Columns of `x` are points.
/// Returns centers as rows.
Eigen::MatrixXd kmeans(const Eigen::MatrixXd& x, std::size_t k, std::uint64_t seed, std::size_t iterations);

/// Centers by k-means on `x` (d x n), widths from center spacing, then
/// regularized least squares for the readout against `y` (n_outputs x n).
RBFNParams fit_rbfn(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const RBFNConfig& config, std::uint64_t seed);

/// n_centers x n matrix of basis activations.
Eigen::MatrixXd rbfn_features(const RBFNParams& p, const Eigen::MatrixXd& x);

/// Outputs for the columns of `x`.
Eigen::MatrixXd rbfn_predict(const RBFNParams& p, const Eigen::MatrixXd& x);

}  // namespace fssml::nn
