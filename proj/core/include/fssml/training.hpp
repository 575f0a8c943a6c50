#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fssml/adam.hpp"
#include "fssml/dataset.hpp"
#include "fssml/grad.hpp"
#include "fssml/losses.hpp"
#include "fssml/network.hpp"
#include "fssml/physics_plan.hpp"
#include "fssml/rbfn.hpp"

namespace fssml::nn {

enum class LossSelection { Eq1, Eq2, Eq3, Eq5 };

const char* to_string(LossSelection l);
LossSelection loss_from_string(const std::string& name);

struct PhaseConfig {
    std::size_t epochs = 2000;
    double learning_rate = 1e-3;
    LossSelection loss = LossSelection::Eq2;

    friend bool operator==(const PhaseConfig&, const PhaseConfig&) = default;
};

/// Settings of the direct geometry-to-S baselines.
struct DirectConfig {
    std::vector<std::size_t> hidden_sizes{4, 8, 16, 32, 64, 128, 256, 512};
    std::size_t epochs = 300;
    std::size_t batch_size = 64;
    double learning_rate = 1e-3;
    double dropout = 0.1;

    friend bool operator==(const DirectConfig&, const DirectConfig&) = default;
};

struct TrainingConfig {
    std::uint64_t seed = 0;
    std::vector<std::size_t> hidden_sizes{14, 10};
    Activation hidden_activation = Activation::Tanh;
    PhaseConfig phase1{2000, 1e-3, LossSelection::Eq2};
    PhaseConfig phase2{2000, 1e-3, LossSelection::Eq5};
    std::size_t batch_size = 0;  // 0: full batch
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    CircuitLossForm eq2_form = CircuitLossForm::SquaredL2;
    double margin = 4.0;
    DirectConfig direct;
    RBFNConfig rbfn;

    void validate() const;
    AdamConfig adam(double learning_rate) const { return {learning_rate, beta1, beta2, epsilon}; }
};

struct HistoryRow {
    std::size_t epoch = 0;
    double train = 0.0;
    double test = std::numeric_limits<double>::quiet_NaN();  // NaN without a test split
};

struct LossHistory {
    std::string loss;  // "eq2", "eq5", "mae", ...
    std::vector<HistoryRow> rows;
};

/// Geometry -> circuit MLP plus the statistics needed to use it.
struct ModelBasedModel {
    MLPParams params;
    Normalization norm;

    em::CircuitParams predict_circuit(const data::Geometry& x) const;
    em::SResponse predict(const data::Geometry& x, const em::FrequencyGrid& grid) const;
};

/// Per-sample data prepared once for end-to-end training.
struct PhysicsBatch {
    Eigen::MatrixXd x;  // normalized geometry, d x n
    std::vector<em::CircuitParams> c;
    std::vector<const em::SResponse*> s;
    std::vector<em::PhysicsPlan> plans;

    static PhysicsBatch build(std::span<const data::Sample> samples, const GeometryNormalization& xnorm);
    std::size_t size() const noexcept { return c.size(); }
};

struct Objective {
    double loss = 0.0;
    Eigen::VectorXd grad;  // d loss / d theta
};

/// Mean over `subset` (all samples when empty) of the selected loss and its
/// exact gradient in the MLP parameters. End-to-end losses chain the network
/// backward pass with the forward-mode physics Jacobian.
Objective objective(const ModelBasedModel& model, const PhysicsBatch& batch, LossSelection loss,
                    CircuitLossForm eq2_form = CircuitLossForm::SquaredL2, std::span<const std::size_t> subset = {});

/// Loss only, no gradient.
double evaluate_loss(const ModelBasedModel& model, const PhysicsBatch& batch, LossSelection loss,
                     CircuitLossForm eq2_form = CircuitLossForm::SquaredL2);

struct PhaseResult {
    ModelBasedModel model;
    LossHistory history;
    /// Phase 2 only: test loss of the starting point, of the kept iterate,
    /// and the epoch it came from (0 = the starting point).
    double initial_test = std::numeric_limits<double>::quiet_NaN();
    double best_test = std::numeric_limits<double>::quiet_NaN();
    std::size_t best_epoch = 0;
};

/// Fits normalizations on `train` and minimizes config.phase1.loss from a seeded start.
PhaseResult train_phase1(std::span<const data::Sample> train, std::span<const data::Sample> test,
                         const TrainingConfig& config);

/// Continues from `init` with config.phase2. When `test` is non-empty the
/// iterate with the lowest test loss (the start included) is returned.
PhaseResult train_phase2(std::span<const data::Sample> train, std::span<const data::Sample> test,
                         const ModelBasedModel& init, const TrainingConfig& config);

enum class DirectKind { Dnn, DnnTanh, Rbfn };

const char* to_string(DirectKind k);
DirectKind direct_kind_from_string(const std::string& name);

/// Direct baseline: geometry -> [Re s11, Im s11, Re s21, Im s21] per frequency.
struct DirectModel {
    DirectKind kind = DirectKind::Dnn;
    MLPParams mlp;
    RBFNParams rbfn;
    GeometryNormalization xnorm;
    em::FrequencyGrid grid = em::FrequencyGrid::standard();

    std::size_t n_params() const;
    /// Reconstructed response; the model has no s12/s22 head, so s12 = s21 and s22 = s11.
    em::SResponse predict(const data::Geometry& x) const;
    std::vector<em::SResponse> predict(std::span<const data::Sample> samples) const;
};

struct DirectResult {
    DirectModel model;
    LossHistory history;
};

/// Flattened targets, 4 * N_f x n.
Eigen::MatrixXd direct_targets(std::span<const data::Sample> samples);

DirectResult train_direct(DirectKind kind, std::span<const data::Sample> train, std::span<const data::Sample> test,
                          const TrainingConfig& config);

/// Layer sizes of the geometry -> circuit network for `n_inputs` features and `n_outputs` circuit values.
std::vector<std::size_t> model_layer_sizes(const TrainingConfig& config, std::size_t n_inputs, std::size_t n_outputs);

}  // namespace fssml::nn
