#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fssml/dataset.hpp"
#include "fssml/training.hpp"

namespace fssml::eval {

struct ExperimentConfig {
    nn::TrainingConfig training;
    double train_fraction = 0.8;
    std::uint64_t split_seed = 0;
    std::vector<double> fractions{0.1, 0.3, 0.5, 0.7, 0.9};
    /// Models trained for the generalization curve.
    std::vector<std::string> curve_models{"model-based", "dnn", "dnn-tanh", "rbfn"};
};

struct ModelRow {
    std::string model;
    double test_mae_s21_complex = 0.0;
    double test_mae_s11_complex = 0.0;
    double test_mae_s21_magnitude = 0.0;
    double power_residual = 0.0;
    std::size_t n_params = 0;
    double train_seconds = 0.0;  // wall clock, not reproducible
    double smoothness = 0.0;     // mean over test predictions
};

struct CurvePoint {
    double fraction = 0.0;
    std::string model;
    double test_mae_s21_complex = 0.0;
};

struct EvalReport {
    std::vector<ModelRow> rows;
    std::vector<CurvePoint> curve;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    nlohmann::json config = nlohmann::json::object();
};

/// Metrics of a set of predictions against the test targets.
ModelRow score(const std::string& model, std::span<const em::SResponse> pred, std::span<const data::Sample> test,
               std::size_t n_params, double seconds);

/// One trained model-based pipeline (phase 1 then phase 2).
struct ModelBasedRun {
    nn::PhaseResult phase1;
    nn::PhaseResult phase2;
    double seconds = 0.0;
};
ModelBasedRun train_model_based(std::span<const data::Sample> train, std::span<const data::Sample> test,
                                const nn::TrainingConfig& config);

std::vector<em::SResponse> predict_all(const nn::ModelBasedModel& m, std::span<const data::Sample> samples);

/// Trains model-based (two-phase, eq5 in phase 2), dnn, dnn-tanh and rbfn on
/// one seeded split and scores them on its test part.
EvalReport compare_models(const data::Dataset& dataset, const ExperimentConfig& config);

/// For every fraction and model: train on that share of a seeded split, score on the rest.
std::vector<CurvePoint> generalization_curve(const data::Dataset& dataset, const ExperimentConfig& config);

inline constexpr int kReportFormatVersion = 1;

nlohmann::json report_to_json(const EvalReport& r);
/// Aligned-column table of the model rows.
std::string report_table(const EvalReport& r);
/// Header `fraction,model,test_mae_s21_complex`, one line per curve point.
std::string curve_csv(const std::vector<CurvePoint>& curve);

}  // namespace fssml::eval
