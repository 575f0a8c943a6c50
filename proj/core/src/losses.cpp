#include "fssml/losses.hpp"

#include "fssml/errors.hpp"

namespace fssml::nn {

namespace {

template <class Term>
double mean_over_points(std::span<const em::SResponse> pred, std::span<const em::SResponse> target, Term term) {
    if (pred.size() != target.size()) throw UsageError("prediction and target sets differ in size");
    if (pred.empty()) throw UsageError("loss over an empty sample set");
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (!(pred[i].grid == target[i].grid)) throw UsageError("prediction and target use different grids");
        double sample = 0.0;
        for (std::size_t j = 0; j < pred[i].size(); ++j) sample += term(pred[i].points[j], target[i].points[j]);
        total += sample;
        count += pred[i].size();
    }
    return total / static_cast<double>(count);
}

}  // namespace

double loss_eq1(std::span<const em::SResponse> pred, std::span<const em::SResponse> target) {
    return mean_over_points(pred, target, s21_modulus_term);
}

double loss_eq3(std::span<const em::SResponse> pred, std::span<const em::SResponse> target) {
    return mean_over_points(pred, target, s21_modulus_term);
}

double loss_eq5(std::span<const em::SResponse> pred, std::span<const em::SResponse> target) {
    return mean_over_points(pred, target, phase_aware_term);
}

double loss_eq2(std::span<const em::CircuitParams> pred, std::span<const em::CircuitParams> target,
                const CircuitNormalization& norm, CircuitLossForm form) {
    if (pred.size() != target.size()) throw UsageError("prediction and target sets differ in size");
    if (pred.empty()) throw UsageError("loss over an empty sample set");
    double total = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const Eigen::VectorXd d = norm.to_unit(pred[i]) - norm.to_unit(target[i]);
        total += form == CircuitLossForm::SquaredL2 ? d.squaredNorm() : d.cwiseAbs().mean();
    }
    return total / static_cast<double>(pred.size());
}

}  // namespace fssml::nn
