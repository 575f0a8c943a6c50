#include "fssml/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "fssml/errors.hpp"

namespace fssml::eval {

namespace {

const ComplexScalar& pick(const em::SPoint& p, Port which) { return which == Port::S11 ? p.s11 : p.s21; }

template <class Term>
double mean_pairwise(std::span<const em::SResponse> pred, std::span<const em::SResponse> target, Term term) {
    if (pred.size() != target.size()) throw UsageError("prediction and target sets differ in size");
    if (pred.empty()) throw UsageError("metric over an empty set");
    double total = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (pred[i].size() != target[i].size()) throw UsageError("prediction and target differ in length");
        for (std::size_t j = 0; j < pred[i].size(); ++j) total += term(pred[i].points[j], target[i].points[j]);
        n += pred[i].size();
    }
    return total / static_cast<double>(n);
}

}  // namespace

double mae_complex(std::span<const em::SResponse> pred, std::span<const em::SResponse> target, Port which) {
    return mean_pairwise(pred, target, [which](const em::SPoint& a, const em::SPoint& b) {
        return abs(pick(a, which) - pick(b, which));
    });
}

double mae_magnitude(std::span<const em::SResponse> pred, std::span<const em::SResponse> target, Port which) {
    return mean_pairwise(pred, target, [which](const em::SPoint& a, const em::SPoint& b) {
        return std::abs(abs(pick(a, which)) - abs(pick(b, which)));
    });
}

double power_residual(std::span<const em::SResponse> pred) {
    double worst = 0.0;
    for (const auto& r : pred)
        for (const auto& p : r.points) worst = std::max(worst, std::abs(norm(p.s11) + norm(p.s21) - 1.0));
    return worst;
}

double smoothness(const em::SResponse& pred) {
    const std::size_t n = pred.size();
    if (n < 3) return 0.0;
    double total = 0.0;
    for (std::size_t j = 1; j + 1 < n; ++j) {
        const double d2 = abs(pred.points[j + 1].s21) - 2.0 * abs(pred.points[j].s21) + abs(pred.points[j - 1].s21);
        total += d2 * d2;
    }
    return total / static_cast<double>(n);
}

double mean_smoothness(std::span<const em::SResponse> pred) {
    if (pred.empty()) throw UsageError("smoothness over an empty set");
    double total = 0.0;
    for (const auto& r : pred) total += smoothness(r);
    return total / static_cast<double>(pred.size());
}

}  // namespace fssml::eval
