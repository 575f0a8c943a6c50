#include <doctest.h>

#include <random>

#include "fssml/errors.hpp"
#include "fssml/experiments.hpp"
#include "fssml/metrics.hpp"
#include "helpers.hpp"
#include "oracles/frozen_values.hpp"

using namespace fssml;
using namespace fssml::eval;

namespace {

em::SResponse from_parts(const double* s11, const double* s21, std::size_t n) {
    em::SResponse r(em::FrequencyGrid(1e9, 1e9 * static_cast<double>(n), n));
    for (std::size_t j = 0; j < n; ++j) {
        r.points[j].s11 = {s11[2 * j], s11[2 * j + 1]};
        r.points[j].s21 = {s21[2 * j], s21[2 * j + 1]};
        r.points[j].s12 = r.points[j].s21;
        r.points[j].s22 = r.points[j].s11;
    }
    return r;
}

/// Real |s21| trace; s11 completes a lossless pair.
em::SResponse from_magnitudes(const std::vector<double>& mag) {
    em::SResponse r(em::FrequencyGrid(1e9, 1e9 * static_cast<double>(mag.size()), mag.size()));
    for (std::size_t j = 0; j < mag.size(); ++j) {
        r.points[j].s21 = {mag[j], 0.0};
        r.points[j].s11 = {0.0, std::sqrt(std::max(0.0, 1.0 - mag[j] * mag[j]))};
        r.points[j].s12 = r.points[j].s21;
        r.points[j].s22 = r.points[j].s11;
    }
    return r;
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("complex MAE matches the reference value") {
    const std::vector<em::SResponse> pred{from_parts(frozen::kLossPred11, frozen::kLossPred21, 3)};
    const std::vector<em::SResponse> target{from_parts(frozen::kLossTarget11, frozen::kLossTarget21, 3)};
    CHECK(testing::rel_err(mae_complex(pred, target, Port::S11), frozen::kMaeS11) < 1e-14);
    CHECK(mae_complex(pred, target, Port::S21) == doctest::Approx(mae_complex(target, pred, Port::S21)));
    CHECK(mae_complex(pred, pred, Port::S11) == 0.0);
    CHECK(mae_magnitude(pred, target, Port::S21) <= mae_complex(pred, target, Port::S21));
}

TEST_CASE("complex MAE of a constant offset equals the offset") {
    std::vector<double> mag(11, 0.5), shifted(11, 0.75);
    const std::vector<em::SResponse> a{from_magnitudes(mag)}, b{from_magnitudes(shifted)};
    CHECK(mae_complex(a, b, Port::S21) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK_THROWS_AS(mae_complex(a, std::vector<em::SResponse>{}, Port::S21), UsageError);
}

TEST_CASE("power residual sees any departure from losslessness") {
    std::mt19937_64 rng(4);
    std::vector<em::SResponse> ok;
    const em::FrequencyGrid grid = em::FrequencyGrid::standard();
    em::Topology topo;
    topo.screens = {em::ResonatorKind::ParallelLC, em::ResonatorKind::ParallelLC};
    topo.spacers = {em::Spacer{1.0, 0.009}};
    for (int i = 0; i < 5; ++i) ok.push_back(em::f_phys(testing::random_circuit(rng), topo, grid));
    CHECK(power_residual(ok) < 1e-12);
    const double v[] = {1.0, 0.0, 0.0, 1.0};
    const std::vector<em::SResponse> doubled{from_parts(v, v, 2)};
    CHECK(power_residual(doubled) == doctest::Approx(1.0));
}

TEST_CASE("smoothness matches the reference value") {
    const std::vector<double> mag(std::begin(frozen::kSmoothMagnitudes), std::end(frozen::kSmoothMagnitudes));
    CHECK(testing::rel_err(smoothness(from_magnitudes(mag)), frozen::kSmoothness) < 1e-14);
}

TEST_CASE("smoothness ignores affine trends and offsets") {
    std::vector<double> line, bumped;
    for (int j = 0; j < 50; ++j) line.push_back(0.1 + 0.015 * j);
    CHECK(smoothness(from_magnitudes(line)) < 1e-28);
    std::vector<double> curve;
    for (int j = 0; j < 50; ++j) curve.push_back(0.5 + 0.3 * std::sin(0.2 * j));
    for (double c : curve) bumped.push_back(c + 0.1);
    CHECK(smoothness(from_magnitudes(bumped)) == doctest::Approx(smoothness(from_magnitudes(curve))).epsilon(1e-10));
}

TEST_CASE("alternating noise has the closed-form smoothness") {
    for (std::size_t n : {5u, 20u, 201u}) {
        for (double delta : {1e-3, 0.05}) {
            std::vector<double> mag;
            for (std::size_t j = 0; j < n; ++j) mag.push_back(0.5 + (j % 2 == 0 ? delta : -delta));
            const double expected = 16.0 * delta * delta * static_cast<double>(n - 2) / static_cast<double>(n);
            CHECK(smoothness(from_magnitudes(mag)) == doctest::Approx(expected).epsilon(1e-12));
        }
    }
    const std::vector<double> tiny{0.1, 0.9};
    CHECK(smoothness(from_magnitudes(tiny)) == 0.0);
    CHECK_THROWS_AS(mean_smoothness(std::vector<em::SResponse>{}), UsageError);
}

TEST_CASE("report serializers carry every row and curve point") {
    EvalReport r;
    r.n_train = 8;
    r.n_test = 2;
    r.rows.push_back(ModelRow{"model-based", 0.01, 0.02, 0.005, 1e-14, 250, 1.5, 1e-6});
    r.rows.push_back(ModelRow{"dnn", 0.05, 0.06, 0.04, 0.2, 588236, 3.0, 2e-5});
    r.curve.push_back(CurvePoint{0.1, "model-based", 0.125});
    r.curve.push_back(CurvePoint{0.9, "dnn", 0.0625});
    const nlohmann::json j = report_to_json(r);
    CHECK(j["format"] == "fssml-report");
    CHECK(j["models"].size() == 2);
    CHECK(j["models"][1]["n_params"] == 588236);
    CHECK(j["generalization"][0]["test_mae_s21_complex"] == 0.125);
    const std::string table = report_table(r);
    CHECK(std::count(table.begin(), table.end(), '\n') == 3);
    CHECK(table.find("model-based") != std::string::npos);
    CHECK(curve_csv(r.curve) == "fraction,model,test_mae_s21_complex\n0.10000000000000001,model-based,0.125\n0.90000000000000002,dnn,0.0625\n");
}

}
