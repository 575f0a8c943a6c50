#include <doctest.h>

#include <filesystem>
#include <random>

#include "fssml/adam.hpp"
#include "fssml/checkpoint.hpp"
#include "fssml/dataset.hpp"
#include "fssml/losses.hpp"
#include "fssml/metrics.hpp"
#include "fssml/network.hpp"
#include "fssml/rbfn.hpp"
#include "fssml/training.hpp"
#include "helpers.hpp"
#include "oracles/frozen_values.hpp"

using namespace fssml;
using namespace fssml::nn;

namespace {

em::SResponse three_point(const double* s11, const double* s21) {
    em::SResponse r(em::FrequencyGrid(1e9, 3e9, 3));
    for (std::size_t j = 0; j < 3; ++j) {
        r.points[j].s11 = {s11[2 * j], s11[2 * j + 1]};
        r.points[j].s21 = {s21[2 * j], s21[2 * j + 1]};
        r.points[j].s12 = r.points[j].s21;
        r.points[j].s22 = r.points[j].s11;
    }
    return r;
}

const data::Dataset& small_dataset() {
    static const data::Dataset d = [] {
        data::SweepSpec spec;
        spec.slot_length.n_levels = 3;
        spec.separation.n_levels = 3;
        spec.slot_length_2.n_levels = 3;
        return data::build_dataset(spec);
    }();
    return d;
}

}  // namespace

TEST_SUITE("neural") {

TEST_CASE("parameter counts follow the layer arithmetic") {
    CHECK(count_params(MLPParams({3, 14, 10, 4}, Activation::Tanh, Activation::Softplus)) == frozen::kCountModelBased);
    CHECK(count_params(MLPParams({3, 4, 8, 16, 32, 64, 128, 256, 512, 804}, Activation::Relu, Activation::Identity)) ==
          frozen::kCountDnn);
    TrainingConfig cfg;
    CHECK(model_layer_sizes(cfg, 3, 4) == std::vector<std::size_t>{3, 14, 10, 4});
}

TEST_CASE("forward pass matches the reference network") {
    MLPParams p({2, 3, 2}, Activation::Tanh, Activation::Softplus);
    REQUIRE(p.theta.size() == static_cast<Eigen::Index>(std::size(frozen::kMlpTheta)));
    for (Eigen::Index i = 0; i < p.theta.size(); ++i) p.theta(i) = frozen::kMlpTheta[i];
    Eigen::MatrixXd x(2, 1);
    x << frozen::kMlpInput[0], frozen::kMlpInput[1];
    const Eigen::MatrixXd y = forward(p, x);
    CHECK(testing::rel_err(y(0, 0), frozen::kMlpOutput[0]) < 1e-14);
    CHECK(testing::rel_err(y(1, 0), frozen::kMlpOutput[1]) < 1e-14);
}

TEST_CASE("backward pass matches finite differences") {
    for (Activation hidden : {Activation::Tanh, Activation::Relu}) {
        const MLPParams p = MLPParams::random({3, 5, 4, 2}, hidden, Activation::Softplus, 21);
        std::mt19937_64 rng(1);
        std::normal_distribution<double> n01;
        Eigen::MatrixXd x(3, 4), up(2, 4);
        for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = n01(rng);
        for (Eigen::Index i = 0; i < up.size(); ++i) up(i) = n01(rng);
        ForwardCache cache;
        forward(p, x, &cache);
        const Eigen::VectorXd g = backward(p, cache, up);
        for (Eigen::Index k = 0; k < p.theta.size(); ++k) {
            MLPParams a = p, b = p;
            const double h = 1e-6;
            a.theta(k) += h;
            b.theta(k) -= h;
            const double fd = ((up.array() * forward(a, x).array()).sum() - (up.array() * forward(b, x).array()).sum()) /
                              (2.0 * h);
            CHECK(std::abs(g(k) - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
        }
    }
}

TEST_CASE("geometry-to-circuit map is positive and differentiable") {
    const auto& d = small_dataset();
    std::vector<em::CircuitParams> cs;
    Eigen::MatrixXd x(3, static_cast<Eigen::Index>(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) {
        cs.push_back(d.samples[i].c);
        const auto v = d.samples[i].x.values();
        for (int k = 0; k < 3; ++k) x(k, static_cast<Eigen::Index>(i)) = v[static_cast<std::size_t>(k)];
    }
    const Normalization norm{GeometryNormalization::fit(x), CircuitNormalization::fit(cs)};
    const MLPParams p = MLPParams::random({3, 14, 10, 4}, Activation::Tanh, Activation::Softplus, 4);
    const auto xv = d.samples[5].x.values();
    const em::CircuitParams c = mlp_forward(p, xv, norm);
    for (double v : c.values()) CHECK(v > 0.0);
    // weights scaled by 1/c keep the probe O(1) despite H- and F-sized outputs
    std::vector<double> up{0.3, -0.2, 0.5, 0.1};
    for (std::size_t i = 0; i < 4; ++i) up[i] /= c[i];
    const Eigen::VectorXd g = mlp_backward(p, xv, norm, up);
    for (Eigen::Index k = 0; k < p.theta.size(); k += 17) {
        MLPParams a = p, b = p;
        const double h = 1e-6;
        a.theta(k) += h;
        b.theta(k) -= h;
        double fa = 0.0, fb = 0.0;
        const em::CircuitParams ca = mlp_forward(a, xv, norm), cb = mlp_forward(b, xv, norm);
        for (std::size_t i = 0; i < 4; ++i) {
            fa += up[i] * ca[i];
            fb += up[i] * cb[i];
        }
        const double fd = (fa - fb) / (2.0 * h);
        CHECK(std::abs(g(k) - fd) <= 1e-6 * std::max(std::abs(fd), g.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("loss functions match the reference values") {
    const em::SResponse pred = three_point(frozen::kLossPred11, frozen::kLossPred21);
    const em::SResponse target = three_point(frozen::kLossTarget11, frozen::kLossTarget21);
    const std::span<const em::SResponse> p(&pred, 1), t(&target, 1);
    CHECK(testing::rel_err(loss_eq1(p, t), frozen::kLossEq3) < 1e-14);
    CHECK(testing::rel_err(loss_eq3(p, t), frozen::kLossEq3) < 1e-14);
    CHECK(testing::rel_err(loss_eq5(p, t), frozen::kLossEq5) < 1e-14);
    CHECK(loss_eq5(p, p) == 0.0);
    CHECK(loss_eq3(t, t) == 0.0);
}

TEST_CASE("toy loss values") {
    em::SResponse a(em::FrequencyGrid(1e9, 2e9, 2)), b = a;
    for (auto& q : a.points) q.s21 = {1.0, 0.0};
    CHECK(loss_eq3(std::span(&a, 1), std::span(&b, 1)) == 1.0);
    em::SResponse c = b;
    c.points[0].s11 = {0.0, 1.0};
    CHECK(loss_eq5(std::span(&c, 1), std::span(&b, 1)) == 0.5);  // one unit term over two points
}

TEST_CASE("circuit-label loss is one for a unit offset in normalized units") {
    CircuitNormalization norm;
    norm.log_mean = Eigen::VectorXd::Zero(2);
    norm.log_std = Eigen::VectorXd::Constant(2, 0.5);
    const em::CircuitParams c({2.0, 3.0});
    const em::CircuitParams shifted({2.0 * std::exp(0.5), 3.0});
    CHECK(loss_eq2(std::span(&shifted, 1), std::span(&c, 1), norm) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(loss_eq2(std::span(&c, 1), std::span(&c, 1), norm) == 0.0);
}

TEST_CASE("one optimizer step matches the reference update") {
    const Eigen::Index n = 3;
    Eigen::VectorXd theta(n), g(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        theta(i) = frozen::kAdamTheta[i];
        g(i) = frozen::kAdamGrad[i];
    }
    const AdamState s0(AdamConfig{}, n);
    const AdamResult r = adam_step(s0, theta, g);
    for (Eigen::Index i = 0; i < n; ++i) CHECK(testing::rel_err(r.params(i), frozen::kAdamAfterOne[i]) < 1e-15);
    CHECK(r.state.step == 1);
    CHECK(s0.step == 0);
}

TEST_CASE("optimizer leaves parameters alone under a zero gradient and follows a constant one") {
    Eigen::VectorXd theta = Eigen::VectorXd::Constant(2, 1.5);
    AdamState s(AdamConfig{}, 2);
    for (int i = 0; i < 10; ++i) adam_update(s, theta, Eigen::VectorXd::Zero(2));
    CHECK(theta(0) == 1.5);
    Eigen::VectorXd g(2);
    g << 0.3, -2.0;
    for (int i = 0; i < 100; ++i) adam_update(s, theta, g);
    CHECK(theta(0) < 1.5);
    CHECK(theta(1) > 1.5);
}

TEST_CASE("end-to-end gradient matches finite differences through network and physics") {
    const auto& d = small_dataset();
    TrainingConfig cfg;
    cfg.phase1.epochs = 100;
    const PhaseResult p1 = train_phase1(d.samples, {}, cfg);
    const std::span<const data::Sample> few(d.samples.data(), 6);
    const PhysicsBatch batch = PhysicsBatch::build(few, p1.model.norm.x);
    for (LossSelection loss : {LossSelection::Eq3, LossSelection::Eq5, LossSelection::Eq2}) {
        const Objective obj = objective(p1.model, batch, loss);
        CHECK(obj.loss == doctest::Approx(evaluate_loss(p1.model, batch, loss)).epsilon(1e-12));
        double worst = 0.0;
        for (Eigen::Index k = 0; k < obj.grad.size(); ++k) {
            ModelBasedModel a = p1.model, b = p1.model;
            const double h = 1e-6;
            a.params.theta(k) += h;
            b.params.theta(k) -= h;
            const double fd = (evaluate_loss(a, batch, loss) - evaluate_loss(b, batch, loss)) / (2.0 * h);
            worst = std::max(worst, std::abs(obj.grad(k) - fd) / std::max(obj.grad.cwiseAbs().maxCoeff(), 1e-12));
        }
        CHECK(worst < 1e-5);
    }
}

TEST_CASE("phase 1 overfits a single sample") {
    const auto& d = small_dataset();
    TrainingConfig cfg;
    cfg.phase1.epochs = 5000;
    const std::span<const data::Sample> one(d.samples.data() + 13, 1);
    const PhaseResult r = train_phase1(one, {}, cfg);
    CHECK(r.history.rows.back().train < 1e-6);
}

TEST_CASE("phase 2 never returns a worse test loss than its start") {
    const auto& d = small_dataset();
    const data::Split sp = data::split(d, 0.7, 1);
    TrainingConfig cfg;
    cfg.phase1.epochs = 300;
    cfg.phase2.epochs = 40;
    const PhaseResult p1 = train_phase1(sp.train, sp.test, cfg);
    const PhaseResult p2 = train_phase2(sp.train, sp.test, p1.model, cfg);
    CHECK(p2.best_test <= p2.initial_test);
    CHECK(p2.history.rows.size() == 40);
    CHECK(p2.history.rows.back().train < p2.history.rows.front().train);
    const PhaseResult again = train_phase2(sp.train, sp.test, p1.model, cfg);
    CHECK(again.model.params.theta == p2.model.params.theta);
}

TEST_CASE("direct network overfits a single sample") {
    const auto& d = small_dataset();
    TrainingConfig cfg;
    cfg.direct.dropout = 0.0;
    cfg.direct.epochs = 10000;
    cfg.direct.learning_rate = 3e-4;
    const std::span<const data::Sample> one(d.samples.data() + 4, 1);
    const DirectResult r = train_direct(DirectKind::Dnn, one, {}, cfg);
    const std::vector<em::SResponse> pred = r.model.predict(one);
    const em::SResponse& truth = one.front().s;
    CHECK(eval::mae_complex(pred, std::span(&truth, 1), eval::Port::S21) < 1e-4);
    CHECK(r.model.n_params() == frozen::kCountDnn);
}

TEST_CASE("radial basis network interpolates and has the expected size") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd x(3, 300), y(2, 300);
    for (Eigen::Index i = 0; i < 300; ++i) {
        for (int k = 0; k < 3; ++k) x(k, i) = u(rng);
        y(0, i) = std::sin(x(0, i)) + x(1, i) * x(2, i);
        y(1, i) = std::cos(2.0 * x(1, i));
    }
    RBFNConfig cfg;
    const RBFNParams p = fit_rbfn(x, y, cfg, 0);
    CHECK(count_params(p) == 200 * 3 + 200 + 2 * 200 + 2);
    const Eigen::MatrixXd fit = rbfn_predict(p, x);
    CHECK((fit - y).cwiseAbs().mean() < 0.02);
    const RBFNParams again = fit_rbfn(x, y, cfg, 0);
    CHECK(again.centers == p.centers);

    const auto& d = small_dataset();
    const DirectResult r = train_direct(DirectKind::Rbfn, d.samples, {}, TrainingConfig{});
    CHECK(r.model.n_params() == d.size() * 3 + d.size() + 804 * d.size() + 804);  // centers clamp to n
}

TEST_CASE("checkpoints round-trip exactly") {
    const auto& d = small_dataset();
    TrainingConfig cfg;
    cfg.phase1.epochs = 50;
    Checkpoint ck;
    ck.model = train_phase1(d.samples, {}, cfg).model;
    ck.phase = 1;
    ck.config = {{"seed", 3}};
    const Checkpoint back = checkpoint_from_json(nlohmann::json::parse(checkpoint_to_json(ck).dump()));
    const auto& a = std::get<ModelBasedModel>(ck.model);
    const auto& b = std::get<ModelBasedModel>(back.model);
    CHECK(a.params.theta == b.params.theta);
    CHECK(a.predict_circuit(d.samples[3].x) == b.predict_circuit(d.samples[3].x));
    CHECK(back.phase == 1);
    CHECK(back.config == ck.config);
    CHECK(count_params(back.model) == 250);

    Checkpoint rb;
    rb.model = train_direct(DirectKind::Rbfn, d.samples, {}, cfg).model;
    const Checkpoint rb2 = checkpoint_from_json(nlohmann::json::parse(checkpoint_to_json(rb).dump()));
    CHECK(model_kind(rb2.model) == "rbfn");
    const auto pa = std::get<DirectModel>(rb.model).predict(d.samples[2].x);
    const auto pb = std::get<DirectModel>(rb2.model).predict(d.samples[2].x);
    CHECK(pa.points[7].s21 == pb.points[7].s21);
}

TEST_CASE("malformed checkpoints are rejected") {
    nlohmann::json j = {{"format", "fssml-checkpoint"}, {"format_version", 99}};
    CHECK_THROWS_AS(checkpoint_from_json(j), FormatError);
    CHECK_THROWS_AS(checkpoint_from_json(nlohmann::json::array()), FormatError);
}

TEST_CASE("training config rejects bad values") {
    TrainingConfig cfg;
    cfg.phase2.learning_rate = 0.0;
    CHECK_THROWS_AS(cfg.validate(), UsageError);
    CHECK_THROWS_AS(loss_from_string("eq4"), UsageError);
    CHECK(loss_from_string("eq5") == LossSelection::Eq5);
}

}
