#include "fssml/experiments.hpp"

#include <chrono>
#include <cstdio>
#include <sstream>

#include "fssml/errors.hpp"
#include "fssml/metrics.hpp"

namespace fssml::eval {

using nlohmann::json;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<em::SResponse> targets(std::span<const data::Sample> samples) {
    std::vector<em::SResponse> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.s);
    return out;
}

struct Parts {
    std::vector<data::Sample> train;
    std::vector<data::Sample> test;
};

Parts take_split(const data::Dataset& d, double fraction, std::uint64_t seed) {
    data::Split s = data::split(d, fraction, seed);
    return {std::move(s.train), std::move(s.test)};
}

double curve_mae(const std::string& model, std::span<const data::Sample> train, std::span<const data::Sample> test,
                 const nn::TrainingConfig& cfg) {
    const std::vector<em::SResponse> truth = targets(test);
    if (model == "model-based") {
        const ModelBasedRun run = train_model_based(train, test, cfg);
        return mae_complex(predict_all(run.phase2.model, test), truth, Port::S21);
    }
    const nn::DirectResult r = nn::train_direct(nn::direct_kind_from_string(model), train, test, cfg);
    return mae_complex(r.model.predict(test), truth, Port::S21);
}

}  // namespace

ModelRow score(const std::string& model, std::span<const em::SResponse> pred, std::span<const data::Sample> test,
               std::size_t n_params, double seconds) {
    const std::vector<em::SResponse> truth = targets(test);
    ModelRow row;
    row.model = model;
    row.test_mae_s21_complex = mae_complex(pred, truth, Port::S21);
    row.test_mae_s11_complex = mae_complex(pred, truth, Port::S11);
    row.test_mae_s21_magnitude = mae_magnitude(pred, truth, Port::S21);
    row.power_residual = power_residual(pred);
    row.n_params = n_params;
    row.train_seconds = seconds;
    row.smoothness = mean_smoothness(pred);
    return row;
}

ModelBasedRun train_model_based(std::span<const data::Sample> train, std::span<const data::Sample> test,
                                const nn::TrainingConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    ModelBasedRun run;
    run.phase1 = nn::train_phase1(train, test, config);
    run.phase2 = nn::train_phase2(train, test, run.phase1.model, config);
    run.seconds = seconds_since(t0);
    return run;
}

std::vector<em::SResponse> predict_all(const nn::ModelBasedModel& m, std::span<const data::Sample> samples) {
    std::vector<em::SResponse> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(m.predict(s.x, s.s.grid));
    return out;
}

EvalReport compare_models(const data::Dataset& dataset, const ExperimentConfig& config) {
    config.training.validate();
    const Parts parts = take_split(dataset, config.train_fraction, config.split_seed);

    EvalReport report;
    report.n_train = parts.train.size();
    report.n_test = parts.test.size();

    nn::TrainingConfig mb = config.training;
    mb.phase2.loss = nn::LossSelection::Eq5;
    const ModelBasedRun run = train_model_based(parts.train, parts.test, mb);
    report.rows.push_back(score("model-based", predict_all(run.phase2.model, parts.test), parts.test,
                                nn::count_params(run.phase2.model.params), run.seconds));

    for (nn::DirectKind kind : {nn::DirectKind::Dnn, nn::DirectKind::DnnTanh, nn::DirectKind::Rbfn}) {
        const auto t0 = std::chrono::steady_clock::now();
        const nn::DirectResult r = nn::train_direct(kind, parts.train, parts.test, config.training);
        const double secs = seconds_since(t0);
        report.rows.push_back(score(nn::to_string(kind), r.model.predict(parts.test), parts.test, r.model.n_params(), secs));
    }
    return report;
}

std::vector<CurvePoint> generalization_curve(const data::Dataset& dataset, const ExperimentConfig& config) {
    config.training.validate();
    for (const auto& m : config.curve_models)
        if (m != "model-based") (void)nn::direct_kind_from_string(m);
    std::vector<CurvePoint> out;
    nn::TrainingConfig mb = config.training;
    mb.phase2.loss = nn::LossSelection::Eq5;
    for (double f : config.fractions) {
        const Parts parts = take_split(dataset, f, config.split_seed);
        for (const auto& m : config.curve_models)
            out.push_back({f, m, curve_mae(m, parts.train, parts.test, m == "model-based" ? mb : config.training)});
    }
    return out;
}

json report_to_json(const EvalReport& r) {
    json rows = json::array();
    for (const auto& m : r.rows)
        rows.push_back(json{{"model", m.model},
                            {"test_mae_s21_complex", m.test_mae_s21_complex},
                            {"test_mae_s11_complex", m.test_mae_s11_complex},
                            {"test_mae_s21_magnitude", m.test_mae_s21_magnitude},
                            {"power_residual", m.power_residual},
                            {"n_params", m.n_params},
                            {"train_seconds", m.train_seconds},
                            {"smoothness", m.smoothness}});
    json curve = json::array();
    for (const auto& c : r.curve)
        curve.push_back(json{{"fraction", c.fraction}, {"model", c.model}, {"test_mae_s21_complex", c.test_mae_s21_complex}});
    return json{{"format", "fssml-report"},
                {"format_version", kReportFormatVersion},
                {"n_train", r.n_train},
                {"n_test", r.n_test},
                {"models", std::move(rows)},
                {"generalization", std::move(curve)},
                {"config", r.config}};
}

std::string report_table(const EvalReport& r) {
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-12s %14s %14s %14s %12s %10s %10s %12s\n", "model", "mae_s21", "mae_s11",
                  "mae_|s21|", "power_res", "params", "seconds", "smoothness");
    out += buf;
    for (const auto& m : r.rows) {
        std::snprintf(buf, sizeof buf, "%-12s %14.6g %14.6g %14.6g %12.3e %10zu %10.2f %12.3e\n", m.model.c_str(),
                      m.test_mae_s21_complex, m.test_mae_s11_complex, m.test_mae_s21_magnitude, m.power_residual,
                      m.n_params, m.train_seconds, m.smoothness);
        out += buf;
    }
    return out;
}

std::string curve_csv(const std::vector<CurvePoint>& curve) {
    std::string out = "fraction,model,test_mae_s21_complex\n";
    char buf[128];
    for (const auto& c : curve) {
        std::snprintf(buf, sizeof buf, "%.17g,%s,%.17g\n", c.fraction, c.model.c_str(), c.test_mae_s21_complex);
        out += buf;
    }
    return out;
}

}  // namespace fssml::eval
