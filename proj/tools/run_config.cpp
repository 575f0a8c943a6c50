#include "run_config.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fssml/dataset.hpp"
#include "fssml/errors.hpp"
#include "fssml/json_util.hpp"

namespace fssml::cli {

using nlohmann::json;
using detail::check_keys;
using detail::read_opt;

namespace {

std::vector<std::size_t> sizes(const json& j, const std::string& ctx) {
    if (!j.is_array()) throw FormatError(ctx + ": expected an array");
    std::vector<std::size_t> out;
    for (const auto& v : j) out.push_back(detail::count(v, ctx));
    return out;
}

std::string text(const json& j, const std::string& ctx) {
    if (!j.is_string()) throw FormatError(ctx + ": expected a string");
    return j.get<std::string>();
}

const char* form_name(nn::CircuitLossForm f) { return f == nn::CircuitLossForm::Mae ? "mae" : "squared_l2"; }

nn::CircuitLossForm form_from(const std::string& s) {
    if (s == "squared_l2") return nn::CircuitLossForm::SquaredL2;
    if (s == "mae") return nn::CircuitLossForm::Mae;
    throw FormatError("training.eq2_form: expected 'squared_l2' or 'mae'");
}

void merge_phase(nn::PhaseConfig& p, const json& j, const std::string& ctx) {
    check_keys(j, {"epochs", "learning_rate", "loss"}, ctx);
    read_opt(j, "epochs", p.epochs, ctx);
    read_opt(j, "learning_rate", p.learning_rate, ctx);
    if (j.contains("loss")) p.loss = nn::loss_from_string(text(j["loss"], ctx + ".loss"));
}

json phase_json(const nn::PhaseConfig& p) {
    return json{{"epochs", p.epochs}, {"learning_rate", p.learning_rate}, {"loss", nn::to_string(p.loss)}};
}

void merge_training(nn::TrainingConfig& t, const json& j) {
    const std::string ctx = "training";
    check_keys(j,
               {"hidden_sizes", "hidden_activation", "phase1", "phase2", "batch_size", "beta1", "beta2", "epsilon",
                "eq2_form", "margin", "direct", "rbfn"},
               ctx);
    if (j.contains("hidden_sizes")) t.hidden_sizes = sizes(j["hidden_sizes"], ctx + ".hidden_sizes");
    if (j.contains("hidden_activation"))
        t.hidden_activation = nn::activation_from_string(text(j["hidden_activation"], ctx + ".hidden_activation"));
    if (j.contains("phase1")) merge_phase(t.phase1, j["phase1"], ctx + ".phase1");
    if (j.contains("phase2")) merge_phase(t.phase2, j["phase2"], ctx + ".phase2");
    read_opt(j, "batch_size", t.batch_size, ctx);
    read_opt(j, "beta1", t.beta1, ctx);
    read_opt(j, "beta2", t.beta2, ctx);
    read_opt(j, "epsilon", t.epsilon, ctx);
    if (j.contains("eq2_form")) t.eq2_form = form_from(text(j["eq2_form"], ctx + ".eq2_form"));
    read_opt(j, "margin", t.margin, ctx);
    if (j.contains("direct")) {
        const json& d = j["direct"];
        const std::string dctx = ctx + ".direct";
        check_keys(d, {"hidden_sizes", "epochs", "batch_size", "learning_rate", "dropout"}, dctx);
        if (d.contains("hidden_sizes")) t.direct.hidden_sizes = sizes(d["hidden_sizes"], dctx + ".hidden_sizes");
        read_opt(d, "epochs", t.direct.epochs, dctx);
        read_opt(d, "batch_size", t.direct.batch_size, dctx);
        read_opt(d, "learning_rate", t.direct.learning_rate, dctx);
        read_opt(d, "dropout", t.direct.dropout, dctx);
    }
    if (j.contains("rbfn")) {
        const json& r = j["rbfn"];
        const std::string rctx = ctx + ".rbfn";
        check_keys(r, {"n_centers", "width_scale", "ridge", "kmeans_iterations"}, rctx);
        read_opt(r, "n_centers", t.rbfn.n_centers, rctx);
        read_opt(r, "width_scale", t.rbfn.width_scale, rctx);
        read_opt(r, "ridge", t.rbfn.ridge, rctx);
        read_opt(r, "kmeans_iterations", t.rbfn.kmeans_iterations, rctx);
    }
}

json training_json(const nn::TrainingConfig& t) {
    return json{{"hidden_sizes", t.hidden_sizes},
                {"hidden_activation", nn::to_string(t.hidden_activation)},
                {"phase1", phase_json(t.phase1)},
                {"phase2", phase_json(t.phase2)},
                {"batch_size", t.batch_size},
                {"beta1", t.beta1},
                {"beta2", t.beta2},
                {"epsilon", t.epsilon},
                {"eq2_form", form_name(t.eq2_form)},
                {"margin", t.margin},
                {"direct", json{{"hidden_sizes", t.direct.hidden_sizes},
                                {"epochs", t.direct.epochs},
                                {"batch_size", t.direct.batch_size},
                                {"learning_rate", t.direct.learning_rate},
                                {"dropout", t.direct.dropout}}},
                {"rbfn", json{{"n_centers", t.rbfn.n_centers},
                              {"width_scale", t.rbfn.width_scale},
                              {"ridge", t.rbfn.ridge},
                              {"kmeans_iterations", t.rbfn.kmeans_iterations}}}};
}

}  // namespace

void RunConfig::validate() const {
    try {
        sweep.validate();
        training.validate();
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ConfigError("split.train_fraction must lie in (0, 1)");
    if (fractions.empty()) throw ConfigError("generalization.fractions must not be empty");
    for (double f : fractions)
        if (!(f > 0.0 && f < 1.0)) throw ConfigError("generalization fractions must lie in (0, 1)");
    for (const auto& m : curve_models) {
        if (m == "model-based") continue;
        try {
            (void)nn::direct_kind_from_string(m);
        } catch (const UsageError& e) {
            throw ConfigError(e.what());
        }
    }
}

eval::ExperimentConfig RunConfig::experiment() const {
    eval::ExperimentConfig e;
    e.training = training;
    e.training.seed = seed;
    e.train_fraction = train_fraction;
    e.split_seed = seed;
    e.fractions = fractions;
    e.curve_models = curve_models;
    return e;
}

RunConfig merge_config(RunConfig c, const json& doc) {
    try {
        check_keys(doc, {"seed", "sweep", "training", "split", "generalization", "paths"}, "config");
        if (doc.contains("seed")) c.seed = detail::count(doc["seed"], "config.seed");
        if (doc.contains("sweep")) c.sweep = data::sweep_from_json(doc["sweep"]);
        if (doc.contains("training")) merge_training(c.training, doc["training"]);
        if (doc.contains("split")) {
            check_keys(doc["split"], {"train_fraction"}, "split");
            read_opt(doc["split"], "train_fraction", c.train_fraction, "split");
        }
        if (doc.contains("generalization")) {
            const json& g = doc["generalization"];
            check_keys(g, {"fractions", "models"}, "generalization");
            if (g.contains("fractions")) c.fractions = detail::numbers(g["fractions"], "generalization.fractions");
            if (g.contains("models")) {
                if (!g["models"].is_array()) throw FormatError("generalization.models: expected an array");
                c.curve_models.clear();
                for (const auto& m : g["models"]) c.curve_models.push_back(text(m, "generalization.models"));
            }
        }
        if (doc.contains("paths")) {
            const json& p = doc["paths"];
            check_keys(p, {"dataset", "checkpoint", "out"}, "paths");
            if (p.contains("dataset")) c.dataset = text(p["dataset"], "paths.dataset");
            if (p.contains("checkpoint")) c.checkpoint = text(p["checkpoint"], "paths.checkpoint");
            if (p.contains("out")) c.out = text(p["out"], "paths.out");
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    c.training.seed = c.seed;
    return c;
}

RunConfig load_config(const std::string& path, RunConfig base) {
    std::string body;
    try {
        body = data::read_text_file(path);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": line " + std::to_string(data::line_of_offset(body, e.byte)) + ": invalid JSON");
    }
    return merge_config(std::move(base), doc);
}

json to_json(const RunConfig& c) {
    json paths = json::object();
    if (!c.dataset.empty()) paths["dataset"] = c.dataset;
    if (!c.checkpoint.empty()) paths["checkpoint"] = c.checkpoint;
    if (!c.out.empty()) paths["out"] = c.out;
    return json{{"seed", c.seed},
                {"sweep", data::to_json(c.sweep)},
                {"training", training_json(c.training)},
                {"split", json{{"train_fraction", c.train_fraction}}},
                {"generalization", json{{"fractions", c.fractions}, {"models", c.curve_models}}},
                {"paths", std::move(paths)}};
}

std::vector<double> parse_triple(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size() || !std::isfinite(v))
            throw ConfigError(what + ": '" + item + "' is not a number");
        out.push_back(v);
    }
    if (out.size() != 3) throw ConfigError(what + ": expected three comma-separated values");
    return out;
}

}  // namespace fssml::cli
