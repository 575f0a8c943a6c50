#include "cli.hpp"

#include <cstdio>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fssml/checkpoint.hpp"
#include "fssml/dataset.hpp"
#include "fssml/errors.hpp"
#include "fssml/experiments.hpp"
#include "fssml/metrics.hpp"
#include "fssml/touchstone.hpp"
#include "run_config.hpp"

namespace fssml::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Globals {
    std::string config;
    std::uint64_t seed = 0;
    CLI::Option* seed_opt = nullptr;
    std::string out;
    bool force = false;
};

struct GenDataFlags {
    std::string levels;
};

struct TrainFlags {
    std::string dataset;
    std::string phase = "both";
    std::string loss;
    std::string init;
    std::string model = "model-based";
    std::size_t phase1_epochs = 0;
    std::size_t phase2_epochs = 0;
};

struct PredictFlags {
    std::string checkpoint;
    std::string geometry;
};

struct EvalFlags {
    std::string checkpoint;
    std::string dataset;
};

struct CompareFlags {
    std::string dataset;
};

RunConfig effective_config(const Globals& g) {
    RunConfig c = g.config.empty() ? RunConfig{} : load_config(g.config);
    if (g.seed_opt && g.seed_opt->count() > 0) c.seed = g.seed;
    c.training.seed = c.seed;
    if (!g.out.empty()) c.out = g.out;
    return c;
}

void refuse_overwrite(const fs::path& p, bool force) {
    if (!force && fs::exists(p)) throw UsageError("refusing to overwrite " + p.string() + " (pass --force)");
}

std::string require_input(const std::string& path, const char* what, const char* flag) {
    if (path.empty()) throw UsageError(std::string("missing ") + what + " path (" + flag + ")");
    if (!fs::is_regular_file(path)) throw UsageError(std::string(what) + " not found: " + path);
    return path;
}

fs::path history_path(const fs::path& checkpoint) {
    fs::path p = checkpoint;
    p.replace_extension(".history.csv");
    return p;
}

std::string history_csv(const std::vector<std::pair<std::string, const nn::LossHistory*>>& parts) {
    std::string out = "phase,loss,epoch,train,test\n";
    char buf[160];
    for (const auto& [phase, h] : parts)
        for (const auto& r : h->rows) {
            std::snprintf(buf, sizeof buf, "%s,%s,%zu,%.17g,%.17g\n", phase.c_str(), h->loss.c_str(), r.epoch, r.train,
                          r.test);
            out += buf;
        }
    return out;
}

/// Effective config with the sweep the dataset was actually built from.
json echo(RunConfig c, const data::Dataset& d) {
    c.sweep = d.sweep;
    return to_json(c);
}

int cmd_gen_data(RunConfig cfg, const GenDataFlags& f, bool force, std::ostream& out) {
    if (!f.levels.empty()) {
        const std::vector<double> v = parse_triple(f.levels, "--levels");
        data::SweepDimension* dims[] = {&cfg.sweep.slot_length, &cfg.sweep.separation, &cfg.sweep.slot_length_2};
        for (std::size_t k = 0; k < 3; ++k) {
            if (!(v[k] >= 1.0) || v[k] != static_cast<double>(static_cast<std::size_t>(v[k])))
                throw ConfigError("--levels: level counts must be positive integers");
            dims[k]->n_levels = static_cast<std::size_t>(v[k]);
        }
    }
    if (cfg.out.empty()) cfg.out = "dataset.json";
    cfg.validate();
    refuse_overwrite(cfg.out, force);

    data::Dataset d = data::build_dataset(cfg.sweep);
    d.config = to_json(cfg);
    data::write_dataset(d, cfg.out);

    double residual = 0.0, mae = 0.0;
    std::size_t converged = 0;
    for (const auto& s : d.samples) {
        residual += s.fit.residual;
        mae += s.fit.mean_abs_error;
        converged += s.fit.converged ? 1 : 0;
    }
    const double n = static_cast<double>(d.size());
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "samples: %zu\nmean extraction residual: %.6g (sum |ds21|^2 per sample)\n"
                  "mean extraction |ds21|: %.6g\nconverged fits: %zu\nwrote %s\n",
                  d.size(), residual / n, mae / n, converged, cfg.out.c_str());
    out << buf;
    return kExitOk;
}

nn::Checkpoint load_phase1(const std::string& path) {
    nn::Checkpoint ck = nn::read_checkpoint(require_input(path, "phase-1 checkpoint", "--init"));
    if (!std::holds_alternative<nn::ModelBasedModel>(ck.model))
        throw UsageError("--init must be a model-based checkpoint, got " + nn::model_kind(ck.model));
    if (ck.phase < 1) throw UsageError("--init checkpoint has not completed phase 1");
    return ck;
}

int cmd_train(RunConfig cfg, const TrainFlags& f, bool force, std::ostream& out) {
    if (!f.dataset.empty()) cfg.dataset = f.dataset;
    if (!f.init.empty()) cfg.checkpoint = f.init;
    if (f.phase1_epochs > 0) cfg.training.phase1.epochs = f.phase1_epochs;
    if (f.phase2_epochs > 0) cfg.training.phase2.epochs = f.phase2_epochs;
    const bool direct = f.model != "model-based";
    if (!f.loss.empty()) {
        nn::LossSelection loss;
        try {
            loss = nn::loss_from_string(f.loss);
        } catch (const UsageError& e) {
            throw ConfigError(e.what());
        }
        (f.phase == "1" ? cfg.training.phase1.loss : cfg.training.phase2.loss) = loss;
    }
    if (cfg.out.empty()) cfg.out = "checkpoint.json";
    cfg.validate();
    require_input(cfg.dataset, "dataset", "--dataset");
    if (f.phase == "2" && !direct && cfg.checkpoint.empty())
        throw UsageError("--phase 2 needs a phase-1 checkpoint (--init)");
    const fs::path ck_path = cfg.out;
    refuse_overwrite(ck_path, force);
    refuse_overwrite(history_path(ck_path), force);

    const data::Dataset d = data::read_dataset(cfg.dataset);
    const data::Split sp = data::split(d, cfg.train_fraction, cfg.seed);
    char buf[256];

    nn::Checkpoint ck;
    ck.grid = d.grid();
    ck.config = echo(cfg, d);
    std::string csv;
    if (direct) {
        const nn::DirectKind kind = nn::direct_kind_from_string(f.model);
        const nn::DirectResult r = nn::train_direct(kind, sp.train, sp.test, cfg.training);
        ck.model = r.model;
        csv = history_csv({{"direct", &r.history}});
        std::snprintf(buf, sizeof buf, "%s: %zu parameters, final test %s %.6g\n", f.model.c_str(), r.model.n_params(),
                      r.history.loss.c_str(), r.history.rows.empty() ? 0.0 : r.history.rows.back().test);
        out << buf;
    } else if (f.phase == "1") {
        const nn::PhaseResult p1 = nn::train_phase1(sp.train, sp.test, cfg.training);
        ck.model = p1.model;
        ck.phase = 1;
        csv = history_csv({{"1", &p1.history}});
        std::snprintf(buf, sizeof buf, "phase 1 (%s): final test loss %.6g\n", p1.history.loss.c_str(),
                      p1.history.rows.back().test);
        out << buf;
    } else {
        nn::ModelBasedModel start;
        nn::PhaseResult p1;
        const bool both = f.phase == "both";
        if (both) {
            p1 = nn::train_phase1(sp.train, sp.test, cfg.training);
            start = p1.model;
            std::snprintf(buf, sizeof buf, "phase 1 (%s): final test loss %.6g\n", p1.history.loss.c_str(),
                          p1.history.rows.back().test);
            out << buf;
        } else {
            start = std::get<nn::ModelBasedModel>(load_phase1(cfg.checkpoint).model);
        }
        const nn::PhaseResult p2 = nn::train_phase2(sp.train, sp.test, start, cfg.training);
        ck.model = p2.model;
        ck.phase = 2;
        csv = both ? history_csv({{"1", &p1.history}, {"2", &p2.history}}) : history_csv({{"2", &p2.history}});
        std::snprintf(buf, sizeof buf, "phase 2 (%s): test loss %.6g -> %.6g (kept epoch %zu)\n",
                      p2.history.loss.c_str(), p2.initial_test, p2.best_test, p2.best_epoch);
        out << buf;
    }
    nn::write_checkpoint(ck, ck_path);
    data::write_text_file(history_path(ck_path), csv);
    out << "wrote " << ck_path.string() << " and " << history_path(ck_path).string() << "\n";
    return kExitOk;
}

const char* kCircuitNames[] = {"L1", "C1", "L2", "C2"};

int cmd_predict(RunConfig cfg, const PredictFlags& f, bool force, std::ostream& out, std::ostream& err) {
    if (!f.checkpoint.empty()) cfg.checkpoint = f.checkpoint;
    if (cfg.out.empty()) cfg.out = "prediction.s2p";
    if (f.geometry.empty()) throw UsageError("missing geometry (--geometry slot_length,separation,slot_length_2)");
    const std::vector<double> gv = parse_triple(f.geometry, "--geometry");
    const data::Geometry x = data::Geometry::from(gv);
    cfg.validate();
    require_input(cfg.checkpoint, "checkpoint", "--checkpoint");
    refuse_overwrite(cfg.out, force);

    const nn::Checkpoint ck = nn::read_checkpoint(cfg.checkpoint);
    if (ck.config.is_object() && ck.config.contains("sweep")) {
        const data::SweepSpec trained = data::sweep_from_json(ck.config["sweep"]);
        if (!trained.contains(x))
            err << "warning: geometry lies outside the training sweep; extrapolating\n";
    }

    em::SResponse s{ck.grid};
    char buf[256];
    if (const auto* mb = std::get_if<nn::ModelBasedModel>(&ck.model)) {
        const em::CircuitParams c = mb->predict_circuit(x);
        for (std::size_t k = 0; k < c.size(); ++k) {
            const char* name = k < 4 ? kCircuitNames[k] : "c";
            std::snprintf(buf, sizeof buf, "%s = %.9e %s\n", name, c[k], k % 2 == 0 ? "H" : "F");
            out << buf;
        }
        for (std::size_t k = 0; k < c.n_screens(); ++k) {
            std::snprintf(buf, sizeof buf, "f0 screen %zu = %.6f GHz\n", k + 1, c.resonance(k) * 1e-9);
            out << buf;
        }
        s = mb->predict(x, ck.grid);
    } else {
        out << "direct model: no circuit parameters\n";
        s = std::get<nn::DirectModel>(ck.model).predict(x);
    }
    std::snprintf(buf, sizeof buf, "fssml %s prediction, geometry %.9g %.9g %.9g mm", nn::model_kind(ck.model).c_str(),
                  x.slot_length, x.separation, x.slot_length_2);
    data::write_touchstone(s, cfg.out, em::kFreeSpaceImpedance, buf);
    out << "wrote " << cfg.out << "\n";
    return kExitOk;
}

json row_json(const eval::ModelRow& m) {
    return json{{"model", m.model},
                {"test_mae_s21_complex", m.test_mae_s21_complex},
                {"test_mae_s11_complex", m.test_mae_s11_complex},
                {"test_mae_s21_magnitude", m.test_mae_s21_magnitude},
                {"power_residual", m.power_residual},
                {"n_params", m.n_params},
                {"smoothness", m.smoothness}};
}

int cmd_eval(RunConfig cfg, const EvalFlags& f, bool force, std::ostream& out) {
    if (!f.checkpoint.empty()) cfg.checkpoint = f.checkpoint;
    if (!f.dataset.empty()) cfg.dataset = f.dataset;
    if (cfg.out.empty()) cfg.out = "eval.json";
    cfg.validate();
    require_input(cfg.checkpoint, "checkpoint", "--checkpoint");
    require_input(cfg.dataset, "dataset", "--dataset");
    refuse_overwrite(cfg.out, force);

    const nn::Checkpoint ck = nn::read_checkpoint(cfg.checkpoint);
    const data::Dataset d = data::read_dataset(cfg.dataset);
    if (!(d.grid() == ck.grid)) throw UsageError("checkpoint and dataset use different frequency grids");
    const data::Split sp = data::split(d, cfg.train_fraction, cfg.seed);
    std::vector<em::SResponse> pred;
    if (const auto* mb = std::get_if<nn::ModelBasedModel>(&ck.model)) pred = eval::predict_all(*mb, sp.test);
    else pred = std::get<nn::DirectModel>(ck.model).predict(sp.test);

    eval::EvalReport r;
    r.n_train = sp.train.size();
    r.n_test = sp.test.size();
    r.rows.push_back(eval::score(nn::model_kind(ck.model), pred, sp.test, nn::count_params(ck.model), 0.0));
    const json doc{{"format", "fssml-eval"},
                   {"format_version", 1},
                   {"checkpoint_phase", ck.phase},
                   {"n_train", r.n_train},
                   {"n_test", r.n_test},
                   {"metrics", row_json(r.rows.front())},
                   {"config", echo(cfg, d)}};
    data::write_text_file(cfg.out, doc.dump(2) + "\n");
    out << eval::report_table(r) << "wrote " << cfg.out << "\n";
    return kExitOk;
}

int cmd_compare(RunConfig cfg, const CompareFlags& f, bool force, std::ostream& out) {
    if (!f.dataset.empty()) cfg.dataset = f.dataset;
    if (cfg.out.empty()) cfg.out = "report";
    cfg.validate();
    require_input(cfg.dataset, "dataset", "--dataset");
    const fs::path dir = cfg.out;
    if (fs::exists(dir) && !fs::is_directory(dir)) throw UsageError(dir.string() + " exists and is not a directory");
    const fs::path json_path = dir / "report.json";
    const fs::path table_path = dir / "report.txt";
    const fs::path csv_path = dir / "generalization.csv";
    for (const auto& p : {json_path, table_path, csv_path}) refuse_overwrite(p, force);

    const data::Dataset d = data::read_dataset(cfg.dataset);
    const eval::ExperimentConfig ex = cfg.experiment();
    eval::EvalReport r = eval::compare_models(d, ex);
    r.curve = eval::generalization_curve(d, ex);
    r.config = echo(cfg, d);

    fs::create_directories(dir);
    data::write_text_file(json_path, eval::report_to_json(r).dump(2) + "\n");
    data::write_text_file(table_path, eval::report_table(r));
    data::write_text_file(csv_path, eval::curve_csv(r.curve));
    out << eval::report_table(r) << "wrote " << json_path.string() << ", " << table_path.string() << ", "
        << csv_path.string() << "\n";
    return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Model-based learning for frequency selective surfaces", "fssml"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config, "JSON config file")->check(CLI::ExistingFile);
    g.seed_opt = app.add_option("--seed", g.seed, "Seed for splits and initialization");
    app.add_option("--out", g.out, "Output path (a directory for compare)");
    app.add_flag("--force", g.force, "Overwrite existing outputs");

    GenDataFlags gen;
    auto* gen_cmd = app.add_subcommand("gen-data", "Sweep, simulate and extract a dataset")->fallthrough();
    gen_cmd->add_option("--levels", gen.levels, "Levels per sweep dimension, e.g. 9,9,9");

    TrainFlags tr;
    auto* train_cmd = app.add_subcommand("train", "Train a model and write a checkpoint")->fallthrough();
    train_cmd->add_option("--dataset", tr.dataset, "Dataset JSON");
    train_cmd->add_option("--phase", tr.phase, "1, 2 or both")->check(CLI::IsMember({"1", "2", "both"}));
    train_cmd->add_option("--loss", tr.loss, "Loss of the last phase run: eq1, eq2, eq3 or eq5");
    train_cmd->add_option("--init", tr.init, "Phase-1 checkpoint (required with --phase 2)");
    train_cmd->add_option("--model", tr.model, "model-based, dnn, dnn-tanh or rbfn")
        ->check(CLI::IsMember({"model-based", "dnn", "dnn-tanh", "rbfn"}));
    train_cmd->add_option("--phase1-epochs", tr.phase1_epochs, "Override phase-1 epochs")->check(CLI::PositiveNumber);
    train_cmd->add_option("--phase2-epochs", tr.phase2_epochs, "Override phase-2 epochs")->check(CLI::PositiveNumber);

    PredictFlags pr;
    auto* predict_cmd = app.add_subcommand("predict", "Predict S-parameters for one geometry")->fallthrough();
    predict_cmd->add_option("--checkpoint", pr.checkpoint, "Checkpoint JSON");
    predict_cmd->add_option("--geometry", pr.geometry, "slot_length,separation,slot_length_2 in mm");

    EvalFlags ev;
    auto* eval_cmd = app.add_subcommand("eval", "Score a checkpoint on the test split")->fallthrough();
    eval_cmd->add_option("--checkpoint", ev.checkpoint, "Checkpoint JSON");
    eval_cmd->add_option("--dataset", ev.dataset, "Dataset JSON");

    CompareFlags cmp;
    auto* compare_cmd = app.add_subcommand("compare", "Train all models and write the comparison report")->fallthrough();
    compare_cmd->add_option("--dataset", cmp.dataset, "Dataset JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        const RunConfig cfg = effective_config(g);
        if (gen_cmd->parsed()) return cmd_gen_data(cfg, gen, g.force, out);
        if (train_cmd->parsed()) return cmd_train(cfg, tr, g.force, out);
        if (predict_cmd->parsed()) return cmd_predict(cfg, pr, g.force, out, err);
        if (eval_cmd->parsed()) return cmd_eval(cfg, ev, g.force, out);
        if (compare_cmd->parsed()) return cmd_compare(cfg, cmp, g.force, out);
        err << "no subcommand\n";
        return kExitUsage;
    } catch (const ConfigError& e) {
        err << "fssml: config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const UsageError& e) {
        err << "fssml: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "fssml: " << e.what() << "\n";
        return kExitRuntime;
    }
}

}  // namespace fssml::cli
