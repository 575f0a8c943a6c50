#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "cli.hpp"
#include "fssml/checkpoint.hpp"
#include "fssml/dataset.hpp"
#include "fssml/metrics.hpp"
#include "fssml/network.hpp"
#include "fssml/touchstone.hpp"

namespace fs = std::filesystem;
using namespace fssml;

namespace {

struct Result {
    int code = -1;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "fssml");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Result r;
    r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

/// Fresh scratch directory removed on scope exit.
struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("fssml_cli_" + name)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& f) const { return (path / f).string(); }
};

constexpr const char* kQuickTraining = R"({
  "training": {
    "phase1": {"epochs": 60},
    "phase2": {"epochs": 40},
    "direct": {"epochs": 20},
    "rbfn": {"kmeans_iterations": 5}
  },
  "generalization": {"fractions": [0.5]}
})";

std::string make_dataset(const TempDir& dir) {
    const std::string path = dir / "data.json";
    REQUIRE(run_cli({"gen-data", "--levels", "2,2,2", "--out", path}).code == 0);
    return path;
}

std::string quick_config(const TempDir& dir) {
    const std::string path = dir / "quick.json";
    data::write_text_file(path, kQuickTraining);
    return path;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit with 2") {
    CHECK(run_cli({}).code == 2);
    CHECK(run_cli({"frobnicate"}).code == 2);
    CHECK(run_cli({"--help"}).code == 0);
    CHECK(run_cli({"gen-data", "--levels", "2,x,2"}).code == 2);
    CHECK(run_cli({"gen-data", "--levels", "2,2"}).code == 2);
    CHECK(run_cli({"train", "--phase", "3"}).code == 2);
    CHECK(run_cli({"gen-data", "--config", "/nonexistent/cfg.json"}).code == 2);
}

TEST_CASE("unknown config keys are rejected") {
    TempDir dir("unknown");
    data::write_text_file(dir / "cfg.json", R"({"seed": 1, "trainng": {}})");
    const Result r = run_cli({"gen-data", "--config", dir / "cfg.json", "--out", dir / "d.json"});
    CHECK(r.code == 2);
    CHECK(r.err.find("trainng") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "d.json"));
    data::write_text_file(dir / "bad.json", "{\n \"seed\": 1,\n ]\n");
    const Result bad = run_cli({"gen-data", "--config", dir / "bad.json", "--out", dir / "d.json"});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("line 3") != std::string::npos);
}

TEST_CASE("missing inputs exit with 2") {
    TempDir dir("missing");
    CHECK(run_cli({"train", "--dataset", dir / "nope.json", "--out", dir / "ck.json"}).code == 2);
    CHECK(run_cli({"train", "--out", dir / "ck.json"}).code == 2);
    CHECK(run_cli({"predict", "--geometry", "14.8,9.5,14.85", "--out", dir / "p.s2p"}).code == 2);
    CHECK(run_cli({"eval", "--checkpoint", dir / "nope.json", "--dataset", dir / "nope.json"}).code == 2);
    CHECK(run_cli({"compare", "--dataset", dir / "nope.json", "--out", dir / "r"}).code == 2);
}

TEST_CASE("gen-data is reproducible and refuses to overwrite") {
    TempDir dir("gen");
    const Result r = run_cli({"gen-data", "--levels", "2,2,2", "--out", dir / "a.json"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("samples: 8") != std::string::npos);
    CHECK(r.out.find("mean extraction residual") != std::string::npos);
    CHECK(data::read_dataset(dir / "a.json").size() == 8);
    const std::string first = data::read_text_file(dir / "a.json");

    const Result again = run_cli({"gen-data", "--levels", "2,2,2", "--out", dir / "a.json"});
    CHECK(again.code == 2);
    CHECK(again.err.find("--force") != std::string::npos);
    CHECK(data::read_text_file(dir / "a.json") == first);
    REQUIRE(run_cli({"gen-data", "--levels", "2,2,2", "--out", dir / "a.json", "--force"}).code == 0);
    CHECK(data::read_text_file(dir / "a.json") == first);
}

TEST_CASE("flags override the config file, which overrides defaults") {
    TempDir dir("precedence");
    data::write_text_file(dir / "cfg.json", R"({"seed": 5, "sweep": {"separation": {"n_levels": 3}}})");
    REQUIRE(run_cli({"gen-data", "--config", dir / "cfg.json", "--levels", "2,2,2", "--seed", "9", "--out",
                     dir / "d.json"})
                .code == 0);
    const data::Dataset d = data::read_dataset(dir / "d.json");
    CHECK(d.size() == 8);
    CHECK(d.config["seed"] == 9);
    CHECK(d.config["sweep"]["separation"]["n_levels"] == 2);
    CHECK(d.config["split"]["train_fraction"] == 0.8);
}

TEST_CASE("train, predict and eval work end to end") {
    TempDir dir("pipeline");
    const std::string ds = make_dataset(dir);
    const std::string cfg = quick_config(dir);
    const Result tr = run_cli({"train", "--config", cfg, "--dataset", ds, "--out", dir / "ck.json"});
    REQUIRE(tr.code == 0);
    CHECK(fs::exists(dir / "ck.history.csv"));
    CHECK(data::read_text_file(dir / "ck.history.csv").rfind("phase,loss,epoch,train,test\n", 0) == 0);
    const nn::Checkpoint ck = nn::read_checkpoint(dir / "ck.json");
    CHECK(ck.phase == 2);
    CHECK(ck.config["training"]["phase1"]["epochs"] == 60);

    const Result pr = run_cli({"predict", "--checkpoint", dir / "ck.json", "--geometry", "14.8,9.5,14.85", "--out",
                               dir / "p.s2p"});
    REQUIRE(pr.code == 0);
    CHECK(pr.out.find("L1 = ") != std::string::npos);
    CHECK(pr.out.find("f0 screen 2") != std::string::npos);
    CHECK(pr.err.empty());
    const data::TouchstoneData t = data::read_touchstone(dir / "p.s2p");
    CHECK(t.s.size() == 201);
    const std::vector<em::SResponse> one{t.s};
    CHECK(eval::power_residual(one) < 1e-10);
    const std::string text = data::read_text_file(dir / "p.s2p");
    CHECK(data::format_touchstone(t.s, t.z0, "fssml model-based prediction, geometry 14.8 9.5 14.85 mm") == text);

    const Result far = run_cli({"predict", "--checkpoint", dir / "ck.json", "--geometry", "18,9.5,14.85", "--out",
                                dir / "far.s2p"});
    CHECK(far.code == 0);
    CHECK(far.err.find("warning: geometry lies outside the training sweep") != std::string::npos);

    const Result ev = run_cli({"eval", "--checkpoint", dir / "ck.json", "--dataset", ds, "--out", dir / "eval.json"});
    REQUIRE(ev.code == 0);
    const nlohmann::json j = nlohmann::json::parse(data::read_text_file(dir / "eval.json"));
    CHECK(j["metrics"]["power_residual"].get<double>() < 1e-10);
    CHECK(j["config"]["seed"] == 0);
}

TEST_CASE("separate phases reproduce the combined run") {
    TempDir dir("phases");
    const std::string ds = make_dataset(dir);
    const std::string cfg = quick_config(dir);
    REQUIRE(run_cli({"train", "--config", cfg, "--dataset", ds, "--phase", "1", "--out", dir / "p1.json"}).code == 0);
    CHECK(run_cli({"train", "--config", cfg, "--dataset", ds, "--phase", "2", "--out", dir / "x.json"}).code == 2);
    const Result p2 = run_cli({"train", "--config", cfg, "--dataset", ds, "--phase", "2", "--init", dir / "p1.json",
                               "--out", dir / "p2.json"});
    REQUIRE(p2.code == 0);
    const Result both = run_cli({"train", "--config", cfg, "--dataset", ds, "--phase", "both", "--loss", "eq5",
                                 "--out", dir / "both.json"});
    REQUIRE(both.code == 0);
    const nn::Checkpoint two = nn::read_checkpoint(dir / "p2.json");
    const nn::Checkpoint both_ck = nn::read_checkpoint(dir / "both.json");
    CHECK(std::get<nn::ModelBasedModel>(two.model).params.theta ==
          std::get<nn::ModelBasedModel>(both_ck.model).params.theta);

    const auto phase2_line = [](const std::string& text) {
        const std::size_t at = text.find("phase 2 (");
        return at == std::string::npos ? std::string() : text.substr(at, text.find('\n', at) - at);
    };
    const std::string line = phase2_line(both.out);
    REQUIRE_FALSE(line.empty());
    CHECK(line == phase2_line(p2.out));
    double before = 0.0, after = 0.0;
    REQUIRE(std::sscanf(line.c_str(), "phase 2 (%*[^)]): test loss %lf -> %lf", &before, &after) == 2);
    CHECK(after <= before);
}

TEST_CASE("direct models train and predict") {
    TempDir dir("direct");
    const std::string ds = make_dataset(dir);
    const std::string cfg = quick_config(dir);
    REQUIRE(run_cli({"train", "--config", cfg, "--dataset", ds, "--model", "rbfn", "--out", dir / "r.json"}).code == 0);
    const Result pr = run_cli({"predict", "--checkpoint", dir / "r.json", "--geometry", "14.8,9.5,14.85", "--out",
                               dir / "r.s2p"});
    CHECK(pr.code == 0);
    CHECK(pr.out.find("direct model") != std::string::npos);
}

TEST_CASE("compare writes a four-row report") {
    TempDir dir("compare");
    const std::string ds = make_dataset(dir);
    const std::string cfg = quick_config(dir);
    const Result r = run_cli({"compare", "--config", cfg, "--dataset", ds, "--out", dir / "report"});
    REQUIRE(r.code == 0);
    const nlohmann::json j = nlohmann::json::parse(data::read_text_file(dir / "report/report.json"));
    REQUIRE(j["models"].size() == 4);
    CHECK(j["models"][0]["model"] == "model-based");
    CHECK(j["models"][0]["n_params"] == 250);
    CHECK(j["models"][1]["n_params"] == 588236);
    CHECK(j["models"][0]["power_residual"].get<double>() < 1e-10);
    for (std::size_t m = 1; m < 4; ++m) CHECK(j["models"][m]["power_residual"].get<double>() > 1e-3);
    CHECK(j["config"]["generalization"]["fractions"].size() == 1);
    const std::string csv = data::read_text_file(dir / "report/generalization.csv");
    CHECK(csv.rfind("fraction,model,test_mae_s21_complex\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
    CHECK(fs::exists(dir / "report/report.txt"));
    CHECK(run_cli({"compare", "--config", cfg, "--dataset", ds, "--out", dir / "report"}).code == 2);
}

}
