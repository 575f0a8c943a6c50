#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fssml/experiments.hpp"
#include "fssml/sweep.hpp"
#include "fssml/training.hpp"

namespace fssml::cli {

/// Bad config file or flag value. Maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Everything a command needs, merged from defaults, the config file and flags.
struct RunConfig {
    std::uint64_t seed = 0;
    data::SweepSpec sweep;
    nn::TrainingConfig training;
    double train_fraction = 0.8;
    std::vector<double> fractions{0.1, 0.3, 0.5, 0.7, 0.9};
    std::vector<std::string> curve_models{"model-based", "dnn", "dnn-tanh", "rbfn"};
    std::string dataset;
    std::string checkpoint;
    std::string out;

    /// Throws ConfigError on the first inconsistent value.
    void validate() const;
    eval::ExperimentConfig experiment() const;
};

/// Overlays a parsed config document on `base`. Unknown keys are errors.
RunConfig merge_config(RunConfig base, const nlohmann::json& doc);

/// Reads and merges a config file; any failure becomes a ConfigError.
RunConfig load_config(const std::string& path, RunConfig base = {});

/// Effective config, in the same schema merge_config reads.
nlohmann::json to_json(const RunConfig& c);

/// "a,b,c" -> three values; ConfigError otherwise.
std::vector<double> parse_triple(const std::string& text, const std::string& what);

}  // namespace fssml::cli
