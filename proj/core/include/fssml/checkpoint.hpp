#pragma once

#include <filesystem>
#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "fssml/training.hpp"

namespace fssml::nn {

inline constexpr int kCheckpointFormatVersion = 1;

/// Either a geometry->circuit model or a direct baseline.
using AnyModel = std::variant<ModelBasedModel, DirectModel>;

struct Checkpoint {
    AnyModel model;
    /// Training phases completed so far (model-based only): 0, 1 or 2.
    int phase = 0;
    em::FrequencyGrid grid = em::FrequencyGrid::standard();
    nlohmann::json config = nlohmann::json::object();
};

std::string model_kind(const AnyModel& m);
std::size_t count_params(const AnyModel& m);

/// Layer sizes, activations, row-major weights, normalization statistics,
/// the config echo and a format version.
nlohmann::json checkpoint_to_json(const Checkpoint& c);
Checkpoint checkpoint_from_json(const nlohmann::json& j);

void write_checkpoint(const Checkpoint& c, const std::filesystem::path& path);
Checkpoint read_checkpoint(const std::filesystem::path& path);

nlohmann::json to_json(const MLPParams& p);
MLPParams mlp_from_json(const nlohmann::json& j);

}  // namespace fssml::nn
