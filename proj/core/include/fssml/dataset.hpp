#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fssml/em.hpp"
#include "fssml/sweep.hpp"

namespace fssml::data {

struct FitQuality {
    double residual = 0.0;        // sum |ds21|^2 of the extracted circuit
    double mean_abs_error = 0.0;  // mean |ds21|
    bool converged = true;
};

/// One training triple: geometry, extracted circuit label, simulated response.
struct Sample {
    std::uint64_t id = 0;
    Geometry x;
    em::CircuitParams c;
    em::SResponse s{em::FrequencyGrid::standard()};
    FitQuality fit;
};

struct Dataset {
    SweepSpec sweep;
    std::vector<Sample> samples;
    /// Free-form provenance (effective run configuration), stored verbatim.
    nlohmann::json config = nlohmann::json::object();

    std::size_t size() const noexcept { return samples.size(); }
    const em::FrequencyGrid& grid() const noexcept { return sweep.grid; }
};

struct BuildOptions {
    bool extract = true;  // false leaves c at the nominal oracle circuit
    double init_asymmetry = 0.01;
};

/// Sweep, simulate and extract in one go. Sample ids follow sweep order.
Dataset build_dataset(const SweepSpec& spec, const BuildOptions& options = {});

/// Seeded uniform shuffle, then the first floor(fraction * n) samples
/// (clamped to [1, n - 1]) train and the rest test. Returns sample indices.
struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};
SplitIndices split_indices(std::size_t n, double train_fraction, std::uint64_t seed);

struct Split {
    std::vector<Sample> train;
    std::vector<Sample> test;
};
Split split(const Dataset& dataset, double train_fraction, std::uint64_t seed);

inline constexpr int kDatasetFormatVersion = 1;

nlohmann::json dataset_to_json(const Dataset& d);
Dataset dataset_from_json(const nlohmann::json& j);

/// Throws UsageError for an empty dataset.
void write_dataset(const Dataset& d, const std::filesystem::path& path);
/// ParseError (with line) for malformed JSON, FormatError for schema or
/// version problems.
Dataset read_dataset(const std::filesystem::path& path);

// JSON helpers shared with checkpoints and the CLI.
nlohmann::json to_json(const em::FrequencyGrid& g);
em::FrequencyGrid grid_from_json(const nlohmann::json& j);
nlohmann::json to_json(const em::Topology& t);
em::Topology topology_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SweepSpec& s);
SweepSpec sweep_from_json(const nlohmann::json& j);
nlohmann::json to_json(const OracleConfig& o);
OracleConfig oracle_from_json(const nlohmann::json& j);

/// Line number (1-based) of byte offset `pos` in `text`.
std::size_t line_of_offset(const std::string& text, std::size_t pos);

/// Reads a whole file; throws std::runtime_error if it cannot be opened.
std::string read_text_file(const std::filesystem::path& path);
/// Writes through a temporary file and renames, so readers never see a partial file.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace fssml::data
