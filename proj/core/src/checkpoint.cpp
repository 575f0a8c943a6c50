#include "fssml/checkpoint.hpp"

#include <string_view>

#include "fssml/dataset.hpp"
#include "fssml/errors.hpp"
#include "fssml/json_util.hpp"

namespace fssml::nn {

using nlohmann::json;
using namespace fssml::detail;

namespace {

constexpr std::string_view kCheckpointTag = "fssml-checkpoint";

json vector_json(const Eigen::VectorXd& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

Eigen::VectorXd vector_from(const json& j, const std::string& ctx) {
    const auto v = numbers(j, ctx);
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Row-major nested arrays.
json matrix_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) r.push_back(m(i, k));
        rows.push_back(std::move(r));
    }
    return rows;
}

Eigen::MatrixXd matrix_from(const json& j, Eigen::Index rows, Eigen::Index cols, const std::string& ctx) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
        throw FormatError(ctx + ": expected " + std::to_string(rows) + " rows");
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto r = numbers(j[static_cast<std::size_t>(i)], ctx);
        if (static_cast<Eigen::Index>(r.size()) != cols)
            throw FormatError(ctx + ": expected " + std::to_string(cols) + " columns");
        for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = r[static_cast<std::size_t>(k)];
    }
    return m;
}

json geometry_norm_json(const GeometryNormalization& n) {
    return json{{"mean", vector_json(n.mean)}, {"std", vector_json(n.stddev)}};
}

GeometryNormalization geometry_norm_from(const json& j, const std::string& ctx) {
    check_keys(j, {"mean", "std"}, ctx);
    GeometryNormalization n;
    n.mean = vector_from(field(j, "mean", ctx), ctx + ".mean");
    n.stddev = vector_from(field(j, "std", ctx), ctx + ".std");
    if (n.mean.size() != n.stddev.size() || (n.stddev.array() <= 0.0).any())
        throw FormatError(ctx + ": inconsistent statistics");
    return n;
}

Activation activation_from(const json& j, const std::string& ctx) {
    if (!j.is_string()) throw FormatError(ctx + ": expected an activation name");
    try {
        return activation_from_string(j.get<std::string>());
    } catch (const UsageError& e) {
        throw FormatError(ctx + ": " + e.what());
    }
}

}  // namespace

json to_json(const MLPParams& p) {
    json layers = json::array();
    for (std::size_t k = 0; k < p.n_layers(); ++k)
        layers.push_back(json{{"weight", matrix_json(p.weight(k))}, {"bias", vector_json(p.bias(k))}});
    return json{{"layer_sizes", p.layer_sizes},
                {"hidden_activation", to_string(p.hidden)},
                {"output_activation", to_string(p.output)},
                {"layers", std::move(layers)}};
}

MLPParams mlp_from_json(const json& j) {
    const std::string ctx = "network";
    check_keys(j, {"layer_sizes", "hidden_activation", "output_activation", "layers"}, ctx);
    const json& sizes_j = field(j, "layer_sizes", ctx);
    if (!sizes_j.is_array()) throw FormatError(ctx + ".layer_sizes: expected an array");
    std::vector<std::size_t> sizes;
    for (const auto& s : sizes_j) sizes.push_back(count(s, ctx + ".layer_sizes"));
    MLPParams p;
    try {
        p = MLPParams(sizes, activation_from(field(j, "hidden_activation", ctx), ctx + ".hidden_activation"),
                      activation_from(field(j, "output_activation", ctx), ctx + ".output_activation"));
    } catch (const UsageError& e) {
        throw FormatError(ctx + ": " + e.what());
    }
    const json& layers = field(j, "layers", ctx);
    if (!layers.is_array() || layers.size() != p.n_layers()) throw FormatError(ctx + ".layers: wrong layer count");
    for (std::size_t k = 0; k < p.n_layers(); ++k) {
        const std::string lc = ctx + ".layers[" + std::to_string(k) + "]";
        check_keys(layers[k], {"weight", "bias"}, lc);
        const auto rows = static_cast<Eigen::Index>(sizes[k + 1]);
        const auto cols = static_cast<Eigen::Index>(sizes[k]);
        p.weight(k) = matrix_from(field(layers[k], "weight", lc), rows, cols, lc + ".weight");
        const Eigen::VectorXd b = vector_from(field(layers[k], "bias", lc), lc + ".bias");
        if (b.size() != rows) throw FormatError(lc + ".bias: wrong length");
        p.bias(k) = b;
    }
    return p;
}

std::string model_kind(const AnyModel& m) {
    if (std::holds_alternative<ModelBasedModel>(m)) return "model-based";
    return to_string(std::get<DirectModel>(m).kind);
}

std::size_t count_params(const AnyModel& m) {
    if (const auto* mb = std::get_if<ModelBasedModel>(&m)) return count_params(mb->params);
    return std::get<DirectModel>(m).n_params();
}

json checkpoint_to_json(const Checkpoint& c) {
    json j{{"format", kCheckpointTag},
           {"format_version", kCheckpointFormatVersion},
           {"model_kind", model_kind(c.model)},
           {"n_params", count_params(c.model)},
           {"phase", c.phase},
           {"grid", data::to_json(c.grid)},
           {"config", c.config}};
    if (const auto* mb = std::get_if<ModelBasedModel>(&c.model)) {
        j["network"] = to_json(mb->params);
        j["normalization"] = json{{"x", geometry_norm_json(mb->norm.x)},
                                  {"c",
                                   {{"log_mean", vector_json(mb->norm.c.log_mean)},
                                    {"log_std", vector_json(mb->norm.c.log_std)},
                                    {"margin", mb->norm.c.margin}}}};
        return j;
    }
    const DirectModel& d = std::get<DirectModel>(c.model);
    j["normalization"] = json{{"x", geometry_norm_json(d.xnorm)}};
    if (d.kind == DirectKind::Rbfn) {
        j["rbfn"] = json{{"centers", matrix_json(d.rbfn.centers)},
                         {"widths", vector_json(d.rbfn.widths)},
                         {"weights", matrix_json(d.rbfn.weights)},
                         {"bias", vector_json(d.rbfn.bias)}};
    } else {
        j["network"] = to_json(d.mlp);
    }
    return j;
}

Checkpoint checkpoint_from_json(const json& j) {
    const std::string ctx = "checkpoint";
    check_keys(j, {"format", "format_version", "model_kind", "n_params", "phase", "grid", "config", "network",
                   "normalization", "rbfn"},
               ctx);
    const json& tag = field(j, "format", ctx);
    if (!tag.is_string() || tag.get<std::string>() != kCheckpointTag) throw FormatError("not an fssml checkpoint");
    const json& version = field(j, "format_version", ctx);
    if (!version.is_number_integer() || version.get<int>() != kCheckpointFormatVersion)
        throw FormatError("checkpoint: unsupported format_version " + version.dump());

    Checkpoint c;
    c.grid = data::grid_from_json(field(j, "grid", ctx));
    if (j.contains("config")) c.config = j["config"];
    if (j.contains("phase")) {
        if (!j["phase"].is_number_integer()) throw FormatError("checkpoint.phase: expected an integer");
        c.phase = j["phase"].get<int>();
    }
    const json& kind_j = field(j, "model_kind", ctx);
    if (!kind_j.is_string()) throw FormatError("checkpoint.model_kind: expected a string");
    const std::string kind = kind_j.get<std::string>();
    const json& norm = field(j, "normalization", ctx);

    if (kind == "model-based") {
        check_keys(norm, {"x", "c"}, ctx + ".normalization");
        ModelBasedModel m;
        m.params = mlp_from_json(field(j, "network", ctx));
        m.norm.x = geometry_norm_from(field(norm, "x", ctx), ctx + ".normalization.x");
        const json& cn = field(norm, "c", ctx);
        check_keys(cn, {"log_mean", "log_std", "margin"}, ctx + ".normalization.c");
        m.norm.c.log_mean = vector_from(field(cn, "log_mean", ctx), ctx + ".normalization.c.log_mean");
        m.norm.c.log_std = vector_from(field(cn, "log_std", ctx), ctx + ".normalization.c.log_std");
        m.norm.c.margin = number(field(cn, "margin", ctx), ctx + ".normalization.c.margin");
        if (m.norm.c.log_mean.size() != m.norm.c.log_std.size() ||
            static_cast<std::size_t>(m.norm.c.log_mean.size()) != m.params.output_size() ||
            static_cast<std::size_t>(m.norm.x.mean.size()) != m.params.input_size())
            throw FormatError("checkpoint: normalization does not match the network");
        c.model = std::move(m);
        return c;
    }

    DirectModel d;
    try {
        d.kind = direct_kind_from_string(kind);
    } catch (const UsageError&) {
        throw FormatError("checkpoint: unknown model_kind '" + kind + "'");
    }
    d.grid = c.grid;
    check_keys(norm, {"x"}, ctx + ".normalization");
    d.xnorm = geometry_norm_from(field(norm, "x", ctx), ctx + ".normalization.x");
    const auto n_out = static_cast<Eigen::Index>(4 * d.grid.size());
    if (d.kind == DirectKind::Rbfn) {
        const json& r = field(j, "rbfn", ctx);
        check_keys(r, {"centers", "widths", "weights", "bias"}, ctx + ".rbfn");
        d.rbfn.widths = vector_from(field(r, "widths", ctx), ctx + ".rbfn.widths");
        const Eigen::Index k = d.rbfn.widths.size();
        d.rbfn.centers = matrix_from(field(r, "centers", ctx), k, d.xnorm.mean.size(), ctx + ".rbfn.centers");
        d.rbfn.weights = matrix_from(field(r, "weights", ctx), n_out, k, ctx + ".rbfn.weights");
        d.rbfn.bias = vector_from(field(r, "bias", ctx), ctx + ".rbfn.bias");
        if (d.rbfn.bias.size() != n_out || (d.rbfn.widths.array() <= 0.0).any())
            throw FormatError("checkpoint: inconsistent rbfn parameters");
    } else {
        d.mlp = mlp_from_json(field(j, "network", ctx));
        if (static_cast<Eigen::Index>(d.mlp.output_size()) != n_out)
            throw FormatError("checkpoint: network output does not match the grid");
    }
    c.model = std::move(d);
    return c;
}

void write_checkpoint(const Checkpoint& c, const std::filesystem::path& path) {
    data::write_text_file(path, checkpoint_to_json(c).dump(1) + "\n");
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
    const std::string text = data::read_text_file(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(data::line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0),
                         std::string("invalid checkpoint JSON: ") + e.what());
    }
    return checkpoint_from_json(j);
}

}  // namespace fssml::nn
