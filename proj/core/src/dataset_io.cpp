#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

#include "fssml/dataset.hpp"
#include "fssml/errors.hpp"
#include "fssml/json_util.hpp"

namespace fssml::data {

using nlohmann::json;
using namespace fssml::detail;

namespace {

constexpr std::string_view kDatasetTag = "fssml-dataset";

json complex_series(const std::vector<em::SPoint>& pts, ComplexScalar em::SPoint::*member) {
    json re = json::array(), im = json::array();
    for (const auto& p : pts) {
        re.push_back((p.*member).re);
        im.push_back((p.*member).im);
    }
    return json{{"re", std::move(re)}, {"im", std::move(im)}};
}

void read_series(const json& j, std::vector<em::SPoint>& pts, ComplexScalar em::SPoint::*member,
                 const std::string& ctx) {
    check_keys(j, {"re", "im"}, ctx);
    const auto re = numbers(field(j, "re", ctx), ctx + ".re");
    const auto im = numbers(field(j, "im", ctx), ctx + ".im");
    if (re.size() != pts.size() || im.size() != pts.size())
        throw FormatError(ctx + ": expected " + std::to_string(pts.size()) + " values");
    for (std::size_t k = 0; k < pts.size(); ++k) pts[k].*member = {re[k], im[k]};
}

json dimension_to_json(const SweepDimension& d) {
    return json{{"min", d.min}, {"max", d.max}, {"n_levels", d.n_levels}};
}

SweepDimension dimension_from_json(const json& j, SweepDimension d, const std::string& ctx) {
    check_keys(j, {"min", "max", "n_levels"}, ctx);
    read_opt(j, "min", d.min, ctx);
    read_opt(j, "max", d.max, ctx);
    read_opt(j, "n_levels", d.n_levels, ctx);
    return d;
}

const char* kind_name(em::ResonatorKind k) { return k == em::ResonatorKind::ParallelLC ? "parallel_lc" : "series_lc"; }

}  // namespace

json to_json(const em::FrequencyGrid& g) {
    return json{{"f_start", g.start()}, {"f_stop", g.stop()}, {"n_points", g.size()}};
}

em::FrequencyGrid grid_from_json(const json& j) {
    check_keys(j, {"f_start", "f_stop", "n_points"}, "grid");
    try {
        return em::FrequencyGrid(number(field(j, "f_start", "grid"), "grid.f_start"),
                                 number(field(j, "f_stop", "grid"), "grid.f_stop"),
                                 count(field(j, "n_points", "grid"), "grid.n_points"));
    } catch (const DomainError& e) {
        throw FormatError(std::string("grid: ") + e.what());
    }
}

json to_json(const em::Topology& t) {
    json screens = json::array();
    for (auto k : t.screens) screens.push_back(kind_name(k));
    json spacers = json::array();
    for (const auto& s : t.spacers) spacers.push_back(json{{"eps_r", s.eps_r}, {"length", s.length}});
    return json{{"screens", screens}, {"spacers", spacers}, {"port_eps_r", t.port_eps_r}};
}

namespace {

// Fields only; lengths are not checked.
em::Topology topology_fields(const json& j) {
    check_keys(j, {"screens", "spacers", "port_eps_r"}, "topology");
    em::Topology t;
    const json& screens = field(j, "screens", "topology");
    if (!screens.is_array()) throw FormatError("topology.screens: expected an array");
    for (const auto& s : screens) {
        const std::string name = s.is_string() ? s.get<std::string>() : "";
        if (name == "parallel_lc") t.screens.push_back(em::ResonatorKind::ParallelLC);
        else if (name == "series_lc") t.screens.push_back(em::ResonatorKind::SeriesLC);
        else throw FormatError("topology.screens: unknown resonator '" + name + "'");
    }
    const json& spacers = field(j, "spacers", "topology");
    if (!spacers.is_array()) throw FormatError("topology.spacers: expected an array");
    for (const auto& s : spacers) {
        check_keys(s, {"eps_r", "length"}, "topology.spacers");
        em::Spacer sp;
        read_opt(s, "eps_r", sp.eps_r, "topology.spacers");
        read_opt(s, "length", sp.length, "topology.spacers");
        t.spacers.push_back(sp);
    }
    read_opt(j, "port_eps_r", t.port_eps_r, "topology");
    return t;
}

}  // namespace

em::Topology topology_from_json(const json& j) {
    em::Topology t = topology_fields(j);
    try {
        t.validate();
    } catch (const std::exception& e) {
        throw FormatError(std::string("topology: ") + e.what());
    }
    return t;
}

json to_json(const OracleConfig& o) {
    return json{{"alpha", o.alpha},       {"weak", o.weak},   {"second_ratio", o.second_ratio},
                {"f_ref", o.f_ref},       {"l_ref", o.l_ref}, {"gamma", o.gamma},
                {"z_r", o.z_r},           {"kappa", o.kappa}, {"sep_ref", o.sep_ref},
                {"sep_decay", o.sep_decay}};
}

OracleConfig oracle_from_json(const json& j) {
    const std::string ctx = "oracle";
    check_keys(j, {"alpha", "weak", "second_ratio", "f_ref", "l_ref", "gamma", "z_r", "kappa", "sep_ref", "sep_decay"},
               ctx);
    OracleConfig o;
    read_opt(j, "alpha", o.alpha, ctx);
    read_opt(j, "weak", o.weak, ctx);
    read_opt(j, "second_ratio", o.second_ratio, ctx);
    read_opt(j, "f_ref", o.f_ref, ctx);
    read_opt(j, "l_ref", o.l_ref, ctx);
    read_opt(j, "gamma", o.gamma, ctx);
    read_opt(j, "z_r", o.z_r, ctx);
    read_opt(j, "kappa", o.kappa, ctx);
    read_opt(j, "sep_ref", o.sep_ref, ctx);
    read_opt(j, "sep_decay", o.sep_decay, ctx);
    return o;
}

json to_json(const SweepSpec& s) {
    return json{{"slot_length", dimension_to_json(s.slot_length)},
                {"separation", dimension_to_json(s.separation)},
                {"slot_length_2", dimension_to_json(s.slot_length_2)},
                {"grid", to_json(s.grid)},
                {"oracle", to_json(s.oracle)}};
}

SweepSpec sweep_from_json(const json& j) {
    check_keys(j, {"slot_length", "separation", "slot_length_2", "grid", "oracle"}, "sweep");
    SweepSpec s;
    if (j.contains("slot_length")) s.slot_length = dimension_from_json(j["slot_length"], s.slot_length, "sweep.slot_length");
    if (j.contains("separation")) s.separation = dimension_from_json(j["separation"], s.separation, "sweep.separation");
    if (j.contains("slot_length_2"))
        s.slot_length_2 = dimension_from_json(j["slot_length_2"], s.slot_length_2, "sweep.slot_length_2");
    if (j.contains("grid")) s.grid = grid_from_json(j["grid"]);
    if (j.contains("oracle")) s.oracle = oracle_from_json(j["oracle"]);
    return s;
}

json dataset_to_json(const Dataset& d) {
    json samples = json::array();
    for (const Sample& s : d.samples) {
        if (!(s.s.grid == d.grid())) throw UsageError("sample response grid differs from the dataset grid");
        json c = std::vector<double>(s.c.values().begin(), s.c.values().end());
        const auto xv = s.x.values();
        samples.push_back(json{
            {"id", s.id},
            {"x", std::vector<double>(xv.begin(), xv.end())},
            {"c", std::move(c)},
            {"s",
             json{{"s11", complex_series(s.s.points, &em::SPoint::s11)},
                  {"s21", complex_series(s.s.points, &em::SPoint::s21)},
                  {"s12", complex_series(s.s.points, &em::SPoint::s12)},
                  {"s22", complex_series(s.s.points, &em::SPoint::s22)}}},
            {"fit", json{{"residual", s.fit.residual},
                         {"mean_abs_error", s.fit.mean_abs_error},
                         {"converged", s.fit.converged}}},
        });
    }
    em::Topology topo = geometry_topology(Geometry{1.0, 1.0, 1.0});
    topo.spacers[0].length = 0.0;
    return json{{"format", kDatasetTag},
                {"format_version", kDatasetFormatVersion},
                {"sweep", to_json(d.sweep)},
                {"grid", to_json(d.grid())},
                // per sample the spacer length is the separation, in metres
                {"topology", to_json(topo)},
                {"spacer_length_source", "separation_mm"},
                {"config", d.config},
                {"samples", std::move(samples)}};
}

Dataset dataset_from_json(const json& j) {
    check_keys(j, {"format", "format_version", "sweep", "grid", "topology", "spacer_length_source", "config", "samples"},
               "dataset");
    const json& tag = field(j, "format", "dataset");
    if (!tag.is_string() || tag.get<std::string>() != kDatasetTag) throw FormatError("dataset: not an fssml dataset");
    const json& version = field(j, "format_version", "dataset");
    if (!version.is_number_integer() || version.get<int>() != kDatasetFormatVersion)
        throw FormatError("dataset: unsupported format_version " + version.dump() + " (expected " +
                          std::to_string(kDatasetFormatVersion) + ")");

    Dataset d;
    d.sweep = sweep_from_json(field(j, "sweep", "dataset"));
    if (!(grid_from_json(field(j, "grid", "dataset")) == d.sweep.grid))
        throw FormatError("dataset: grid disagrees with the sweep grid");
    // The stored topology is a template: spacer lengths come from each sample.
    em::Topology topo = topology_fields(field(j, "topology", "dataset"));
    if (topo.n_screens() != 2 || topo.spacers.size() != 1)
        throw FormatError("dataset: only two-screen topologies are supported");
    topo.spacers[0].length = 1.0;
    try {
        topo.validate();
    } catch (const std::exception& e) {
        throw FormatError(std::string("dataset.topology: ") + e.what());
    }
    if (j.contains("config")) d.config = j["config"];

    const json& samples = field(j, "samples", "dataset");
    if (!samples.is_array()) throw FormatError("dataset.samples: expected an array");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const json& sj = samples[i];
        const std::string ctx = "dataset.samples[" + std::to_string(i) + "]";
        check_keys(sj, {"id", "x", "c", "s", "fit"}, ctx);
        Sample s;
        s.id = count(field(sj, "id", ctx), ctx + ".id");
        const auto xv = numbers(field(sj, "x", ctx), ctx + ".x");
        if (xv.size() != Geometry::kDim) throw FormatError(ctx + ".x: expected 3 values");
        s.x = Geometry::from(xv);
        try {
            s.c = em::CircuitParams(numbers(field(sj, "c", ctx), ctx + ".c"));
        } catch (const DomainError& e) {
            throw FormatError(ctx + ".c: " + e.what());
        }
        if (s.c.size() != topo.n_params()) throw FormatError(ctx + ".c: wrong length for the topology");
        const json& sr = field(sj, "s", ctx);
        check_keys(sr, {"s11", "s21", "s12", "s22"}, ctx + ".s");
        std::vector<em::SPoint> pts(d.sweep.grid.size());
        read_series(field(sr, "s11", ctx), pts, &em::SPoint::s11, ctx + ".s.s11");
        read_series(field(sr, "s21", ctx), pts, &em::SPoint::s21, ctx + ".s.s21");
        read_series(field(sr, "s12", ctx), pts, &em::SPoint::s12, ctx + ".s.s12");
        read_series(field(sr, "s22", ctx), pts, &em::SPoint::s22, ctx + ".s.s22");
        s.s = em::SResponse(d.sweep.grid, std::move(pts));
        if (sj.contains("fit")) {
            const json& fj = sj["fit"];
            check_keys(fj, {"residual", "mean_abs_error", "converged"}, ctx + ".fit");
            read_opt(fj, "residual", s.fit.residual, ctx + ".fit");
            read_opt(fj, "mean_abs_error", s.fit.mean_abs_error, ctx + ".fit");
            if (fj.contains("converged")) {
                if (!fj["converged"].is_boolean()) throw FormatError(ctx + ".fit.converged: expected a boolean");
                s.fit.converged = fj["converged"].get<bool>();
            }
        }
        d.samples.push_back(std::move(s));
    }
    if (d.samples.empty()) throw FormatError("dataset: no samples");
    return d;
}

std::size_t line_of_offset(const std::string& text, std::size_t pos) {
    pos = std::min(pos, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << text;
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

void write_dataset(const Dataset& d, const std::filesystem::path& path) {
    if (d.samples.empty()) throw UsageError("refusing to write an empty dataset");
    write_text_file(path, dataset_to_json(d).dump(1) + "\n");
}

Dataset read_dataset(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0), std::string("invalid dataset JSON: ") + e.what());
    }
    return dataset_from_json(j);
}

}  // namespace fssml::data
