#include "fssml/touchstone.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

#include "fssml/dataset.hpp"
#include "fssml/errors.hpp"

namespace fssml::data {

namespace {

std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return s;
}

std::vector<std::string> tokens(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> out;
    for (std::string t; in >> t;) out.push_back(t);
    return out;
}

bool parse_double(const std::string& t, double& out) {
    const char* first = t.data();
    const char* last = t.data() + t.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && std::isfinite(out);
}

enum class DataFormat { RI, MA, DB };

struct Options {
    double scale = 1e9;  // GHz
    DataFormat format = DataFormat::MA;
    double z0 = 50.0;
};

Options parse_options(const std::vector<std::string>& tok, std::size_t line) {
    Options o;
    // tok[0] is "#"
    for (std::size_t i = 1; i < tok.size(); ++i) {
        const std::string t = upper(tok[i]);
        if (t == "HZ") o.scale = 1.0;
        else if (t == "KHZ") o.scale = 1e3;
        else if (t == "MHZ") o.scale = 1e6;
        else if (t == "GHZ") o.scale = 1e9;
        else if (t == "S") {
        } else if (t == "Y" || t == "Z" || t == "H" || t == "G") {
            throw ParseError(line, "only S-parameter files are supported, got '" + tok[i] + "'");
        } else if (t == "RI") o.format = DataFormat::RI;
        else if (t == "MA") o.format = DataFormat::MA;
        else if (t == "DB") o.format = DataFormat::DB;
        else if (t == "R") {
            if (i + 1 >= tok.size() || !parse_double(tok[i + 1], o.z0) || !(o.z0 > 0.0))
                throw ParseError(line, "option line: 'R' must be followed by a positive resistance");
            ++i;
        } else {
            throw ParseError(line, "option line: unexpected token '" + tok[i] + "'");
        }
    }
    return o;
}

ComplexScalar to_complex(double a, double b, DataFormat f) {
    constexpr double kDeg = em::kPi / 180.0;
    switch (f) {
        case DataFormat::RI: return {a, b};
        case DataFormat::MA: return {a * std::cos(b * kDeg), a * std::sin(b * kDeg)};
        case DataFormat::DB: {
            const double mag = std::pow(10.0, a / 20.0);
            return {mag * std::cos(b * kDeg), mag * std::sin(b * kDeg)};
        }
    }
    return {};
}

void append(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, " %.17g", v);
    out += buf;
}

}  // namespace

std::string format_touchstone(const em::SResponse& s, double z0, const std::string& comment) {
    if (!(z0 > 0.0) || !std::isfinite(z0)) throw DomainError("reference resistance must be positive");
    std::string out;
    if (!comment.empty()) {
        std::istringstream in(comment);
        for (std::string l; std::getline(in, l);) out += "! " + l + "\n";
    }
    char opt[64];
    std::snprintf(opt, sizeof opt, "# Hz S RI R %.17g\n", z0);
    out += opt;
    for (std::size_t j = 0; j < s.size(); ++j) {
        const em::SPoint& p = s.points[j];
        char f[40];
        std::snprintf(f, sizeof f, "%.17g", s.grid[j]);
        out += f;
        for (double v : {p.s11.re, p.s11.im, p.s21.re, p.s21.im, p.s12.re, p.s12.im, p.s22.re, p.s22.im}) append(out, v);
        out += '\n';
    }
    return out;
}

void write_touchstone(const em::SResponse& s, const std::filesystem::path& path, double z0,
                      const std::string& comment) {
    write_text_file(path, format_touchstone(s, z0, comment));
}

TouchstoneData parse_touchstone(const std::string& text) {
    Options opt;
    bool have_options = false;
    std::vector<double> freqs;
    std::vector<em::SPoint> pts;
    std::vector<std::size_t> line_of_point;

    std::istringstream in(text);
    std::size_t line_no = 0;
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        if (auto bang = line.find('!'); bang != std::string::npos) line.erase(bang);
        const auto tok = tokens(line);
        if (tok.empty()) continue;
        if (tok[0][0] == '#') {
            std::vector<std::string> t = tok;
            if (t[0].size() > 1) {  // "#GHz" written without a space
                t.insert(t.begin() + 1, t[0].substr(1));
                t[0] = "#";
            }
            if (!have_options) opt = parse_options(t, line_no);
            have_options = true;  // later option lines are ignored, as Touchstone v1 prescribes
            continue;
        }
        if (tok.size() != 9)
            throw ParseError(line_no, "expected 9 columns for a two-port data line, got " + std::to_string(tok.size()));
        double v[9];
        for (std::size_t k = 0; k < 9; ++k)
            if (!parse_double(tok[k], v[k])) throw ParseError(line_no, "not a number: '" + tok[k] + "'");
        const double f = v[0] * opt.scale;
        if (!(f > 0.0)) throw ParseError(line_no, "frequency must be positive");
        if (!freqs.empty() && !(f > freqs.back())) throw ParseError(line_no, "frequencies must be strictly ascending");
        freqs.push_back(f);
        pts.push_back({to_complex(v[1], v[2], opt.format), to_complex(v[3], v[4], opt.format),
                       to_complex(v[5], v[6], opt.format), to_complex(v[7], v[8], opt.format)});
        line_of_point.push_back(line_no);
    }
    if (freqs.size() < 2) throw ParseError(line_no, "need at least two frequency points");

    const em::FrequencyGrid grid(freqs.front(), freqs.back(), freqs.size());
    const double step = (grid.stop() - grid.start()) / static_cast<double>(grid.size() - 1);
    for (std::size_t j = 0; j < freqs.size(); ++j)
        if (std::abs(freqs[j] - grid[j]) > 1e-6 * step)
            throw ParseError(line_of_point[j], "frequency grid is not evenly spaced");
    return {em::SResponse(grid, std::move(pts)), opt.z0};
}

TouchstoneData read_touchstone(const std::filesystem::path& path) { return parse_touchstone(read_text_file(path)); }

}  // namespace fssml::data
