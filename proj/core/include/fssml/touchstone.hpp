#pragma once

#include <filesystem>
#include <string>

#include "fssml/em.hpp"

/// Two-port Touchstone v1 (.s2p) files.
namespace fssml::data {

struct TouchstoneData {
    em::SResponse s;
    double z0 = 50.0;  // reference resistance from the option line
};

/// `# GHz S RI R <z0>` then one line per frequency:
/// f s11re s11im s21re s21im s12re s12im s22re s22im, 9 significant digits.
std::string format_touchstone(const em::SResponse& s, double z0, const std::string& comment = {});
void write_touchstone(const em::SResponse& s, const std::filesystem::path& path, double z0,
                      const std::string& comment = {});

/// Accepts `!` comments, any whitespace, units Hz/kHz/MHz/GHz and RI, MA or DB
/// data (default: GHz S MA R 50). Frequencies must be ascending and evenly
/// spaced, since responses live on a uniform grid. Errors are ParseError
/// carrying the offending line.
TouchstoneData parse_touchstone(const std::string& text);
TouchstoneData read_touchstone(const std::filesystem::path& path);

}  // namespace fssml::data
