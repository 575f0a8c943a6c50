#include "fssml/sweep.hpp"

#include <cmath>

#include "fssml/errors.hpp"

namespace fssml::data {

Geometry Geometry::from(std::span<const double> v) {
    if (v.size() != kDim) throw UsageError("geometry needs exactly 3 values");
    return Geometry{v[0], v[1], v[2]};
}

double SweepDimension::level(std::size_t i) const {
    if (i >= n_levels) throw UsageError("sweep level index out of range");
    if (n_levels == 1) return min;
    if (i + 1 == n_levels) return max;
    return min + static_cast<double>(i) * (max - min) / static_cast<double>(n_levels - 1);
}

namespace {

void check_dimension(const SweepDimension& d, const char* name) {
    if (d.n_levels < 1) throw UsageError(std::string(name) + ": n_levels must be >= 1");
    if (!std::isfinite(d.min) || !std::isfinite(d.max) || d.min <= 0.0)
        throw UsageError(std::string(name) + ": bounds must be finite and positive");
    if (d.max < d.min) throw UsageError(std::string(name) + ": max below min");
}

bool within(const SweepDimension& d, double v) { return v >= d.min && v <= d.max; }

}  // namespace

void OracleConfig::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(std::isfinite(v) && v > 0.0)) throw UsageError(std::string("oracle.") + name + " must be positive");
    };
    auto nonneg = [](double v, const char* name) {
        if (!(std::isfinite(v) && v >= 0.0)) throw UsageError(std::string("oracle.") + name + " must be >= 0");
    };
    nonneg(alpha, "alpha");
    nonneg(weak, "weak");
    positive(second_ratio, "second_ratio");
    positive(f_ref, "f_ref");
    positive(l_ref, "l_ref");
    nonneg(gamma, "gamma");
    positive(z_r, "z_r");
    nonneg(kappa, "kappa");
    positive(sep_ref, "sep_ref");
    positive(sep_decay, "sep_decay");
}

void SweepSpec::validate() const {
    check_dimension(slot_length, "slot_length");
    check_dimension(separation, "separation");
    check_dimension(slot_length_2, "slot_length_2");
    oracle.validate();
}

bool SweepSpec::contains(const Geometry& x) const {
    return within(slot_length, x.slot_length) && within(separation, x.separation) &&
           within(slot_length_2, x.slot_length_2);
}

std::vector<Geometry> generate_sweep(const SweepSpec& spec) {
    spec.validate();
    std::vector<Geometry> out;
    out.reserve(spec.size());
    for (std::size_t i = 0; i < spec.slot_length.n_levels; ++i)
        for (std::size_t j = 0; j < spec.separation.n_levels; ++j)
            for (std::size_t k = 0; k < spec.slot_length_2.n_levels; ++k)
                out.push_back({spec.slot_length.level(i), spec.separation.level(j), spec.slot_length_2.level(k)});
    return out;
}

em::Topology geometry_topology(const Geometry& x) {
    if (!(x.separation > 0.0)) throw DomainError("separation must be positive");
    return em::Topology::two_screen(x.separation * 1e-3);
}

}  // namespace fssml::data
