#include <doctest.h>

#include <random>

#include "fssml/em.hpp"
#include "fssml/errors.hpp"
#include "helpers.hpp"
#include "oracles/frozen_values.hpp"

using namespace fssml;
using namespace fssml::em;

TEST_SUITE("em") {

TEST_CASE("parallel LC admittance matches the scalar reference") {
    const ComplexScalar y = admittance(ResonatorKind::ParallelLC, 1e-9, 1e-12, 1e10);
    CHECK(y.re == 0.0);
    CHECK(testing::rel_err(y.im, frozen::kParallelLcSusceptance) < 1e-14);
}

TEST_CASE("parallel LC admittance vanishes at resonance") {
    const double L = 2e-9, C = 0.5e-12;
    const double f0 = 1.0 / (2.0 * kPi * std::sqrt(L * C));
    CHECK(std::abs(admittance(ResonatorKind::ParallelLC, L, C, f0).im) < 1e-15);
}

TEST_CASE("series LC at resonance raises a pole error") {
    const double L = 1.0, C = 1.0;
    const double f0 = 1.0 / (2.0 * kPi);
    CHECK_THROWS_AS(admittance(ResonatorKind::SeriesLC, L, C, f0), PoleError);
}

TEST_CASE("non-positive element values are domain errors") {
    CHECK_THROWS_AS(admittance(ResonatorKind::ParallelLC, 0.0, 1e-12, 1e10), DomainError);
    CHECK_THROWS_AS(admittance(ResonatorKind::ParallelLC, 1e-9, -1e-12, 1e10), DomainError);
    CHECK_THROWS_AS(abcd_line(-1.0, 1.0, 1e10), DomainError);
    CHECK_THROWS_AS(CircuitParams({1e-9, 0.0}), DomainError);
}

TEST_CASE("quarter-wave line matches the reference matrix") {
    const ABCDMatrix m = abcd_line(kSpeedOfLight / 4e10, 1.0, 1e10, 377.0);
    CHECK(std::abs(m.a.re - frozen::kQuarterWave[0]) < 1e-15);
    CHECK(testing::rel_err(m.b.im, frozen::kQuarterWave[1]) < 1e-14);
    CHECK(testing::rel_err(m.c.im, frozen::kQuarterWave[2]) < 1e-14);
    CHECK(std::abs(m.d.re - frozen::kQuarterWave[3]) < 1e-15);
    CHECK(m.a.im == 0.0);
    CHECK(m.b.re == 0.0);
}

TEST_CASE("zero-length line is the identity") {
    const ABCDMatrix m = abcd_line(0.0, 2.2, 1e10);
    CHECK(m.a.re == 1.0);
    CHECK(m.d.re == 1.0);
    CHECK(abs(m.b) == 0.0);
    CHECK(abs(m.c) == 0.0);
}

TEST_CASE("huge shunt admittance approaches a short") {
    const SPoint s = abcd_to_s(abcd_shunt({0.0, 1e12}), kFreeSpaceImpedance);
    CHECK(abs(s.s21) < 1e-9);
    CHECK(abs(s.s11 + ComplexScalar{1.0, 0.0}) < 1e-9);
}

TEST_CASE("cascade of nothing is a usage error") {
    CHECK_THROWS_AS(cascade(std::span<const ABCDMatrix>{}), UsageError);
}

TEST_CASE("half-wave spacer makes two identical screens look like one at resonance") {
    const double L = 1e-10, C = 2.5e-12;
    const double f0 = 1.0 / (2.0 * kPi * std::sqrt(L * C));
    const ComplexScalar y = admittance(ResonatorKind::ParallelLC, L, C, f0);
    const std::array<ABCDMatrix, 3> chain{abcd_shunt(y), abcd_line(kSpeedOfLight / (2.0 * f0), 1.0, f0), abcd_shunt(y)};
    const SPoint two = abcd_to_s(cascade(chain), kFreeSpaceImpedance);
    const SPoint one = abcd_to_s(abcd_shunt(y), kFreeSpaceImpedance);
    CHECK(std::abs(abs(two.s21) - abs(one.s21)) < 1e-12);
}

TEST_CASE("two-screen response matches the independent evaluation") {
    const CircuitParams c({frozen::kTwoScreenCircuit[0], frozen::kTwoScreenCircuit[1], frozen::kTwoScreenCircuit[2],
                           frozen::kTwoScreenCircuit[3]});
    const FrequencyGrid grid = FrequencyGrid::standard();
    const SResponse s = f_phys(c, Topology::two_screen(frozen::kTwoScreenSeparation), grid);
    for (std::size_t i = 0; i < std::size(frozen::kTwoScreenIndex); ++i) {
        const SPoint& p = s.points[frozen::kTwoScreenIndex[i]];
        const double* ref = frozen::kTwoScreenS + 6 * i;
        const double got[6] = {p.s11.re, p.s11.im, p.s21.re, p.s21.im, p.s22.re, p.s22.im};
        for (int k = 0; k < 6; ++k) CHECK(std::abs(got[k] - ref[k]) < 1e-12);
    }
}

TEST_CASE("random circuits conserve power and are reciprocal") {
    std::mt19937_64 rng(7);
    const FrequencyGrid grid = FrequencyGrid::standard();
    std::uniform_real_distribution<double> sep(1e-3, 20e-3);
    for (int trial = 0; trial < 50; ++trial) {
        const Topology topo = Topology::two_screen(sep(rng));
        const SResponse s = f_phys(testing::random_circuit(rng), topo, grid);
        for (const SPoint& p : s.points) {
            CHECK(std::abs(norm(p.s11) + norm(p.s21) - 1.0) < 1e-10);
            CHECK(abs(p.s21 - p.s12) < 1e-12);
        }
    }
}

TEST_CASE("single parallel-LC screen is transparent at resonance") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const CircuitParams c = testing::random_circuit(rng, 1);
        const double f0 = c.resonance(0);
        const FrequencyGrid grid(f0, 2.0 * f0, 2);
        const SResponse s = f_phys(c, testing::single_screen(), grid);
        CHECK(std::abs(abs(s.points[0].s21) - 1.0) < 1e-9);
    }
}

TEST_CASE("grid endpoints are exact and degenerate grids are rejected") {
    const FrequencyGrid g = FrequencyGrid::standard();
    CHECK(g.size() == 201);
    CHECK(g[0] == 6e9);
    CHECK(g[200] == 16e9);
    CHECK(g[100] == 11e9);
    CHECK_THROWS_AS(FrequencyGrid(6e9, 16e9, 1), DomainError);
    CHECK_THROWS_AS(FrequencyGrid(16e9, 6e9, 10), DomainError);
}

TEST_CASE("topology structure is checked") {
    Topology t = Topology::two_screen(5e-3);
    CHECK(t.n_params() == 4);
    t.spacers.clear();
    CHECK_THROWS_AS(t.validate(), UsageError);
    CHECK_THROWS_AS(f_phys(CircuitParams({1e-10, 1e-12}), Topology::two_screen(5e-3), FrequencyGrid::standard()),
                    UsageError);
}

}
