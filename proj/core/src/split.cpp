#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "fssml/dataset.hpp"
#include "fssml/errors.hpp"

namespace fssml::data {

namespace {

// Unbiased draw in [0, bound) from raw engine output. Unlike
// std::uniform_int_distribution this is the same on every standard library.
std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return v % bound;
}

}  // namespace

SplitIndices split_indices(std::size_t n, double train_fraction, std::uint64_t seed) {
    if (n < 2) throw UsageError("split needs at least 2 samples");
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw UsageError("train fraction must lie in (0, 1)");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[draw_below(rng, i + 1)]);

    auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n)));
    n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
    SplitIndices out;
    out.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
    return out;
}

Split split(const Dataset& dataset, double train_fraction, std::uint64_t seed) {
    const SplitIndices idx = split_indices(dataset.size(), train_fraction, seed);
    Split out;
    for (std::size_t i : idx.train) out.train.push_back(dataset.samples[i]);
    for (std::size_t i : idx.test) out.test.push_back(dataset.samples[i]);
    return out;
}

}  // namespace fssml::data
