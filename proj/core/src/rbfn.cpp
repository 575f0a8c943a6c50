#include "fssml/rbfn.hpp"

#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Dense>

#include "fssml/errors.hpp"

namespace fssml::nn {

namespace {

// Uniform in [0, 1) from the top 53 bits; portable across standard libraries.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

void RBFNConfig::validate() const {
    if (n_centers < 1) throw UsageError("rbfn.n_centers must be >= 1");
    if (!(width_scale > 0.0) || !std::isfinite(width_scale)) throw UsageError("rbfn.width_scale must be positive");
    if (!(ridge >= 0.0) || !std::isfinite(ridge)) throw UsageError("rbfn.ridge must be >= 0");
}

std::size_t count_params(const RBFNParams& p) {
    return static_cast<std::size_t>(p.centers.size() + p.widths.size() + p.weights.size() + p.bias.size());
}

Eigen::MatrixXd kmeans(const Eigen::MatrixXd& x, std::size_t k, std::uint64_t seed, std::size_t iterations) {
    const Eigen::Index n = x.cols();
    const Eigen::Index d = x.rows();
    if (n == 0) throw UsageError("kmeans on an empty point set");
    if (k < 1 || static_cast<Eigen::Index>(k) > n) throw UsageError("kmeans needs 1 <= k <= number of points");
    const auto kk = static_cast<Eigen::Index>(k);

    std::mt19937_64 rng(seed);
    Eigen::MatrixXd c(kk, d);
    Eigen::Index first = static_cast<Eigen::Index>(uniform01(rng) * static_cast<double>(n));
    c.row(0) = x.col(first).transpose();
    Eigen::VectorXd d2 = (x.colwise() - x.col(first)).colwise().squaredNorm().transpose();
    for (Eigen::Index j = 1; j < kk; ++j) {
        const double total = d2.sum();
        Eigen::Index pick = n - 1;
        if (total > 0.0) {
            const double r = uniform01(rng) * total;
            double acc = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                acc += d2[i];
                if (r < acc && d2[i] > 0.0) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = static_cast<Eigen::Index>(uniform01(rng) * static_cast<double>(n));
        }
        c.row(j) = x.col(pick).transpose();
        d2 = d2.cwiseMin((x.colwise() - x.col(pick)).colwise().squaredNorm().transpose());
    }

    std::vector<Eigen::Index> assign(static_cast<std::size_t>(n), -1);
    for (std::size_t it = 0; it < iterations; ++it) {
        bool changed = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            Eigen::Index best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (Eigen::Index j = 0; j < kk; ++j) {
                const double dist = (c.row(j).transpose() - x.col(i)).squaredNorm();
                if (dist < best_d) {
                    best_d = dist;
                    best = j;
                }
            }
            if (assign[static_cast<std::size_t>(i)] != best) changed = true;
            assign[static_cast<std::size_t>(i)] = best;
        }
        if (!changed) break;
        Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(kk, d);
        Eigen::VectorXd cnt = Eigen::VectorXd::Zero(kk);
        for (Eigen::Index i = 0; i < n; ++i) {
            sum.row(assign[static_cast<std::size_t>(i)]) += x.col(i).transpose();
            cnt[assign[static_cast<std::size_t>(i)]] += 1.0;
        }
        for (Eigen::Index j = 0; j < kk; ++j)
            if (cnt[j] > 0.0) c.row(j) = sum.row(j) / cnt[j];  // empty clusters keep their center
    }
    return c;
}

Eigen::MatrixXd rbfn_features(const RBFNParams& p, const Eigen::MatrixXd& x) {
    if (x.rows() != p.centers.cols()) throw UsageError("rbfn input dimension mismatch");
    Eigen::MatrixXd phi(p.centers.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.cols(); ++i)
        for (Eigen::Index k = 0; k < p.centers.rows(); ++k) {
            const double r2 = (p.centers.row(k).transpose() - x.col(i)).squaredNorm();
            phi(k, i) = std::exp(-r2 / (2.0 * p.widths[k] * p.widths[k]));
        }
    return phi;
}

RBFNParams fit_rbfn(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const RBFNConfig& config, std::uint64_t seed) {
    config.validate();
    if (x.cols() != y.cols()) throw UsageError("rbfn inputs and targets differ in sample count");
    if (x.cols() == 0) throw UsageError("rbfn fit on an empty training set");

    RBFNParams p;
    const std::size_t k = std::min<std::size_t>(config.n_centers, static_cast<std::size_t>(x.cols()));
    p.centers = kmeans(x, k, seed, config.kmeans_iterations);
    const auto kk = static_cast<Eigen::Index>(k);
    p.widths.resize(kk);
    for (Eigen::Index j = 0; j < kk; ++j) {
        double nearest = std::numeric_limits<double>::infinity();
        for (Eigen::Index m = 0; m < kk; ++m)
            if (m != j) nearest = std::min(nearest, (p.centers.row(j) - p.centers.row(m)).norm());
        // A lone center, or one sitting on top of another, falls back to unit width.
        p.widths[j] = config.width_scale * (std::isfinite(nearest) && nearest > 0.0 ? nearest : 1.0);
    }

    Eigen::MatrixXd a(x.cols(), kk + 1);
    a.leftCols(kk) = rbfn_features(p, x).transpose();
    a.col(kk).setOnes();
    Eigen::MatrixXd gram = a.transpose() * a;
    gram.diagonal().array() += config.ridge;
    const Eigen::MatrixXd w = gram.ldlt().solve(a.transpose() * y.transpose());  // (k+1) x n_out
    p.weights = w.topRows(kk).transpose();
    p.bias = w.row(kk).transpose();
    return p;
}

Eigen::MatrixXd rbfn_predict(const RBFNParams& p, const Eigen::MatrixXd& x) {
    return (p.weights * rbfn_features(p, x)).colwise() + p.bias;
}

}  // namespace fssml::nn
