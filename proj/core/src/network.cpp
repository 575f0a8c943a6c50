#include "fssml/network.hpp"

#include <cmath>
#include <string>

#include "fssml/errors.hpp"

namespace fssml::nn {

namespace {

double softplus(double z) { return z > 30.0 ? z : std::log1p(std::exp(z)); }

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

Eigen::MatrixXd activate(Activation a, const Eigen::MatrixXd& z) {
    switch (a) {
        case Activation::Tanh: return z.array().tanh().matrix();
        case Activation::Relu: return z.cwiseMax(0.0);
        case Activation::Softplus: return z.unaryExpr([](double v) { return softplus(v); });
        case Activation::Identity: return z;
    }
    return z;
}

// Elementwise derivative of the activation evaluated at the pre-activation.
Eigen::MatrixXd activate_deriv(Activation a, const Eigen::MatrixXd& z) {
    switch (a) {
        case Activation::Tanh: return (1.0 - z.array().tanh().square()).matrix();
        case Activation::Relu: return z.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; });
        case Activation::Softplus: return z.unaryExpr([](double v) { return sigmoid(v); });
        case Activation::Identity: return Eigen::MatrixXd::Ones(z.rows(), z.cols());
    }
    return z;
}

}  // namespace

const char* to_string(Activation a) {
    switch (a) {
        case Activation::Tanh: return "tanh";
        case Activation::Relu: return "relu";
        case Activation::Softplus: return "softplus";
        case Activation::Identity: return "identity";
    }
    return "?";
}

Activation activation_from_string(const std::string& name) {
    if (name == "tanh") return Activation::Tanh;
    if (name == "relu") return Activation::Relu;
    if (name == "softplus") return Activation::Softplus;
    if (name == "identity") return Activation::Identity;
    throw UsageError("unknown activation '" + name + "'");
}

MLPParams::MLPParams(std::vector<std::size_t> sizes, Activation hidden_act, Activation output_act)
    : layer_sizes(std::move(sizes)), hidden(hidden_act), output(output_act) {
    if (layer_sizes.size() < 2) throw UsageError("a network needs at least an input and an output layer");
    for (std::size_t s : layer_sizes) {
        if (s == 0) throw UsageError("layer sizes must be positive");
    }
    theta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(count_params(*this)));
}

MLPParams MLPParams::random(std::vector<std::size_t> sizes, Activation hidden_act, Activation output_act,
                            std::uint64_t seed) {
    MLPParams p(std::move(sizes), hidden_act, output_act);
    std::mt19937_64 rng(seed);
    for (std::size_t k = 0; k < p.n_layers(); ++k) {
        const double fan_in = static_cast<double>(p.layer_sizes[k]);
        const double fan_out = static_cast<double>(p.layer_sizes[k + 1]);
        const bool relu_layer = k + 1 < p.n_layers() && hidden_act == Activation::Relu;
        const double limit = relu_layer ? std::sqrt(6.0 / fan_in) : std::sqrt(6.0 / (fan_in + fan_out));
        std::uniform_real_distribution<double> dist(-limit, limit);
        auto w = p.weight(k);
        for (Eigen::Index j = 0; j < w.cols(); ++j) {
            for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = dist(rng);
        }
    }
    return p;
}

std::size_t MLPParams::weight_offset(std::size_t layer) const {
    std::size_t off = 0;
    for (std::size_t k = 0; k < layer; ++k) off += layer_sizes[k] * layer_sizes[k + 1] + layer_sizes[k + 1];
    return off;
}

Eigen::Map<const Eigen::MatrixXd> MLPParams::weight(std::size_t layer) const {
    return {theta.data() + weight_offset(layer), static_cast<Eigen::Index>(layer_sizes[layer + 1]),
            static_cast<Eigen::Index>(layer_sizes[layer])};
}

Eigen::Map<Eigen::MatrixXd> MLPParams::weight(std::size_t layer) {
    return {theta.data() + weight_offset(layer), static_cast<Eigen::Index>(layer_sizes[layer + 1]),
            static_cast<Eigen::Index>(layer_sizes[layer])};
}

Eigen::Map<const Eigen::VectorXd> MLPParams::bias(std::size_t layer) const {
    return {theta.data() + bias_offset(layer), static_cast<Eigen::Index>(layer_sizes[layer + 1])};
}

Eigen::Map<Eigen::VectorXd> MLPParams::bias(std::size_t layer) {
    return {theta.data() + bias_offset(layer), static_cast<Eigen::Index>(layer_sizes[layer + 1])};
}

std::size_t count_params(const MLPParams& p) {
    std::size_t n = 0;
    for (std::size_t k = 0; k + 1 < p.layer_sizes.size(); ++k) {
        n += p.layer_sizes[k] * p.layer_sizes[k + 1] + p.layer_sizes[k + 1];
    }
    return n;
}

Eigen::MatrixXd forward(const MLPParams& p, const Eigen::MatrixXd& x, ForwardCache* cache, DropoutConfig dropout) {
    if (static_cast<std::size_t>(x.rows()) != p.input_size()) {
        throw UsageError("network input has " + std::to_string(x.rows()) + " features, expected " +
                         std::to_string(p.input_size()));
    }
    if (dropout.rate > 0.0 && dropout.rng == nullptr) throw UsageError("dropout requires a random generator");
    if (cache) {
        cache->inputs.clear();
        cache->preacts.clear();
        cache->dropout.clear();
    }
    Eigen::MatrixXd h = x;
    for (std::size_t k = 0; k < p.n_layers(); ++k) {
        const bool last = k + 1 == p.n_layers();
        Eigen::MatrixXd z = p.weight(k) * h;
        z.colwise() += p.bias(k);
        Eigen::MatrixXd a = activate(last ? p.output : p.hidden, z);
        if (cache) {
            cache->inputs.push_back(std::move(h));
            cache->preacts.push_back(std::move(z));
        }
        if (!last && dropout.rate > 0.0) {
            std::bernoulli_distribution keep(1.0 - dropout.rate);
            const double scale = 1.0 / (1.0 - dropout.rate);
            Eigen::MatrixXd mask(a.rows(), a.cols());
            for (Eigen::Index j = 0; j < mask.cols(); ++j) {
                for (Eigen::Index i = 0; i < mask.rows(); ++i) mask(i, j) = keep(*dropout.rng) ? scale : 0.0;
            }
            a.array() *= mask.array();
            if (cache) cache->dropout.push_back(std::move(mask));
        }
        h = std::move(a);
    }
    return h;
}

Eigen::VectorXd backward(const MLPParams& p, const ForwardCache& cache, const Eigen::MatrixXd& upstream) {
    if (cache.preacts.size() != p.n_layers()) throw UsageError("forward cache does not match the network");
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(p.theta.size());
    Eigen::MatrixXd delta = upstream;  // dLoss / d(layer output)
    for (std::size_t k = p.n_layers(); k-- > 0;) {
        const bool last = k + 1 == p.n_layers();
        if (!last && !cache.dropout.empty()) delta.array() *= cache.dropout[k].array();
        delta.array() *= activate_deriv(last ? p.output : p.hidden, cache.preacts[k]).array();
        const auto rows = static_cast<Eigen::Index>(p.layer_sizes[k + 1]);
        const auto cols = static_cast<Eigen::Index>(p.layer_sizes[k]);
        Eigen::Map<Eigen::MatrixXd>(grad.data() + p.weight_offset(k), rows, cols).noalias() =
            delta * cache.inputs[k].transpose();
        Eigen::Map<Eigen::VectorXd>(grad.data() + p.bias_offset(k), rows) = delta.rowwise().sum();
        if (k > 0) delta = p.weight(k).transpose() * delta;
    }
    return grad;
}

GeometryNormalization GeometryNormalization::fit(const Eigen::MatrixXd& x) {
    if (x.cols() == 0) throw UsageError("cannot fit a normalization to zero samples");
    GeometryNormalization n;
    n.mean = x.rowwise().mean();
    n.stddev.resize(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double var = (x.row(i).array() - n.mean(i)).square().mean();
        // A constant feature (single-level sweep) keeps unit scale.
        n.stddev(i) = var > 0.0 ? std::sqrt(var) : 1.0;
    }
    return n;
}

Eigen::MatrixXd GeometryNormalization::apply(const Eigen::MatrixXd& x) const {
    if (x.rows() != mean.size()) throw UsageError("geometry dimension does not match the normalization");
    return ((x.colwise() - mean).array().colwise() / stddev.array()).matrix();
}

Eigen::VectorXd GeometryNormalization::apply(std::span<const double> x) const {
    if (static_cast<Eigen::Index>(x.size()) != mean.size()) {
        throw UsageError("geometry vector has " + std::to_string(x.size()) + " entries, expected " +
                         std::to_string(mean.size()));
    }
    Eigen::VectorXd out(mean.size());
    for (Eigen::Index i = 0; i < mean.size(); ++i) out(i) = (x[static_cast<std::size_t>(i)] - mean(i)) / stddev(i);
    return out;
}

CircuitNormalization CircuitNormalization::fit(std::span<const em::CircuitParams> cs, double margin) {
    if (cs.empty()) throw UsageError("cannot fit a normalization to zero samples");
    const auto n_c = static_cast<Eigen::Index>(cs.front().size());
    Eigen::MatrixXd logs(n_c, static_cast<Eigen::Index>(cs.size()));
    for (std::size_t s = 0; s < cs.size(); ++s) {
        if (static_cast<Eigen::Index>(cs[s].size()) != n_c) throw UsageError("circuit vectors differ in length");
        for (Eigen::Index k = 0; k < n_c; ++k) logs(k, static_cast<Eigen::Index>(s)) = std::log(cs[s][static_cast<std::size_t>(k)]);
    }
    CircuitNormalization n;
    n.margin = margin;
    n.log_mean = logs.rowwise().mean();
    n.log_std.resize(n_c);
    for (Eigen::Index k = 0; k < n_c; ++k) {
        const double var = (logs.row(k).array() - n.log_mean(k)).square().mean();
        n.log_std(k) = var > 0.0 ? std::sqrt(var) : 1.0;
    }
    return n;
}

Eigen::VectorXd CircuitNormalization::to_unit(const em::CircuitParams& c) const {
    if (static_cast<Eigen::Index>(c.size()) != log_mean.size()) throw UsageError("circuit vector length mismatch");
    Eigen::VectorXd u(log_mean.size());
    for (Eigen::Index k = 0; k < u.size(); ++k) {
        u(k) = (std::log(c[static_cast<std::size_t>(k)]) - log_mean(k)) / log_std(k) + margin;
    }
    return u;
}

em::CircuitParams CircuitNormalization::from_unit(const Eigen::VectorXd& u) const {
    if (u.size() != log_mean.size()) throw UsageError("normalized circuit vector length mismatch");
    std::vector<double> v(static_cast<std::size_t>(u.size()));
    for (Eigen::Index k = 0; k < u.size(); ++k) {
        v[static_cast<std::size_t>(k)] = std::exp((u(k) - margin) * log_std(k) + log_mean(k));
    }
    return em::CircuitParams(std::move(v));
}

Eigen::VectorXd CircuitNormalization::jacobian_diag(const em::CircuitParams& c) const {
    Eigen::VectorXd d(log_std.size());
    for (Eigen::Index k = 0; k < d.size(); ++k) d(k) = c[static_cast<std::size_t>(k)] * log_std(k);
    return d;
}

em::CircuitParams mlp_forward(const MLPParams& p, std::span<const double> x, const Normalization& norm) {
    const Eigen::VectorXd xn = norm.x.apply(x);
    const Eigen::MatrixXd u = forward(p, xn);
    return norm.c.from_unit(u.col(0));
}

Eigen::VectorXd mlp_backward(const MLPParams& p, std::span<const double> x, const Normalization& norm,
                             std::span<const double> upstream) {
    if (upstream.size() != p.output_size()) throw UsageError("upstream gradient length does not match the output");
    const Eigen::VectorXd xn = norm.x.apply(x);
    ForwardCache cache;
    const Eigen::MatrixXd u = forward(p, xn, &cache);
    const em::CircuitParams c = norm.c.from_unit(u.col(0));
    const Eigen::VectorXd dc_du = norm.c.jacobian_diag(c);
    Eigen::MatrixXd du(u.rows(), 1);
    for (Eigen::Index k = 0; k < u.rows(); ++k) du(k, 0) = upstream[static_cast<std::size_t>(k)] * dc_du(k);
    return backward(p, cache, du);
}

}  // namespace fssml::nn
