#include "fssml/training.hpp"

#include <cmath>
#include <numeric>
#include <random>

#include "fssml/errors.hpp"
#include "fssml/sweep.hpp"

namespace fssml::nn {

namespace {

// Independent streams derived from the one user seed.
constexpr std::uint64_t kShuffleStream = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kDropoutStream = 0xbf58476d1ce4e5b9ULL;
constexpr std::uint64_t kPhase2Stream = 0x94d049bb133111ebULL;

std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return v % bound;
}

void shuffle(std::vector<std::size_t>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[draw_below(rng, i)]);
}

/// Batches of indices for one epoch; a single full batch when batch_size is 0.
std::vector<std::vector<std::size_t>> make_batches(std::size_t n, std::size_t batch_size, std::mt19937_64& rng) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (batch_size == 0 || batch_size >= n) return {order};
    shuffle(order, rng);
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t b = 0; b < n; b += batch_size)
        out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(b),
                         order.begin() + static_cast<std::ptrdiff_t>(std::min(n, b + batch_size)));
    return out;
}

grad::LossKind physics_kind(LossSelection l) {
    switch (l) {
        case LossSelection::Eq1: return grad::LossKind::Legacy;
        case LossSelection::Eq3: return grad::LossKind::S21Mae;
        case LossSelection::Eq5: return grad::LossKind::PhaseAware;
        case LossSelection::Eq2: break;
    }
    throw UsageError("eq2 is not a physics loss");
}

Eigen::MatrixXd geometry_matrix(std::span<const data::Sample> samples) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(data::Geometry::kDim), static_cast<Eigen::Index>(samples.size()));
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto v = samples[i].x.values();
        for (std::size_t k = 0; k < v.size(); ++k) x(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = v[k];
    }
    return x;
}

void check_samples(std::span<const data::Sample> train) {
    if (train.empty()) throw UsageError("training set is empty");
    const std::size_t n_c = train.front().c.size();
    for (const auto& s : train)
        if (s.c.size() != n_c) throw UsageError("samples disagree on the circuit vector length");
}

}  // namespace

const char* to_string(LossSelection l) {
    switch (l) {
        case LossSelection::Eq1: return "eq1";
        case LossSelection::Eq2: return "eq2";
        case LossSelection::Eq3: return "eq3";
        case LossSelection::Eq5: return "eq5";
    }
    return "?";
}

LossSelection loss_from_string(const std::string& name) {
    if (name == "eq1") return LossSelection::Eq1;
    if (name == "eq2") return LossSelection::Eq2;
    if (name == "eq3") return LossSelection::Eq3;
    if (name == "eq5") return LossSelection::Eq5;
    throw UsageError("unknown loss '" + name + "' (expected eq1, eq2, eq3 or eq5)");
}

const char* to_string(DirectKind k) {
    switch (k) {
        case DirectKind::Dnn: return "dnn";
        case DirectKind::DnnTanh: return "dnn-tanh";
        case DirectKind::Rbfn: return "rbfn";
    }
    return "?";
}

DirectKind direct_kind_from_string(const std::string& name) {
    if (name == "dnn") return DirectKind::Dnn;
    if (name == "dnn-tanh") return DirectKind::DnnTanh;
    if (name == "rbfn") return DirectKind::Rbfn;
    throw UsageError("unknown direct model '" + name + "'");
}

void TrainingConfig::validate() const {
    for (std::size_t h : hidden_sizes)
        if (h == 0) throw UsageError("hidden layer sizes must be positive");
    for (const PhaseConfig* p : {&phase1, &phase2}) {
        if (p->epochs == 0) throw UsageError("epochs must be positive");
        if (!(p->learning_rate > 0.0) || !std::isfinite(p->learning_rate))
            throw UsageError("learning rates must be positive");
    }
    if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) throw UsageError("Adam betas must lie in [0, 1)");
    if (!(epsilon > 0.0)) throw UsageError("Adam epsilon must be positive");
    if (!(margin >= 0.0) || !std::isfinite(margin)) throw UsageError("margin must be >= 0");
    for (std::size_t h : direct.hidden_sizes)
        if (h == 0) throw UsageError("direct hidden layer sizes must be positive");
    if (direct.epochs == 0) throw UsageError("direct epochs must be positive");
    if (!(direct.learning_rate > 0.0)) throw UsageError("direct learning rate must be positive");
    if (!(direct.dropout >= 0.0 && direct.dropout < 1.0)) throw UsageError("dropout must lie in [0, 1)");
    rbfn.validate();
}

std::vector<std::size_t> model_layer_sizes(const TrainingConfig& config, std::size_t n_inputs, std::size_t n_outputs) {
    std::vector<std::size_t> sizes{n_inputs};
    sizes.insert(sizes.end(), config.hidden_sizes.begin(), config.hidden_sizes.end());
    sizes.push_back(n_outputs);
    return sizes;
}

em::CircuitParams ModelBasedModel::predict_circuit(const data::Geometry& x) const {
    const auto v = x.values();
    return mlp_forward(params, v, norm);
}

em::SResponse ModelBasedModel::predict(const data::Geometry& x, const em::FrequencyGrid& grid) const {
    return em::f_phys(predict_circuit(x), data::geometry_topology(x), grid);
}

PhysicsBatch PhysicsBatch::build(std::span<const data::Sample> samples, const GeometryNormalization& xnorm) {
    PhysicsBatch b;
    b.x = xnorm.apply(geometry_matrix(samples));
    b.c.reserve(samples.size());
    b.s.reserve(samples.size());
    b.plans.reserve(samples.size());
    for (const auto& smp : samples) {
        b.c.push_back(smp.c);
        b.s.push_back(&smp.s);
        b.plans.emplace_back(data::geometry_topology(smp.x), smp.s.grid);
    }
    return b;
}

Objective objective(const ModelBasedModel& model, const PhysicsBatch& batch, LossSelection loss,
                    CircuitLossForm eq2_form, std::span<const std::size_t> subset) {
    std::vector<std::size_t> all;
    if (subset.empty()) {
        all.resize(batch.size());
        std::iota(all.begin(), all.end(), std::size_t{0});
        subset = all;
    }
    const auto n = static_cast<Eigen::Index>(subset.size());
    if (n == 0) throw UsageError("objective over an empty batch");

    Eigen::MatrixXd x(batch.x.rows(), n);
    for (Eigen::Index i = 0; i < n; ++i) x.col(i) = batch.x.col(static_cast<Eigen::Index>(subset[static_cast<std::size_t>(i)]));
    ForwardCache cache;
    const Eigen::MatrixXd u = forward(model.params, x, &cache);
    Eigen::MatrixXd upstream(u.rows(), n);
    const double inv_n = 1.0 / static_cast<double>(n);

    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const std::size_t idx = subset[static_cast<std::size_t>(i)];
        if (loss == LossSelection::Eq2) {
            const Eigen::VectorXd d = u.col(i) - model.norm.c.to_unit(batch.c[idx]);
            if (eq2_form == CircuitLossForm::SquaredL2) {
                total += d.squaredNorm();
                upstream.col(i) = 2.0 * d * inv_n;
            } else {
                const double m = static_cast<double>(d.size());
                total += d.cwiseAbs().sum() / m;
                upstream.col(i) = d.unaryExpr([](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }) *
                                  (inv_n / m);
            }
            continue;
        }
        const em::CircuitParams c = model.norm.c.from_unit(u.col(i));
        const grad::LossGradient lg = grad::loss_grad_circuit(c.values(), *batch.s[idx], batch.plans[idx], physics_kind(loss));
        total += lg.loss;
        const Eigen::VectorXd dc_du = model.norm.c.jacobian_diag(c);
        for (Eigen::Index k = 0; k < u.rows(); ++k) upstream(k, i) = lg.grad[static_cast<std::size_t>(k)] * dc_du[k] * inv_n;
    }
    return {total * inv_n, backward(model.params, cache, upstream)};
}

double evaluate_loss(const ModelBasedModel& model, const PhysicsBatch& batch, LossSelection loss,
                     CircuitLossForm eq2_form) {
    if (batch.size() == 0) throw UsageError("loss over an empty batch");
    const Eigen::MatrixXd u = forward(model.params, batch.x);
    double total = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto col = static_cast<Eigen::Index>(i);
        if (loss == LossSelection::Eq2) {
            const Eigen::VectorXd d = u.col(col) - model.norm.c.to_unit(batch.c[i]);
            total += eq2_form == CircuitLossForm::SquaredL2 ? d.squaredNorm() : d.cwiseAbs().mean();
            continue;
        }
        const em::CircuitParams c = model.norm.c.from_unit(u.col(col));
        const em::PhysicsPlan& plan = batch.plans[i];
        const em::SResponse& target = *batch.s[i];
        double sample = 0.0;
        for (std::size_t j = 0; j < plan.grid().size(); ++j) {
            const em::SPoint p = plan.evaluate<double>(j, c.values());
            sample += loss == LossSelection::Eq5 ? phase_aware_term(p, target.points[j])
                                                 : s21_modulus_term(p, target.points[j]);
        }
        total += sample / static_cast<double>(plan.grid().size());
    }
    return total / static_cast<double>(batch.size());
}

namespace {

struct Loop {
    const TrainingConfig& config;
    const PhaseConfig& phase;
    std::uint64_t stream;
};

/// Shared epoch loop. `keep_best` enables early-best selection on the test loss.
PhaseResult run_phase(const Loop& loop, ModelBasedModel model, const PhysicsBatch& train, const PhysicsBatch* test,
                      bool keep_best) {
    PhaseResult r;
    r.history.loss = to_string(loop.phase.loss);
    const auto test_loss = [&](const ModelBasedModel& m) {
        return test ? evaluate_loss(m, *test, loop.phase.loss, loop.config.eq2_form)
                    : std::numeric_limits<double>::quiet_NaN();
    };

    AdamState adam(loop.config.adam(loop.phase.learning_rate), model.params.theta.size());
    std::mt19937_64 rng(loop.config.seed ^ loop.stream);

    ModelBasedModel best = model;
    r.initial_test = test_loss(model);
    r.best_test = r.initial_test;
    r.best_epoch = 0;

    for (std::size_t epoch = 1; epoch <= loop.phase.epochs; ++epoch) {
        double train_total = 0.0;
        for (const auto& idx : make_batches(train.size(), loop.config.batch_size, rng)) {
            const Objective obj = objective(model, train, loop.phase.loss, loop.config.eq2_form, idx);
            train_total += obj.loss * static_cast<double>(idx.size());
            adam_update(adam, model.params.theta, obj.grad);
        }
        HistoryRow row{epoch, train_total / static_cast<double>(train.size()), test_loss(model)};
        r.history.rows.push_back(row);
        if (keep_best && row.test < r.best_test) {
            r.best_test = row.test;
            r.best_epoch = epoch;
            best = model;
        }
    }
    r.model = keep_best && test ? best : model;
    if (!keep_best || !test) {
        r.best_epoch = loop.phase.epochs;
        r.best_test = r.history.rows.back().test;
    }
    return r;
}

}  // namespace

PhaseResult train_phase1(std::span<const data::Sample> train, std::span<const data::Sample> test,
                         const TrainingConfig& config) {
    config.validate();
    check_samples(train);

    ModelBasedModel model;
    model.norm.x = GeometryNormalization::fit(geometry_matrix(train));
    std::vector<em::CircuitParams> cs;
    for (const auto& s : train) cs.push_back(s.c);
    model.norm.c = CircuitNormalization::fit(cs, config.margin);
    model.params = MLPParams::random(model_layer_sizes(config, data::Geometry::kDim, cs.front().size()),
                                     config.hidden_activation, Activation::Softplus, config.seed);

    const PhysicsBatch tr = PhysicsBatch::build(train, model.norm.x);
    const PhysicsBatch te = test.empty() ? PhysicsBatch{} : PhysicsBatch::build(test, model.norm.x);
    return run_phase({config, config.phase1, kShuffleStream}, std::move(model), tr, test.empty() ? nullptr : &te,
                     false);
}

PhaseResult train_phase2(std::span<const data::Sample> train, std::span<const data::Sample> test,
                         const ModelBasedModel& init, const TrainingConfig& config) {
    config.validate();
    check_samples(train);
    if (init.params.output_size() != train.front().c.size())
        throw UsageError("phase-1 model does not match the circuit vector length");
    const PhysicsBatch tr = PhysicsBatch::build(train, init.norm.x);
    const PhysicsBatch te = test.empty() ? PhysicsBatch{} : PhysicsBatch::build(test, init.norm.x);
    return run_phase({config, config.phase2, kPhase2Stream}, init, tr, test.empty() ? nullptr : &te, true);
}

std::size_t DirectModel::n_params() const {
    return kind == DirectKind::Rbfn ? count_params(rbfn) : count_params(mlp);
}

em::SResponse DirectModel::predict(const data::Geometry& x) const {
    const auto v = x.values();
    const Eigen::VectorXd xn = xnorm.apply(v);
    const Eigen::MatrixXd y = kind == DirectKind::Rbfn ? rbfn_predict(rbfn, xn) : forward(mlp, xn);
    if (static_cast<std::size_t>(y.rows()) != 4 * grid.size()) throw UsageError("direct model output does not match its grid");
    em::SResponse s(grid);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const auto r = static_cast<Eigen::Index>(4 * j);
        em::SPoint& p = s.points[j];
        p.s11 = {y(r, 0), y(r + 1, 0)};
        p.s21 = {y(r + 2, 0), y(r + 3, 0)};
        p.s12 = p.s21;
        p.s22 = p.s11;
    }
    return s;
}

std::vector<em::SResponse> DirectModel::predict(std::span<const data::Sample> samples) const {
    std::vector<em::SResponse> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(predict(s.x));
    return out;
}

Eigen::MatrixXd direct_targets(std::span<const data::Sample> samples) {
    if (samples.empty()) throw UsageError("no samples");
    const std::size_t nf = samples.front().s.size();
    Eigen::MatrixXd y(static_cast<Eigen::Index>(4 * nf), static_cast<Eigen::Index>(samples.size()));
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].s.size() != nf) throw UsageError("samples use different grids");
        const auto col = static_cast<Eigen::Index>(i);
        for (std::size_t j = 0; j < nf; ++j) {
            const em::SPoint& p = samples[i].s.points[j];
            const auto r = static_cast<Eigen::Index>(4 * j);
            y(r, col) = p.s11.re;
            y(r + 1, col) = p.s11.im;
            y(r + 2, col) = p.s21.re;
            y(r + 3, col) = p.s21.im;
        }
    }
    return y;
}

DirectResult train_direct(DirectKind kind, std::span<const data::Sample> train, std::span<const data::Sample> test,
                          const TrainingConfig& config) {
    config.validate();
    if (train.empty()) throw UsageError("training set is empty");

    DirectResult r;
    r.model.kind = kind;
    r.model.grid = train.front().s.grid;
    const Eigen::MatrixXd xtr_raw = geometry_matrix(train);
    r.model.xnorm = GeometryNormalization::fit(xtr_raw);
    const Eigen::MatrixXd xtr = r.model.xnorm.apply(xtr_raw);
    const Eigen::MatrixXd ytr = direct_targets(train);
    Eigen::MatrixXd xte, yte;
    if (!test.empty()) {
        xte = r.model.xnorm.apply(geometry_matrix(test));
        yte = direct_targets(test);
    }
    const auto mae = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).cwiseAbs().mean(); };
    const double nan = std::numeric_limits<double>::quiet_NaN();
    r.history.loss = "mae";

    if (kind == DirectKind::Rbfn) {
        r.model.rbfn = fit_rbfn(xtr, ytr, config.rbfn, config.seed);
        r.history.rows.push_back({0, mae(rbfn_predict(r.model.rbfn, xtr), ytr),
                                  test.empty() ? nan : mae(rbfn_predict(r.model.rbfn, xte), yte)});
        return r;
    }

    std::vector<std::size_t> sizes{data::Geometry::kDim};
    sizes.insert(sizes.end(), config.direct.hidden_sizes.begin(), config.direct.hidden_sizes.end());
    sizes.push_back(static_cast<std::size_t>(ytr.rows()));
    const Activation hidden = kind == DirectKind::Dnn ? Activation::Relu : Activation::Tanh;
    r.model.mlp = MLPParams::random(sizes, hidden, Activation::Identity, config.seed);

    AdamState adam(config.adam(config.direct.learning_rate), r.model.mlp.theta.size());
    std::mt19937_64 batch_rng(config.seed ^ kShuffleStream);
    std::mt19937_64 drop_rng(config.seed ^ kDropoutStream);
    const double n_out = static_cast<double>(ytr.rows());

    for (std::size_t epoch = 1; epoch <= config.direct.epochs; ++epoch) {
        double total = 0.0;
        for (const auto& idx : make_batches(static_cast<std::size_t>(xtr.cols()), config.direct.batch_size, batch_rng)) {
            const auto nb = static_cast<Eigen::Index>(idx.size());
            Eigen::MatrixXd xb(xtr.rows(), nb), yb(ytr.rows(), nb);
            for (Eigen::Index i = 0; i < nb; ++i) {
                xb.col(i) = xtr.col(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(i)]));
                yb.col(i) = ytr.col(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(i)]));
            }
            ForwardCache cache;
            const Eigen::MatrixXd out = forward(r.model.mlp, xb, &cache, {config.direct.dropout, &drop_rng});
            const Eigen::MatrixXd diff = out - yb;
            total += diff.cwiseAbs().sum() / n_out;
            const double scale = 1.0 / (n_out * static_cast<double>(nb));
            const Eigen::MatrixXd up =
                diff.unaryExpr([scale](double v) { return v > 0.0 ? scale : (v < 0.0 ? -scale : 0.0); });
            adam_update(adam, r.model.mlp.theta, backward(r.model.mlp, cache, up));
        }
        r.history.rows.push_back({epoch, total / static_cast<double>(xtr.cols()),
                                  test.empty() ? nan : mae(forward(r.model.mlp, xte), yte)});
    }
    return r;
}

}  // namespace fssml::nn
