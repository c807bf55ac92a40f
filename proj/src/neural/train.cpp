#include "dlht/neural/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dlht/errors.hpp"

namespace dlht::nn {

void TrainConfig::validate() const {
    if (epochs < 1) throw std::invalid_argument("TrainConfig: epochs must be at least 1");
    if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be at least 1");
    if (!(learning_rate > 0.0))
        throw std::invalid_argument("TrainConfig: learning_rate must be positive");
    if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
        throw std::invalid_argument("TrainConfig: validation_fraction must lie in (0, 1)");
}

Network initialize(const NetworkSpec& spec, std::uint64_t seed) {
    Network net = Network::zeros(spec);
    auto gen = stats::RandomStream{seed, 0x1A17}.generator();
    auto& layers = net.mutable_layers();
    for (std::size_t k = 0; k < layers.size(); ++k) {
        auto& w = layers[k].weights;
        const bool head = k + 1 == layers.size();
        const double fan_in = static_cast<double>(w.cols());
        const double fan_out = static_cast<double>(w.rows());
        const double limit = head ? std::sqrt(6.0 / (fan_in + fan_out)) : std::sqrt(6.0 / fan_in);
        for (Eigen::Index j = 0; j < w.cols(); ++j)
            for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = limit * (2.0 * gen.uniform() - 1.0);
    }
    return net;
}

namespace {

struct ForwardCache {
    std::vector<Eigen::MatrixXd> activations;  // activations[0] = input columns
    std::vector<Eigen::MatrixXd> pre;          // hidden pre-activations
    std::vector<Eigen::MatrixXd> masks;        // inverted-dropout scale (training only)
    Eigen::RowVectorXd output;                 // head linear predictor
};

void forward_cached(const Network& net, const Eigen::MatrixXd& columns, ForwardCache& cache,
                    stats::Generator* dropout) {
    const auto& layers = net.layers();
    const double rate = net.spec().dropout_rate;
    const std::size_t hidden = layers.size() - 1;
    cache.activations.resize(hidden + 1);
    cache.pre.resize(hidden);
    cache.masks.resize(hidden);
    cache.activations[0] = columns;
    for (std::size_t k = 0; k < hidden; ++k) {
        cache.pre[k] = layers[k].weights * cache.activations[k];
        cache.pre[k].colwise() += layers[k].bias;
        cache.activations[k + 1] = cache.pre[k].cwiseMax(0.0);
        if (dropout && rate > 0.0) {
            auto& mask = cache.masks[k];
            mask.resize(cache.pre[k].rows(), cache.pre[k].cols());
            const double keep = 1.0 / (1.0 - rate);
            for (Eigen::Index i = 0; i < mask.size(); ++i)
                mask.data()[i] = dropout->uniform() < rate ? 0.0 : keep;
            cache.activations[k + 1].array() *= mask.array();
        }
    }
    cache.output = layers.back().weights * cache.activations[hidden];
    cache.output.array() += layers.back().bias(0);
}

// Returns the summed (not averaged) loss over the batch.
double batch_loss(Head head, const Eigen::RowVectorXd& lp, std::span<const double> labels,
                  Eigen::RowVectorXd& dlp) {
    const auto n = lp.size();
    dlp.resize(n);
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double z = lp(i), y = labels[static_cast<std::size_t>(i)];
        if (head == Head::LogitClassifier) {
            total += std::max(z, 0.0) + std::log1p(std::exp(-std::fabs(z))) - y * z;
            dlp(i) = sigmoid(z) - y;
        } else {
            const double r = z - y;
            total += r * r;
            dlp(i) = 2.0 * r;
        }
    }
    return total;
}

void backward(const Network& net, const ForwardCache& cache, const Eigen::RowVectorXd& dlp,
              bool dropout_active, Gradients& grads) {
    const auto& layers = net.layers();
    const std::size_t hidden = layers.size() - 1;
    grads.weights.resize(layers.size());
    grads.bias.resize(layers.size());
    grads.weights[hidden] = dlp * cache.activations[hidden].transpose();
    grads.bias[hidden] = Eigen::VectorXd::Constant(1, dlp.sum());
    Eigen::MatrixXd delta = layers[hidden].weights.transpose() * dlp;
    for (std::size_t k = hidden; k-- > 0;) {
        if (dropout_active) delta.array() *= cache.masks[k].array();
        // ReLU subgradient at zero is zero.
        delta.array() *= (cache.pre[k].array() > 0.0).cast<double>();
        grads.weights[k] = delta * cache.activations[k].transpose();
        grads.bias[k] = delta.rowwise().sum();
        if (k > 0) delta = layers[k].weights.transpose() * delta;
    }
}

}  // namespace

std::vector<double> training_forward(const Network& net, std::span<const double> features,
                                     stats::Generator& dropout) {
    ForwardCache cache;
    forward_cached(net, net.standardize(features), cache, &dropout);
    return {cache.output.data(), cache.output.data() + cache.output.size()};
}

namespace {

struct AdamState {
    std::vector<Eigen::MatrixXd> mw, vw;
    std::vector<Eigen::VectorXd> mb, vb;
    std::size_t step = 0;

    explicit AdamState(const Network& net) {
        for (const auto& l : net.layers()) {
            mw.push_back(Eigen::MatrixXd::Zero(l.weights.rows(), l.weights.cols()));
            vw.push_back(mw.back());
            mb.push_back(Eigen::VectorXd::Zero(l.bias.size()));
            vb.push_back(mb.back());
        }
    }

    void apply(Network& net, const Gradients& g, const TrainConfig& cfg) {
        ++step;
        const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
        const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
        const double lr = cfg.learning_rate * std::sqrt(c2) / c1;
        const double eps = cfg.epsilon * std::sqrt(c2);
        auto& layers = net.mutable_layers();
        for (std::size_t k = 0; k < layers.size(); ++k) {
            mw[k] = cfg.beta1 * mw[k] + (1.0 - cfg.beta1) * g.weights[k];
            vw[k] = cfg.beta2 * vw[k] + (1.0 - cfg.beta2) * g.weights[k].cwiseAbs2();
            layers[k].weights.array() -= lr * mw[k].array() / (vw[k].array().sqrt() + eps);
            mb[k] = cfg.beta1 * mb[k] + (1.0 - cfg.beta1) * g.bias[k];
            vb[k] = cfg.beta2 * vb[k] + (1.0 - cfg.beta2) * g.bias[k].cwiseAbs2();
            layers[k].bias.array() -= lr * mb[k].array() / (vb[k].array().sqrt() + eps);
        }
    }
};

void check_finite(const Dataset& data, const char* what) {
    for (double v : data.feature_data())
        if (!std::isfinite(v)) throw TrainingDiverged(0, std::string("non-finite ") + what + " feature");
    for (double v : data.labels())
        if (!std::isfinite(v)) throw TrainingDiverged(0, std::string("non-finite ") + what + " label");
}

}  // namespace

double loss_and_gradients(const Network& net, const Eigen::MatrixXd& columns,
                          std::span<const double> labels, Gradients& grads) {
    if (static_cast<std::size_t>(columns.cols()) != labels.size())
        throw ShapeError("loss_and_gradients: label count mismatch");
    ForwardCache cache;
    forward_cached(net, columns, cache, nullptr);
    Eigen::RowVectorXd dlp;
    const double n = static_cast<double>(labels.size());
    const double loss = batch_loss(net.spec().head, cache.output, labels, dlp) / n;
    dlp /= n;
    backward(net, cache, dlp, false, grads);
    return loss;
}

TrainResult train(const NetworkSpec& spec, const Dataset& train_data, const TrainConfig& config,
                  const Dataset* validation_data) {
    spec.validate();
    config.validate();
    if (train_data.empty()) throw std::invalid_argument("train: training data is empty");
    if (train_data.dim() != spec.input_dim)
        throw ShapeError("train: dataset has " + std::to_string(train_data.dim()) +
                         " features, spec expects " + std::to_string(spec.input_dim));
    check_finite(train_data, "training");
    if (validation_data) {
        if (validation_data->dim() != spec.input_dim)
            throw ShapeError("train: validation dimension mismatch");
        check_finite(*validation_data, "validation");
    }

    Network init = initialize(spec, config.seed);
    Network net(spec, Standardizer::fit(train_data), init.layers());
    if (spec.head == Head::LinearRegressor) {
        const auto& y = train_data.labels();
        net.mutable_layers().back().bias(0) =
            std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    }

    const Eigen::MatrixXd columns = net.standardize(train_data.feature_data());
    const std::size_t count = train_data.size();
    const std::size_t batch = std::min(config.batch_size, count);
    const stats::RandomStream root{config.seed, 0x7A11};

    AdamState adam(net);
    TrainHistory history;
    ForwardCache cache;
    Gradients grads;
    Eigen::MatrixXd xb(static_cast<Eigen::Index>(spec.input_dim), 0);
    std::vector<double> yb;
    Eigen::RowVectorXd dlp;

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        const auto epoch_stream = root.child(epoch);
        const auto order = permutation(count, epoch_stream);
        auto dropout_gen = epoch_stream.child(1).generator();
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < count; start += batch) {
            const std::size_t len = std::min(batch, count - start);
            xb.resize(columns.rows(), static_cast<Eigen::Index>(len));
            yb.resize(len);
            for (std::size_t i = 0; i < len; ++i) {
                const std::size_t r = order[start + i];
                xb.col(static_cast<Eigen::Index>(i)) = columns.col(static_cast<Eigen::Index>(r));
                yb[i] = train_data.label(r);
            }
            forward_cached(net, xb, cache, &dropout_gen);
            const double loss = batch_loss(spec.head, cache.output, yb, dlp);
            if (!std::isfinite(loss)) throw TrainingDiverged(epoch, "training loss is not finite");
            epoch_loss += loss;
            dlp /= static_cast<double>(len);
            backward(net, cache, dlp, spec.dropout_rate > 0.0, grads);
            adam.apply(net, grads, config);
        }
        history.train_loss.push_back(epoch_loss / static_cast<double>(count));
        if (validation_data) {
            const double v = dataset_loss(net, *validation_data);
            if (!std::isfinite(v)) throw TrainingDiverged(epoch, "validation loss is not finite");
            history.validation_loss.push_back(v);
        }
    }
    return {std::move(net), std::move(history)};
}

TrainResult train(const NetworkSpec& spec, const Dataset& data, const TrainConfig& config) {
    config.validate();
    if (data.empty()) throw std::invalid_argument("train: training data is empty");
    const auto order = permutation(data.size(), stats::RandomStream{config.seed, 0x5917});
    const auto held = static_cast<std::size_t>(
        std::floor(config.validation_fraction * static_cast<double>(data.size())));
    if (held == 0 || held == data.size()) return train(spec, data, config, nullptr);
    const std::span<const std::size_t> all(order);
    const Dataset fit = data.subset(all.subspan(held));
    const Dataset validation = data.subset(all.first(held));
    return train(spec, fit, config, &validation);
}

namespace {

// Plain-loop forward pass in extended precision; the finite-difference oracle
// for gradient_check, independent of the Eigen code path.
long double reference_loss(const Network& net, std::span<const double> features, double label) {
    const auto& st = net.standardizer();
    std::vector<long double> act(features.size());
    for (std::size_t j = 0; j < features.size(); ++j)
        act[j] = (static_cast<long double>(features[j]) - st.shift(static_cast<Eigen::Index>(j))) /
                 st.scale(static_cast<Eigen::Index>(j));
    const auto& layers = net.layers();
    for (std::size_t k = 0; k < layers.size(); ++k) {
        const auto& w = layers[k].weights;
        std::vector<long double> next(static_cast<std::size_t>(w.rows()));
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
            long double z = layers[k].bias(i);
            for (Eigen::Index j = 0; j < w.cols(); ++j) z += static_cast<long double>(w(i, j)) * act[static_cast<std::size_t>(j)];
            const bool hidden = k + 1 < layers.size();
            next[static_cast<std::size_t>(i)] = hidden ? std::max(z, 0.0L) : z;
        }
        act = std::move(next);
    }
    const long double z = act[0];
    if (net.spec().head == Head::LogitClassifier)
        return std::max(z, 0.0L) + std::log1p(std::exp(-std::fabs(z))) - label * z;
    return (z - label) * (z - label);
}

}  // namespace

double gradient_check(const Network& net, std::span<const double> features, double label) {
    const Eigen::MatrixXd x = net.standardize(features);
    const std::vector<double> y{label};
    Gradients grads;
    loss_and_gradients(net, x, y, grads);

    constexpr double h = 1e-6;
    Network probe = net;
    double worst = 0.0;
    auto check = [&](double& param, double analytic) {
        const double saved = param;
        const double hi = saved + h, lo = saved - h;
        param = hi;
        const long double up = reference_loss(probe, features, label);
        param = lo;
        const long double down = reference_loss(probe, features, label);
        param = saved;
        const double fd = static_cast<double>((up - down) / (static_cast<long double>(hi) - lo));
        worst = std::max(worst, std::fabs(analytic - fd) / (std::fabs(analytic) + std::fabs(fd) + 1e-12));
    };
    auto& layers = probe.mutable_layers();
    for (std::size_t k = 0; k < layers.size(); ++k) {
        for (Eigen::Index i = 0; i < layers[k].weights.size(); ++i)
            check(layers[k].weights.data()[i], grads.weights[k].data()[i]);
        for (Eigen::Index i = 0; i < layers[k].bias.size(); ++i)
            check(layers[k].bias(i), grads.bias[k](i));
    }
    return worst;
}

double gradient_check(const NetworkSpec& spec, std::span<const double> features, double label,
                      std::uint64_t seed) {
    Network net = initialize(spec, seed);
    auto gen = stats::RandomStream{seed, 0xB1A5}.generator();
    for (auto& layer : net.mutable_layers())
        for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias(i) = 0.2 * gen.normal();
    return gradient_check(net, features, label);
}

}  // namespace dlht::nn
