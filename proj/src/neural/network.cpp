#include "dlht/neural/network.hpp"

#include <cmath>
#include <sstream>

#include "dlht/errors.hpp"

namespace dlht::nn {

std::string to_string(Head head) {
    return head == Head::LogitClassifier ? "logit-classifier" : "linear-regressor";
}

Head head_from_string(const std::string& name) {
    if (name == "logit-classifier") return Head::LogitClassifier;
    if (name == "linear-regressor") return Head::LinearRegressor;
    throw std::invalid_argument("unknown network head '" + name + "'");
}

void NetworkSpec::validate() const {
    if (input_dim < 1) throw ShapeError("NetworkSpec: input_dim must be at least 1");
    for (auto w : hidden_layers)
        if (w < 1) throw ShapeError("NetworkSpec: layer widths must be at least 1");
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0))
        throw std::invalid_argument("NetworkSpec: dropout_rate must lie in [0, 1)");
}

std::size_t NetworkSpec::parameter_count() const {
    std::size_t total = 0, fan_in = input_dim;
    for (auto w : hidden_layers) {
        total += (fan_in + 1) * w;
        fan_in = w;
    }
    return total + fan_in + 1;
}

std::string NetworkSpec::describe() const {
    std::ostringstream os;
    os << input_dim;
    for (auto w : hidden_layers) os << "-" << w;
    os << "-1 (" << to_string(head) << ", dropout " << dropout_rate << ")";
    return os.str();
}

Standardizer Standardizer::identity(std::size_t dim) {
    return {Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim)),
            Eigen::VectorXd::Ones(static_cast<Eigen::Index>(dim))};
}

Standardizer Standardizer::fit(const Dataset& data) {
    const auto dim = static_cast<Eigen::Index>(data.dim());
    Standardizer s{Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Ones(dim)};
    if (data.empty()) return s;
    const Eigen::Map<const Eigen::MatrixXd> x(data.feature_data().data(), dim,
                                              static_cast<Eigen::Index>(data.size()));
    s.shift = x.rowwise().mean();
    for (Eigen::Index j = 0; j < dim; ++j) {
        const double var = (x.row(j).array() - s.shift(j)).square().mean();
        const double sd = std::sqrt(var);
        s.scale(j) = sd > 0.0 && std::isfinite(sd) ? sd : 1.0;
    }
    return s;
}

Network::Network(NetworkSpec spec, Standardizer standardizer, std::vector<DenseLayer> layers)
    : spec_(std::move(spec)), standardizer_(std::move(standardizer)), layers_(std::move(layers)) {
    spec_.validate();
    check_shapes();
}

void Network::check_shapes() const {
    const auto dim = static_cast<Eigen::Index>(spec_.input_dim);
    if (standardizer_.shift.size() != dim || standardizer_.scale.size() != dim)
        throw ShapeError("Network: standardizer size does not match input_dim");
    for (Eigen::Index j = 0; j < dim; ++j)
        if (!(standardizer_.scale(j) > 0.0))
            throw ShapeError("Network: standardizer scales must be positive");
    if (layers_.size() != spec_.hidden_layers.size() + 1)
        throw ShapeError("Network: layer count does not match spec");
    Eigen::Index fan_in = dim;
    for (std::size_t k = 0; k < layers_.size(); ++k) {
        const Eigen::Index fan_out =
            k < spec_.hidden_layers.size() ? static_cast<Eigen::Index>(spec_.hidden_layers[k]) : 1;
        const auto& layer = layers_[k];
        if (layer.weights.rows() != fan_out || layer.weights.cols() != fan_in ||
            layer.bias.size() != fan_out)
            throw ShapeError("Network: layer " + std::to_string(k) + " has shape " +
                             std::to_string(layer.weights.rows()) + "x" +
                             std::to_string(layer.weights.cols()) + ", expected " +
                             std::to_string(fan_out) + "x" + std::to_string(fan_in));
        fan_in = fan_out;
    }
}

Network Network::zeros(const NetworkSpec& spec) {
    spec.validate();
    std::vector<DenseLayer> layers;
    Eigen::Index fan_in = static_cast<Eigen::Index>(spec.input_dim);
    for (std::size_t k = 0; k <= spec.hidden_layers.size(); ++k) {
        const Eigen::Index fan_out =
            k < spec.hidden_layers.size() ? static_cast<Eigen::Index>(spec.hidden_layers[k]) : 1;
        layers.push_back({Eigen::MatrixXd::Zero(fan_out, fan_in), Eigen::VectorXd::Zero(fan_out)});
        fan_in = fan_out;
    }
    return Network(spec, Standardizer::identity(spec.input_dim), std::move(layers));
}

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

Eigen::MatrixXd Network::standardize(std::span<const double> features) const {
    const auto dim = static_cast<Eigen::Index>(spec_.input_dim);
    if (features.size() % spec_.input_dim != 0)
        throw ShapeError("Network: feature block is not a multiple of input_dim");
    const auto count = static_cast<Eigen::Index>(features.size() / spec_.input_dim);
    const Eigen::Map<const Eigen::MatrixXd> raw(features.data(), dim, count);
    return ((raw.colwise() - standardizer_.shift).array().colwise() / standardizer_.scale.array())
        .matrix();
}

Eigen::RowVectorXd Network::linear_predictors_standardized(const Eigen::MatrixXd& columns) const {
    Eigen::MatrixXd act = columns;
    for (std::size_t k = 0; k + 1 < layers_.size(); ++k) {
        Eigen::MatrixXd z = layers_[k].weights * act;
        z.colwise() += layers_[k].bias;
        act = z.cwiseMax(0.0);
    }
    Eigen::RowVectorXd out = layers_.back().weights * act;
    out.array() += layers_.back().bias(0);
    return out;
}

Prediction Network::forward(std::span<const double> features) const {
    if (features.size() != spec_.input_dim)
        throw ShapeError("Network::forward: expected " + std::to_string(spec_.input_dim) +
                         " features, got " + std::to_string(features.size()));
    const double lp = linear_predictors_standardized(standardize(features))(0);
    return {spec_.head == Head::LogitClassifier ? sigmoid(lp) : lp, lp};
}

std::vector<double> Network::linear_predictors(std::span<const double> features) const {
    constexpr std::size_t chunk = 8192;
    const std::size_t dim = spec_.input_dim;
    if (features.size() % dim != 0)
        throw ShapeError("Network: feature block is not a multiple of input_dim");
    const std::size_t count = features.size() / dim;
    std::vector<double> out(count);
    for (std::size_t start = 0; start < count; start += chunk) {
        const std::size_t len = std::min(chunk, count - start);
        const auto lp = linear_predictors_standardized(
            standardize(features.subspan(start * dim, len * dim)));
        for (std::size_t i = 0; i < len; ++i) out[start + i] = lp(static_cast<Eigen::Index>(i));
    }
    return out;
}

std::vector<double> Network::linear_predictors(const Dataset& data) const {
    if (data.dim() != spec_.input_dim)
        throw ShapeError("Network: dataset dimension does not match input_dim");
    return linear_predictors(std::span<const double>(data.feature_data()));
}

namespace {

inline double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::fabs(z))); }

}  // namespace

double bce_loss(std::span<const double> linear_predictors, std::span<const double> labels) {
    if (linear_predictors.size() != labels.size())
        throw ShapeError("bce_loss: length mismatch");
    if (labels.empty()) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i)
        total += softplus(linear_predictors[i]) - labels[i] * linear_predictors[i];
    return total / static_cast<double>(labels.size());
}

double mse_loss(std::span<const double> predictions, std::span<const double> targets) {
    if (predictions.size() != targets.size()) throw ShapeError("mse_loss: length mismatch");
    if (targets.empty()) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const double r = predictions[i] - targets[i];
        total += r * r;
    }
    return total / static_cast<double>(targets.size());
}

double dataset_loss(const Network& net, const Dataset& data) {
    const auto lp = net.linear_predictors(data);
    return net.spec().head == Head::LogitClassifier ? bce_loss(lp, data.labels())
                                                    : mse_loss(lp, data.labels());
}

}  // namespace dlht::nn
