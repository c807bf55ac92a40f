#pragma once
#include <Eigen/Core>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dlht/dataset.hpp"

namespace dlht::nn {

enum class Head {
    LogitClassifier,  // sigmoid output; linear predictor is the test statistic
    LinearRegressor,
};

std::string to_string(Head head);
Head head_from_string(const std::string& name);

struct NetworkSpec {
    std::size_t input_dim = 1;
    std::vector<std::size_t> hidden_layers;
    Head head = Head::LogitClassifier;
    double dropout_rate = 0.0;

    void validate() const;
    std::size_t parameter_count() const;
    std::string describe() const;

    friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

struct DenseLayer {
    Eigen::MatrixXd weights;  // (fan_out x fan_in)
    Eigen::VectorXd bias;
};

// Per-feature affine map applied before the first layer: (x - shift) / scale.
struct Standardizer {
    Eigen::VectorXd shift;
    Eigen::VectorXd scale;

    static Standardizer identity(std::size_t dim);
    static Standardizer fit(const Dataset& data);
};

struct Prediction {
    double output = 0.0;
    double linear_predictor = 0.0;
};

class Network {
   public:
    Network(NetworkSpec spec, Standardizer standardizer, std::vector<DenseLayer> layers);

    // All weights and biases zero, identity standardizer.
    static Network zeros(const NetworkSpec& spec);

    const NetworkSpec& spec() const { return spec_; }
    const Standardizer& standardizer() const { return standardizer_; }
    const std::vector<DenseLayer>& layers() const { return layers_; }
    std::vector<DenseLayer>& mutable_layers() { return layers_; }
    std::size_t input_dim() const { return spec_.input_dim; }

    // Inference-mode forward pass (dropout disabled).
    Prediction forward(std::span<const double> features) const;

    // Linear predictors for a batch; `features` is row-major (count x input_dim).
    std::vector<double> linear_predictors(std::span<const double> features) const;
    std::vector<double> linear_predictors(const Dataset& data) const;

    // Same as above on already-standardized columns (input_dim x count).
    Eigen::RowVectorXd linear_predictors_standardized(const Eigen::MatrixXd& columns) const;

    Eigen::MatrixXd standardize(std::span<const double> features) const;

   private:
    void check_shapes() const;

    NetworkSpec spec_;
    Standardizer standardizer_;
    std::vector<DenseLayer> layers_;
};

double sigmoid(double z);

// Mean negative Bernoulli log-likelihood evaluated on linear predictors.
double bce_loss(std::span<const double> linear_predictors, std::span<const double> labels);
double mse_loss(std::span<const double> predictions, std::span<const double> targets);

// Loss of the network's head on a dataset (BCE or MSE), inference mode.
double dataset_loss(const Network& net, const Dataset& data);

}  // namespace dlht::nn
