#pragma once
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dlht/dataset.hpp"
#include "dlht/neural/network.hpp"

namespace dlht::nn {

struct TrainConfig {
    std::size_t epochs = 10;
    std::size_t batch_size = 10000;
    double learning_rate = 1e-3;
    std::uint64_t seed = 0;
    double validation_fraction = 0.2;

    // Adam moment decays and denominator guard.
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    void validate() const;
};

struct TrainHistory {
    std::vector<double> train_loss;       // mean mini-batch loss per epoch (training mode)
    std::vector<double> validation_loss;  // inference-mode loss per epoch, if a split was given
};

struct TrainResult {
    Network network;
    TrainHistory history;

    double final_validation_loss() const {
        return history.validation_loss.empty() ? history.train_loss.back()
                                               : history.validation_loss.back();
    }
};

// He-uniform hidden layers, Glorot-uniform head, zero biases.
Network initialize(const NetworkSpec& spec, std::uint64_t seed);

/*
 * Mini-batch Adam on the head's loss (BCE for the classifier, MSE for the
 * regressor). The standardizer is fitted on `train_data`. Throws
 * TrainingDiverged if the data or the loss become non-finite.
 */
TrainResult train(const NetworkSpec& spec, const Dataset& train_data, const TrainConfig& config,
                  const Dataset* validation_data);

// Holds out config.validation_fraction of `data` (permutation from config.seed)
// and trains on the remainder.
TrainResult train(const NetworkSpec& spec, const Dataset& data, const TrainConfig& config);

// Linear predictors with dropout active (training mode); `features` is row-major.
std::vector<double> training_forward(const Network& net, std::span<const double> features,
                                     stats::Generator& dropout);

// Gradients with the same layout as Network::layers().
struct Gradients {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> bias;
};

// Mean loss and its gradient over standardized columns, inference mode.
double loss_and_gradients(const Network& net, const Eigen::MatrixXd& columns,
                          std::span<const double> labels, Gradients& grads);

/*
 * Compares backprop gradients of a randomly initialized network against central
 * finite differences (step 1e-6). Returns the maximum relative error
 * |g - fd| / (|g| + |fd| + 1e-12) over all parameters.
 */
double gradient_check(const NetworkSpec& spec, std::span<const double> features, double label,
                      std::uint64_t seed = 1);

// Maximum relative error for an explicit network (standardizer applied).
double gradient_check(const Network& net, std::span<const double> features, double label);

}  // namespace dlht::nn
