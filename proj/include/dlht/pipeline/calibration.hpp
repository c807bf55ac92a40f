#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "dlht/neural/network.hpp"
#include "dlht/pipeline/selection.hpp"
#include "dlht/scenario/scenario.hpp"

namespace dlht::pipeline {

// Maps row-major statistic features to one statistic value per row.
using BatchStatistic = std::function<std::vector<double>(std::span<const double>)>;

// Linear predictor of a first-fold network.
BatchStatistic network_statistic(const nn::Network& net);

struct ConstantCutoff {
    double value = 0.0;
};

// Upper alpha quantile of the statistic over `reps` null replicates.
ConstantCutoff calibrate_constant_cutoff(const BatchStatistic& statistic, const scenario::ScenarioSpec& spec,
                                         const scenario::LawParams& null_law, std::size_t reps, double alpha,
                                         const stats::RandomStream& stream);

// One label per critical input; input l uses stream.child(l).
std::vector<double> critical_labels(const BatchStatistic& statistic, const scenario::ScenarioSpec& spec,
                                    const std::vector<std::vector<double>>& inputs, std::size_t reps,
                                    double alpha, const stats::RandomStream& stream);

struct CriticalFit {
    nn::Network network;
    std::vector<std::vector<double>> inputs;
    std::vector<double> labels;
    SelectionReport report;
    double validation_mse = 0.0;
};

/*
 * Second fold: null quantiles of the statistic at every critical input,
 * then a regression network through them.
 */
CriticalFit fit_critical_net(const BatchStatistic& statistic, const scenario::ScenarioSpec& spec,
                             const std::vector<std::vector<double>>& inputs, std::size_t reps, double alpha,
                             const CandidatePool& pool, const nn::TrainConfig& config,
                             const stats::RandomStream& stream);

}  // namespace dlht::pipeline
