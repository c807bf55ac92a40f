#include "dlht/pipeline/calibration.hpp"

#include <cmath>

#include "dlht/errors.hpp"
#include "dlht/scenario/generators.hpp"
#include "dlht/stats/summary.hpp"

namespace dlht::pipeline {

BatchStatistic network_statistic(const nn::Network& net) {
    return [&net](std::span<const double> rows) { return net.linear_predictors(rows); };
}

namespace {

double null_quantile(const BatchStatistic& statistic, const scenario::ScenarioSpec& spec,
                     const scenario::LawParams& law, std::size_t reps, double alpha,
                     const stats::RandomStream& stream) {
    const auto features = scenario::simulate_statistic_features(spec, law, reps, stream);
    const auto values = statistic(features);
    if (values.size() != reps) throw ShapeError("statistic returned the wrong number of values");
    for (double v : values)
        if (!std::isfinite(v)) throw CalibrationError("non-finite statistic under the null");
    return stats::empirical_upper_quantile(values, alpha);
}

}  // namespace

ConstantCutoff calibrate_constant_cutoff(const BatchStatistic& statistic, const scenario::ScenarioSpec& spec,
                                         const scenario::LawParams& null_law, std::size_t reps, double alpha,
                                         const stats::RandomStream& stream) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must be in (0, 1)");
    if (reps == 0) throw InsufficientData("cutoff calibration needs at least one replicate");
    return {null_quantile(statistic, spec, null_law, reps, alpha, stream)};
}

std::vector<double> critical_labels(const BatchStatistic& statistic, const scenario::ScenarioSpec& spec,
                                    const std::vector<std::vector<double>>& inputs, std::size_t reps,
                                    double alpha, const stats::RandomStream& stream) {
    if (reps == 0) throw InsufficientData("critical labels need at least one replicate");
    std::vector<double> labels(inputs.size());
    for (std::size_t l = 0; l < inputs.size(); ++l) {
        if (inputs[l].size() != spec.critical_dim()) throw ShapeError("critical input has the wrong dimension");
        labels[l] = null_quantile(statistic, spec, scenario::null_law_for(spec, inputs[l]), reps, alpha,
                                  stream.child(l));
    }
    return labels;
}

CriticalFit fit_critical_net(const BatchStatistic& statistic, const scenario::ScenarioSpec& spec,
                             const std::vector<std::vector<double>>& inputs, std::size_t reps, double alpha,
                             const CandidatePool& pool, const nn::TrainConfig& config,
                             const stats::RandomStream& stream) {
    pool.validate();
    if (pool.specs.front().head != nn::Head::LinearRegressor)
        throw std::invalid_argument("critical network needs a linear-regressor head");
    if (pool.specs.front().input_dim != spec.critical_dim())
        throw ShapeError("critical pool input dimension does not match the scenario");
    auto labels = critical_labels(statistic, spec, inputs, reps, alpha, stream.child(0));

    Dataset data(spec.critical_names());
    data.reserve(inputs.size());
    for (std::size_t l = 0; l < inputs.size(); ++l) data.add(inputs[l], labels[l]);
    auto sel = select_structure(pool, data, config, stream.child(1));
    const double mse = sel.report.candidates[sel.report.selected].validation_loss;
    return {std::move(sel.network), inputs, std::move(labels), std::move(sel.report), mse};
}

}  // namespace dlht::pipeline
