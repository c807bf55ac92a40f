#pragma once

#include <span>
#include <vector>

#include "dlht/dataset.hpp"
#include "dlht/scenario/scenario.hpp"

namespace dlht::scenario {

struct TrainingSet {
    LawParams null_law;
    LawParams alt_law;
};

std::vector<TrainingSet> training_sets(const ScenarioSpec& spec);

// One dataset drawn under `law`; every draw comes from `stream`.
DataSummary simulate(const ScenarioSpec& spec, const LawParams& law, const stats::RandomStream& stream);

// `count` datasets, replicate i on stream.child(i) (parallel).
std::vector<DataSummary> simulate_many(const ScenarioSpec& spec, const LawParams& law,
                                       std::size_t count, const stats::RandomStream& stream);

// Row-major statistic features of `count` simulated datasets.
std::vector<double> simulate_statistic_features(const ScenarioSpec& spec, const LawParams& law,
                                                std::size_t count, const stats::RandomStream& stream);

/*
 * First-fold training data: for each training set, b0 null rows (label 0)
 * followed by b1 alternative rows (label 1), then a joint row shuffle.
 */
Dataset gen_simple_known(const ScenarioSpec& spec, const stats::RandomStream& stream);
Dataset gen_simple_unknown(const ScenarioSpec& spec, const stats::RandomStream& stream);
Dataset gen_behrens_fisher(const ScenarioSpec& spec, const stats::RandomStream& stream);
Dataset gen_adaptive(const ScenarioSpec& spec, const adaptive::DesignParams& design,
                     const stats::RandomStream& stream);
// Dispatches on spec.kind.
Dataset generate_training(const ScenarioSpec& spec, const stats::RandomStream& stream);

// Second-fold inputs t^(c); empty for known sigma.
std::vector<std::vector<double>> gen_critical_inputs(const ScenarioSpec& spec);

// Null law indexed by a second-fold input.
LawParams null_law_for(const ScenarioSpec& spec, std::span<const double> critical_input);

}  // namespace dlht::scenario
