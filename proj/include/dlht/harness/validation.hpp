#pragma once

#include <span>
#include <string>
#include <vector>

#include "dlht/harness/config.hpp"
#include "dlht/harness/results.hpp"
#include "dlht/pipeline/fitted_test.hpp"

namespace dlht::harness {

// Reject flags of a classical comparator on simulated data summaries.
std::vector<char> comparator_decisions(const std::string& name, const scenario::ScenarioSpec& spec,
                                       std::span<const scenario::DataSummary> data, double bm_level);

// BM level used for validation: fixed, or recalibrated over the null points.
double resolve_bm_level(const ExperimentConfig& config, const stats::RandomStream& stream);

/*
 * Type-I or power rows for the DNN and each comparator on the same draws,
 * an agreement row against the first comparator, and an ASN row for the
 * adaptive scenario. Point i uses stream.child(i).
 */
ResultsTable validate(const ExperimentConfig& config, const pipeline::FittedTest& test,
                      const stats::RandomStream& stream, double bm_level);

}  // namespace dlht::harness
