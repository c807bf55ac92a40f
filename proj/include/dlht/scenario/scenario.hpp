#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "dlht/adaptive/reassessment.hpp"
#include "dlht/stats/summary.hpp"
#include "json.hpp"

namespace dlht::scenario {

enum class Kind {
    NormalKnownSigma,
    NormalUnknownSigma,
    BehrensFisher,
    AdaptiveBinomial,
};

std::string to_string(Kind kind);
Kind kind_from_string(const std::string& name);

/*
 * Everything needed to build the training, calibration and validation data of
 * one testing problem.
 *
 * Training sets (A of them), by kind:
 *   known sigma:   one per alt mean, sigma = sigma_grid[0]
 *   unknown sigma: one per sigma_grid value; alt mean from alt_powers[0]
 *   Behrens-Fisher: sigma_grid x sigma_grid x alt_powers (Welch approximation)
 *   adaptive:      one per rate_grid value; pi_t = solve_pi_t(pi_p, alt_power, power_n)
 */
struct ScenarioSpec {
    Kind kind = Kind::NormalKnownSigma;
    std::size_t n = 50;  // per-group size (normal kinds)
    double alpha = 0.05;
    double null_mean = 0.0;  // mu0, or mu_p for two samples
    std::vector<double> alt_means;
    std::vector<double> sigma_grid{1.0};
    std::vector<double> alt_powers;
    std::vector<double> rate_grid;
    double alt_power = 0.85;
    int power_n = 170;

    // Second-fold inputs: regular sequence on [critical_lo, critical_hi] with
    // critical_points values (per axis for Behrens-Fisher).
    double critical_lo = 0.0;
    double critical_hi = 0.0;
    std::size_t critical_points = 100;

    std::size_t b0 = 1000;  // null replicates per training set
    std::size_t b1 = 1000;  // alternative replicates per training set
    std::size_t calibration_reps = 100000;  // B' per critical input

    adaptive::DesignParams design;  // adaptive only

    void validate() const;
    std::size_t training_sets() const;
    std::size_t statistic_dim() const;
    std::size_t critical_dim() const;  // 0 for known sigma
    std::vector<std::string> statistic_names() const;
    std::vector<std::string> critical_names() const;
};

nlohmann::json to_json(const ScenarioSpec& spec);
ScenarioSpec scenario_from_json(const nlohmann::json& j);
nlohmann::json design_to_json(const adaptive::DesignParams& d);
adaptive::DesignParams design_from_json(const nlohmann::json& j, adaptive::DesignParams base = {});

// Data-generating parameters of one batch of replicates.
struct LawParams {
    double mean_t = 0.0;  // one-sample data, or treatment arm
    double sd_t = 1.0;
    double mean_p = 0.0;  // control arm (two samples)
    double sd_p = 1.0;
    double rate_p = 0.0;  // adaptive arms
    double rate_t = 0.0;
};

// Sufficient summaries of one dataset, observed or simulated.
struct DataSummary {
    stats::SampleSummary x;        // one-sample data, or treatment arm
    stats::SampleSummary control;  // two samples only
    adaptive::TrialPath path;      // adaptive only
};

// Raw observed data accepted by the decision rule.
struct OneSample {
    std::vector<double> x;
};
struct TwoSample {
    std::vector<double> control;
    std::vector<double> treatment;
};
using Observation = std::variant<OneSample, TwoSample, adaptive::TrialPath>;

// Throws UsageError when the observation does not fit the scenario kind.
DataSummary summarize_observation(const ScenarioSpec& spec, const Observation& obs);

// t^(s): MLE plug-ins. t^(c): unbiased plug-ins (empty for known sigma).
void statistic_features(const ScenarioSpec& spec, const DataSummary& d, double* out);
void critical_features(const ScenarioSpec& spec, const DataSummary& d, double* out);
std::vector<double> statistic_features(const ScenarioSpec& spec, const DataSummary& d);
std::vector<double> critical_features(const ScenarioSpec& spec, const DataSummary& d);

}  // namespace dlht::scenario
