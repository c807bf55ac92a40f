#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dlht/pipeline/fitted_test.hpp"
#include "dlht/scenario/scenario.hpp"
#include "json.hpp"

namespace dlht::harness {

enum class Hypothesis { Null, Alternative };

struct ValidationPoint {
    std::string label;
    Hypothesis hypothesis = Hypothesis::Null;
    scenario::LawParams law;
    std::map<std::string, double> reference;  // method -> published rate; "ASN" for sample size
};

struct ExperimentConfig {
    std::string name;
    std::uint64_t seed = 0;
    scenario::ScenarioSpec scenario;  // carries b0, b1 and B'
    pipeline::FitOptions fit;
    std::size_t validation_reps = 200000;
    std::vector<ValidationPoint> points;
    std::vector<std::string> comparators;
    double bm_level = 0.033;
    bool bm_calibrate = false;  // recalibrate BM's level over the null points instead
    std::filesystem::path output_dir;

    void validate() const;
    // Multiplies b0, b1, B' and B_val by `scale`, keeping each at least 1.
    ExperimentConfig scaled(double scale) const;
    // Stable digest of every field that affects results.
    std::string fingerprint() const;
};

nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);

/*
 * A config file holds either one experiment or {"name", "experiments": [...]}.
 * Fields in an optional top-level "defaults" object are merged into every
 * experiment before parsing.
 */
std::vector<ExperimentConfig> load_configs(const std::filesystem::path& path);
std::vector<ExperimentConfig> configs_from_json(const nlohmann::json& j);

std::string to_string(Hypothesis h);

}  // namespace dlht::harness
