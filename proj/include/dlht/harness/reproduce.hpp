#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dlht/harness/asn.hpp"
#include "dlht/harness/experiment.hpp"
#include "dlht/harness/heatmap.hpp"
#include "dlht/harness/results.hpp"

namespace dlht::harness {

struct ReproduceOptions {
    double scale = 0.1;
    std::filesystem::path config_dir;  // empty: default_config_dir()
    std::filesystem::path out_dir = "out";
    std::optional<std::uint64_t> seed;
    RunOptions run;
};

// DLHT_CONFIG_DIR from the environment, else the configs/ directory of the source tree.
std::filesystem::path default_config_dir();

const std::vector<std::string>& exhibit_ids();  // T1..T6, F1

// Canned experiments for an exhibit, scaled.
std::vector<ExperimentConfig> exhibit_configs(const std::string& id, const ReproduceOptions& options);

// ASN-for-power rows for every alternative point of an adaptive config.
ResultsTable asn_table(const ExperimentConfig& config, const pipeline::FittedTest& test, const AsnOptions& asn,
                       const RunOptions& run);

// Default laws: null at pi = 0.27 and the training alternative (0.27, 0.40).
std::vector<HeatmapLaw> default_heatmap_laws();

ResultsTable reproduce(const std::string& id, const ReproduceOptions& options);

}  // namespace dlht::harness
