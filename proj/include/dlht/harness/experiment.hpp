#pragma once

#include <filesystem>
#include <string>

#include "dlht/harness/config.hpp"
#include "dlht/harness/results.hpp"
#include "dlht/pipeline/fitted_test.hpp"
#include "json.hpp"

namespace dlht::harness {

struct RunOptions {
    std::filesystem::path cache_dir;  // empty disables dataset and model caching
    bool write_outputs = true;        // results.csv, bundle/ and manifest.json under output_dir
    bool verbose = false;             // progress on stderr
};

// Substreams of config.seed used by each stage.
enum class Stage : std::uint64_t { Generate = 1, Fit = 2, Validate = 3, Comparators = 4, Asn = 5, Heatmap = 6 };
stats::RandomStream stage_stream(const ExperimentConfig& config, Stage stage);

// Runs `fn`, rethrowing any failure as StageError tagged with `stage`.
template <class Fn>
auto run_stage(const std::string& stage, Fn&& fn) -> decltype(fn());

// generate -> select -> fit -> calibrate, reusing cached datasets and bundles.
pipeline::FittedTest train_test(const ExperimentConfig& config, const RunOptions& options);

struct ExperimentResult {
    pipeline::FittedTest test;
    ResultsTable table;
    nlohmann::json manifest;
};

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options);

void log_progress(const RunOptions& options, const std::string& message);

}  // namespace dlht::harness

#include "dlht/errors.hpp"

namespace dlht::harness {

template <class Fn>
auto run_stage(const std::string& stage, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, e.what());
    }
}

}  // namespace dlht::harness
