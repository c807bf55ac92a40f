#include "dlht/harness/experiment.hpp"

#include <chrono>
#include <fstream>
#include <iostream>

#include "dlht/hash.hpp"
#include "dlht/neural/serialize.hpp"
#include "dlht/harness/validation.hpp"
#include "dlht/parallel.hpp"
#include "dlht/pipeline/bundle.hpp"
#include "dlht/scenario/dataset_io.hpp"
#include "dlht/scenario/generators.hpp"

namespace dlht::harness {

namespace fs = std::filesystem;

stats::RandomStream stage_stream(const ExperimentConfig& config, Stage stage) {
    return {config.seed, static_cast<std::uint64_t>(stage)};
}

void log_progress(const RunOptions& options, const std::string& message) {
    if (options.verbose) std::cerr << message << std::endl;
}

namespace {

std::string model_key(const ExperimentConfig& c) {
    nlohmann::json j = {{"scenario", scenario::to_json(c.scenario)},
                        {"fit", pipeline::fit_options_to_json(c.fit)},
                        {"seed", c.seed},
                        {"bundle", pipeline::kBundleFormatVersion}};
    return c.name + "-" + hex64(fnv1a(j.dump()));
}

}  // namespace

pipeline::FittedTest train_test(const ExperimentConfig& config, const RunOptions& options) {
    run_stage("config", [&] { config.validate(); });
    const auto& spec = config.scenario;
    fs::path model_dir;
    if (!options.cache_dir.empty()) {
        model_dir = options.cache_dir / "models" / model_key(config);
        if (fs::exists(model_dir / "manifest.json")) {
            log_progress(options, "[" + config.name + "] using cached model " + model_dir.string());
            return run_stage("load", [&] { return pipeline::load_bundle(model_dir); });
        }
    }
    log_progress(options, "[" + config.name + "] generating training data");
    const Dataset data = run_stage("generate", [&] {
        const auto build = [&] { return scenario::generate_training(spec, stage_stream(config, Stage::Generate)); };
        if (options.cache_dir.empty()) return build();
        return scenario::cached_dataset(options.cache_dir / "datasets", scenario::dataset_key(spec, config.seed),
                                        build);
    });
    log_progress(options, "[" + config.name + "] fitting on " + std::to_string(data.size()) + " rows");
    auto test = run_stage("fit", [&] {
        return pipeline::fit_test(spec, data, config.fit, stage_stream(config, Stage::Fit));
    });
    test.provenance["experiment"] = config.name;
    if (!model_dir.empty()) run_stage("cache", [&] { pipeline::save_bundle(test, model_dir); });
    return test;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    ExperimentResult result{train_test(config, options), {}, {}};
    const double bm = run_stage("calibrate", [&] {
        return config.scenario.kind == scenario::Kind::AdaptiveBinomial
                   ? resolve_bm_level(config, stage_stream(config, Stage::Comparators))
                   : config.bm_level;
    });
    log_progress(options, "[" + config.name + "] validating " + std::to_string(config.points.size()) + " points");
    result.table = run_stage("validate", [&] {
        return validate(config, result.test, stage_stream(config, Stage::Validate), bm);
    });
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.manifest = {{"experiment", config.name},
                       {"config_hash", config.fingerprint()},
                       {"seed", config.seed},
                       {"bm_level", bm},
                       {"workers", worker_count()},
                       {"wall_seconds", wall},
                       {"versions",
                        {{"bundle", pipeline::kBundleFormatVersion},
                         {"model", nn::kModelFormatVersion},
                         {"dataset", scenario::kDataFormatVersion}}},
                       {"config", to_json(config)}};
    if (options.write_outputs) {
        run_stage("write", [&] {
            fs::create_directories(config.output_dir);
            result.table.save_csv(config.output_dir / "results.csv");
            pipeline::save_bundle(result.test, config.output_dir / "bundle");
            std::ofstream(config.output_dir / "manifest.json") << result.manifest.dump(2) << '\n';
        });
    }
    return result;
}

}  // namespace dlht::harness
