#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "dlht/adaptive/comparators.hpp"
#include "dlht/errors.hpp"
#include "dlht/harness/asn.hpp"
#include "dlht/harness/experiment.hpp"
#include "dlht/harness/heatmap.hpp"
#include "dlht/harness/reproduce.hpp"
#include "dlht/harness/validation.hpp"
#include "dlht/parallel.hpp"
#include "dlht/pipeline/bundle.hpp"

namespace fs = std::filesystem;
using namespace dlht;
using namespace dlht::harness;

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    double scale = 1.0;
    unsigned workers = 1;
    std::string out = "out";
    std::string cache;
    bool quiet = false;
};

void add_common(CLI::App* cmd, Common& c, bool needs_config, double* scale = nullptr) {
    auto* opt = cmd->add_option("--config", c.config, "experiment config (JSON)");
    if (needs_config) opt->required()->check(CLI::ExistingFile);
    cmd->add_option("--seed", c.seed, "override the config seed");
    cmd->add_option("--scale", scale ? *scale : c.scale, "multiply every Monte Carlo size")
        ->check(CLI::Range(1e-6, 1.0))
        ->capture_default_str();
    cmd->add_option("--workers", c.workers, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--out", c.out, "output directory");
    cmd->add_option("--cache", c.cache, "dataset and model cache (default <out>/cache)");
    cmd->add_flag("-q,--quiet", c.quiet, "no progress output");
}

RunOptions run_options(const Common& c) {
    RunOptions r;
    r.cache_dir = c.cache.empty() ? fs::path(c.out) / "cache" : fs::path(c.cache);
    r.verbose = !c.quiet;
    return r;
}

std::vector<ExperimentConfig> configs(const Common& c) {
    auto list = run_stage("config", [&] { return load_configs(c.config); });
    for (auto& e : list) {
        if (c.scale != 1.0) e = e.scaled(c.scale);
        if (c.seed) e.seed = *c.seed;
        e.output_dir = fs::path(c.out) / e.name;
    }
    return list;
}

ExperimentConfig single(const Common& c, const std::string& name) {
    auto list = configs(c);
    if (name.empty()) return list.front();
    for (auto& e : list)
        if (e.name == name) return e;
    throw UsageError("no experiment named '" + name + "' in " + c.config);
}

pipeline::FittedTest test_for(const ExperimentConfig& e, const std::string& bundle, const RunOptions& run) {
    if (!bundle.empty()) return run_stage("load", [&] { return pipeline::load_bundle(bundle); });
    return train_test(e, run);
}

void emit(const ResultsTable& table, const fs::path& csv) {
    table.print(std::cout);
    run_stage("write", [&] { table.save_csv(csv); });
    std::cerr << "wrote " << csv.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Neural-network guided hypothesis tests: training, calibration and validation"};
    app.require_subcommand(1);
    Common common;

    auto* train = app.add_subcommand("train", "fit the statistic and critical-value networks");
    add_common(train, common, true);

    auto* calibrate = app.add_subcommand("calibrate", "refit the cutoff of a saved test");
    std::string bundle;
    std::optional<double> alpha;
    std::optional<std::size_t> reps;
    add_common(calibrate, common, false);
    calibrate->add_option("--bundle", bundle, "test bundle directory")->required()->check(CLI::ExistingDirectory);
    calibrate->add_option("--alpha", alpha, "new significance level")->check(CLI::Range(1e-9, 1.0 - 1e-9));
    calibrate->add_option("--reps", reps, "null replicates per critical input")->check(CLI::PositiveNumber);

    auto* validate = app.add_subcommand("validate", "type I error and power of a fitted test");
    std::string experiment;
    add_common(validate, common, true);
    validate->add_option("--bundle", bundle, "use this bundle instead of training")->check(CLI::ExistingDirectory);
    validate->add_option("--experiment", experiment, "experiment name within the config");

    auto* sim = app.add_subcommand("simulate-trial", "simulate adaptive trials and write the cohort");
    double pi_p = 0.27, pi_t = 0.40;
    std::size_t count = 10;
    add_common(sim, common, false);
    sim->add_option("--pi-p", pi_p, "placebo response rate")->check(CLI::Range(0.0, 1.0));
    sim->add_option("--pi-t", pi_t, "treatment response rate")->check(CLI::Range(0.0, 1.0));
    sim->add_option("--count", count, "number of trials")->check(CLI::PositiveNumber);
    sim->add_option("--bundle", bundle, "add DNN decisions from this bundle")->check(CLI::ExistingDirectory);

    auto* asn = app.add_subcommand("asn", "sample size needed for a target power");
    AsnOptions asn_opts;
    std::string dnn_refit = "retrain";
    add_common(asn, common, true);
    asn->add_option("--bundle", bundle, "use this bundle instead of training")->check(CLI::ExistingDirectory);
    asn->add_option("--experiment", experiment, "experiment name within the config");
    asn->add_option("--target", asn_opts.target_power, "target power")->check(CLI::Range(0.0, 1.0));
    asn->add_option("--cap", asn_opts.n2_max_cap, "largest n2_max searched")->check(CLI::PositiveNumber);
    asn->add_option("--dnn-refit", dnn_refit, "how the DNN follows n2_max: retrain, recalibrate or fixed")
        ->check(CLI::IsMember({"retrain", "recalibrate", "fixed"}));
    asn->add_flag("!--fixed-bm", asn_opts.recalibrate_bm, "keep the configured BM level at every n2_max");

    auto* heat = app.add_subcommand("heatmap", "conditional rejection probability per stage-1 cell");
    std::size_t cell_reps = 1000;
    add_common(heat, common, false);
    heat->add_option("--bundle", bundle, "use this bundle instead of training")->check(CLI::ExistingDirectory);
    heat->add_option("--reps", cell_reps, "stage-2 replicates per cell")->check(CLI::PositiveNumber);

    auto* repro = app.add_subcommand("reproduce", "rerun a published table or figure");
    std::string exhibit;
    double repro_scale = 0.1;
    add_common(repro, common, false, &repro_scale);
    repro->add_option("exhibit", exhibit, "T1-T6 or F1")->required()->check(CLI::IsMember(exhibit_ids()));
    std::string config_dir;
    repro->add_option("--config-dir", config_dir, "directory of canned configs");

    CLI11_PARSE(app, argc, argv);
    set_worker_count(common.workers);
    const auto run = run_options(common);

    try {
        if (train->parsed()) {
            for (const auto& e : configs(common)) {
                const auto test = train_test(e, run);
                run_stage("write", [&] { pipeline::save_bundle(test, e.output_dir / "bundle"); });
                std::cout << e.name << ": " << (e.output_dir / "bundle").string() << '\n';
            }
        } else if (calibrate->parsed()) {
            auto test = run_stage("load", [&] { return pipeline::load_bundle(bundle); });
            auto fit = pipeline::default_fit_options(test.scenario);
            if (test.provenance.contains("options"))
                fit = pipeline::fit_options_from_json(test.provenance["options"], test.scenario);
            if (alpha) test.alpha = test.scenario.alpha = *alpha;
            if (reps) test.scenario.calibration_reps = *reps;
            const std::uint64_t seed = common.seed.value_or(test.provenance.value("seed", std::uint64_t{0}));
            run_stage("calibrate",
                      [&] { pipeline::recalibrate(test, fit, stats::RandomStream{seed, static_cast<std::uint64_t>(Stage::Fit)}.child(3)); });
            const auto dest = fs::path(common.out) / "bundle";
            run_stage("write", [&] { pipeline::save_bundle(test, dest); });
            std::cout << dest.string() << '\n';
        } else if (validate->parsed()) {
            if (!bundle.empty() || !experiment.empty()) {
                const auto e = single(common, experiment);
                const auto test = test_for(e, bundle, run);
                const double bm = run_stage("calibrate", [&] {
                    return test.scenario.kind == scenario::Kind::AdaptiveBinomial
                               ? resolve_bm_level(e, stage_stream(e, Stage::Comparators))
                               : e.bm_level;
                });
                emit(run_stage("validate", [&] { return harness::validate(e, test, stage_stream(e, Stage::Validate), bm); }),
                     e.output_dir / "results.csv");
            } else {
                ResultsTable all;
                for (const auto& e : configs(common)) all.append(run_experiment(e, run).table);
                emit(all, fs::path(common.out) / "results.csv");
            }
        } else if (sim->parsed()) {
            adaptive::DesignParams design;
            std::optional<pipeline::FittedTest> test;
            std::uint64_t seed = common.seed.value_or(1);
            if (!common.config.empty()) {
                const auto e = single(common, "");
                design = e.scenario.design;
                seed = e.seed;
            }
            if (!bundle.empty()) {
                test = run_stage("load", [&] { return pipeline::load_bundle(bundle); });
                design = test->scenario.design;
            }
            const auto paths = run_stage("simulate", [&] {
                return adaptive::simulate_trials(pi_p, pi_t, *adaptive::reassessment_table(design), count,
                                                 stats::RandomStream{seed, 7});
            });
            std::ofstream file;
            if (!common.out.empty() && common.out != "-") {
                fs::create_directories(common.out);
                file.open(fs::path(common.out) / "cohort.csv");
            }
            std::ostream& out = file.is_open() ? file : std::cout;
            out << "x_p1,x_t1,n2,x_p2,x_t2,incta,bm" << (test ? ",dnn_statistic,dnn_cutoff,dnn" : "") << '\n';
            for (const auto& p : paths) {
                out << p.x_p1 << ',' << p.x_t1 << ',' << p.n2 << ',' << p.x_p2 << ',' << p.x_t2 << ','
                    << adaptive::incta_decision(p, design.n1, design.alpha) << ',' << adaptive::bm_decision(p, design.n1);
                if (test) {
                    const auto d = pipeline::decide(*test, scenario::Observation{p});
                    out << ',' << d.statistic << ',' << d.cutoff << ',' << d.reject;
                }
                out << '\n';
            }
            if (file.is_open()) std::cerr << "wrote " << (fs::path(common.out) / "cohort.csv").string() << '\n';
        } else if (asn->parsed()) {
            asn_opts.dnn = dnn_refit_from_string(dnn_refit);
            const auto e = single(common, experiment);
            const auto test = test_for(e, bundle, run);
            emit(run_stage("asn", [&] { return asn_table(e, test, asn_opts, run); }), e.output_dir / "asn.csv");
        } else if (heat->parsed()) {
            if (common.config.empty() && bundle.empty()) throw UsageError("heatmap needs --config or --bundle");
            std::optional<ExperimentConfig> e;
            if (!common.config.empty()) e = single(common, "");
            const auto test = bundle.empty() ? train_test(*e, run) : test_for(*e, bundle, run);
            const auto stream = e ? stage_stream(*e, Stage::Heatmap)
                                  : stats::RandomStream{common.seed.value_or(1), static_cast<std::uint64_t>(Stage::Heatmap)};
            const auto map = run_stage("heatmap", [&] {
                return conditional_rejection_map(test, default_heatmap_laws(), cell_reps,
                                                 e ? e->bm_level : adaptive::kBmDefaultLevel, stream);
            });
            const auto path = fs::path(common.out) / "heatmap.csv";
            run_stage("write", [&] {
                fs::create_directories(common.out);
                std::ofstream out(path);
                map.write_csv(out);
            });
            std::cout << path.string() << '\n';
        } else if (repro->parsed()) {
            ReproduceOptions opts;
            opts.scale = repro_scale;
            opts.config_dir = config_dir;
            opts.out_dir = common.out;
            opts.seed = common.seed;
            opts.run = run;
            reproduce(exhibit, opts).print(std::cout);
        }
    } catch (const StageError& e) {
        std::cerr << "error " << e.what() << '\n';
        return 1;
    } catch (const UsageError& e) {
        std::cerr << "error [usage] " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error [cli] " << e.what() << '\n';
        return 1;
    }
    return 0;
}
