#include "dlht/harness/reproduce.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>

#include "dlht/errors.hpp"

#ifndef DLHT_CONFIG_DIR
#define DLHT_CONFIG_DIR "configs"
#endif

namespace dlht::harness {

namespace fs = std::filesystem;

fs::path default_config_dir() {
    if (const char* env = std::getenv("DLHT_CONFIG_DIR"); env && *env) return env;
    return DLHT_CONFIG_DIR;
}

const std::vector<std::string>& exhibit_ids() {
    static const std::vector<std::string> ids{"T1", "T2", "T3", "T4", "T5", "T6", "F1"};
    return ids;
}

namespace {

std::string config_file(const std::string& id) {
    if (id == "T1" || id == "T2" || id == "F1") return "musec.json";
    if (id == "T3") return "table3.json";
    if (id == "T4") return "table4.json";
    if (id == "T5") return "table5.json";
    if (id == "T6") return "table6.json";
    throw UsageError("unknown exhibit '" + id + "' (expected T1-T6 or F1)");
}

}  // namespace

std::vector<ExperimentConfig> exhibit_configs(const std::string& id, const ReproduceOptions& options) {
    const auto dir = options.config_dir.empty() ? default_config_dir() : options.config_dir;
    auto configs = load_configs(dir / config_file(id));
    for (auto& c : configs) {
        c = c.scaled(options.scale);
        if (options.seed) c.seed = *options.seed;
        c.output_dir = options.out_dir / id / c.name;
    }
    return configs;
}

ResultsTable asn_table(const ExperimentConfig& config, const pipeline::FittedTest& test, const AsnOptions& asn,
                       const RunOptions& run) {
    ResultsTable table;
    for (const auto& point : config.points) {
        if (point.hypothesis != Hypothesis::Alternative) continue;
        log_progress(run, "[asn] " + point.label);
        for (const auto& row : asn_for_power(config, test, point.law, asn, run)) {
            const auto it = point.reference.find(row.method + "@90");
            const double reference = it == point.reference.end() ? std::nan("") : it->second;
            if (!row.reachable) {
                table.add({config.name, point.label, row.method, "ASN", std::nan(""), 0.0, 0, reference});
                continue;
            }
            table.add({config.name, point.label, row.method, "ASN", row.asn, row.asn_se, row.reps, reference});
            table.add({config.name, point.label, row.method, "n2_max", static_cast<double>(row.n2_max), 0.0,
                       row.reps, std::nan("")});
            table.add({config.name, point.label, row.method, "power", row.power, rate_se(row.power, row.reps),
                       row.reps, std::nan("")});
        }
    }
    return table;
}

std::vector<HeatmapLaw> default_heatmap_laws() { return {{"null", 0.27, 0.27}, {"alt", 0.27, 0.40}}; }

ResultsTable reproduce(const std::string& id, const ReproduceOptions& options) {
    const auto configs = run_stage("config", [&] { return exhibit_configs(id, options); });
    ResultsTable table;
    if (id == "T2") {
        const auto& c = configs.front();
        const auto test = train_test(c, options.run);
        table = run_stage("asn", [&] { return asn_table(c, test, AsnOptions{}, options.run); });
        run_stage("write", [&] { table.save_csv(c.output_dir / "asn.csv"); });
        return table;
    }
    if (id == "F1") {
        const auto& c = configs.front();
        const auto test = train_test(c, options.run);
        const auto reps = std::max<std::size_t>(100, static_cast<std::size_t>(std::llround(1000 * options.scale)));
        const auto map = run_stage("heatmap", [&] {
            return conditional_rejection_map(test, default_heatmap_laws(), reps, c.bm_level,
                                             stage_stream(c, Stage::Heatmap));
        });
        run_stage("write", [&] {
            fs::create_directories(c.output_dir);
            std::ofstream out(c.output_dir / "heatmap.csv");
            map.write_csv(out);
        });
        const char* methods[] = {"DNN", "incta", "bm"};
        for (std::size_t m = 0; m < 3; ++m) {
            double diag = 0.0;
            for (int x = 0; x <= map.n1; ++x) diag = std::max(diag, map.cell(x, x).reject[Heatmap::column(0, m)]);
            table.add({c.name, "diagonal-max;null", methods[m], "reject", diag, 0.0, reps, std::nan("")});
            const double v = map.cell(10, 60).reject[Heatmap::column(1, m)];
            table.add({c.name, "x_t1=60;x_p1=10;alt", methods[m], "reject", v, rate_se(v, reps), reps, std::nan("")});
        }
        return table;
    }
    for (const auto& c : configs) table.append(run_experiment(c, options.run).table);
    run_stage("write", [&] { table.save_csv(options.out_dir / id / "results.csv"); });
    return table;
}

}  // namespace dlht::harness
