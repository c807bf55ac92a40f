#include "dlht/harness/validation.hpp"

#include <cmath>

#include "dlht/adaptive/comparators.hpp"
#include "dlht/classical/tests.hpp"
#include "dlht/errors.hpp"
#include "dlht/parallel.hpp"
#include "dlht/scenario/generators.hpp"

namespace dlht::harness {

using scenario::Kind;

std::vector<char> comparator_decisions(const std::string& name, const scenario::ScenarioSpec& spec,
                                       std::span<const scenario::DataSummary> data, double bm_level) {
    std::vector<char> out(data.size());
    const auto check = [&](Kind k) {
        if (spec.kind != k) throw UsageError("comparator '" + name + "' does not apply to " + to_string(spec.kind));
    };
    if (name == "z-test") {
        check(Kind::NormalKnownSigma);
        for (std::size_t i = 0; i < data.size(); ++i)
            out[i] = classical::z_test(data[i].x.mean, data[i].x.n, spec.null_mean, spec.sigma_grid.front(),
                                       spec.alpha)
                         .reject;
    } else if (name == "t-test") {
        check(Kind::NormalUnknownSigma);
        for (std::size_t i = 0; i < data.size(); ++i)
            out[i] = classical::t_test_one_sample(data[i].x, spec.null_mean, spec.alpha).reject;
    } else if (name == "welch") {
        check(Kind::BehrensFisher);
        for (std::size_t i = 0; i < data.size(); ++i)
            out[i] = classical::welch_t_test(data[i].control, data[i].x, spec.alpha).reject;
    } else if (name == "incta") {
        check(Kind::AdaptiveBinomial);
        for (std::size_t i = 0; i < data.size(); ++i)
            out[i] = adaptive::incta_decision(data[i].path, spec.design.n1, spec.alpha);
    } else if (name == "bm") {
        check(Kind::AdaptiveBinomial);
        for (std::size_t i = 0; i < data.size(); ++i)
            out[i] = adaptive::bm_decision(data[i].path, spec.design.n1, bm_level);
    } else {
        throw UsageError("unknown comparator '" + name + "'");
    }
    return out;
}

double resolve_bm_level(const ExperimentConfig& config, const stats::RandomStream& stream) {
    if (!config.bm_calibrate) return config.bm_level;
    std::vector<double> grid;
    for (const auto& p : config.points)
        if (p.hypothesis == Hypothesis::Null) grid.push_back(p.law.rate_p);
    if (grid.empty()) throw UsageError("BM calibration needs at least one null point");
    return adaptive::calibrate_bm(config.scenario.design, grid, config.scenario.alpha, config.validation_reps, stream)
        .adjusted_alpha;
}

namespace {

double reference_value(const ValidationPoint& p, const std::string& method) {
    const auto it = p.reference.find(method);
    return it == p.reference.end() ? std::nan("") : it->second;
}

}  // namespace

ResultsTable validate(const ExperimentConfig& config, const pipeline::FittedTest& test,
                      const stats::RandomStream& stream, double bm_level) {
    ResultsTable table;
    const auto& spec = test.scenario;
    const std::size_t reps = config.validation_reps;
    for (std::size_t k = 0; k < config.points.size(); ++k) {
        const auto& point = config.points[k];
        const std::string metric = point.hypothesis == Hypothesis::Null ? "type-I" : "power";
        const auto data = scenario::simulate_many(spec, point.law, reps, stream.child(k));
        const auto dnn = pipeline::decide_batch(test, data);
        std::size_t hits = 0;
        for (const auto& d : dnn) {
            if (!std::isfinite(d.statistic) || !std::isfinite(d.cutoff))
                throw CalibrationError("non-finite statistic or cutoff at point " + point.label);
            hits += d.reject;
        }
        table.add_rate(config.name, point.label, "DNN", metric, hits, reps, reference_value(point, "DNN"));

        for (std::size_t c = 0; c < config.comparators.size(); ++c) {
            const auto& name = config.comparators[c];
            const auto flags = comparator_decisions(name, spec, data, bm_level);
            std::size_t h = 0, same = 0;
            for (std::size_t i = 0; i < reps; ++i) {
                h += flags[i] != 0;
                same += (flags[i] != 0) == dnn[i].reject;
            }
            table.add_rate(config.name, point.label, name, metric, h, reps, reference_value(point, name));
            if (c == 0) table.add_rate(config.name, point.label, "DNN~" + name, "agreement", same, reps, std::nan(""));
        }
        if (spec.kind == Kind::AdaptiveBinomial) {
            double sum = 0.0, sq = 0.0;
            for (const auto& d : data) {
                const double s = spec.design.n1 + d.path.n2;
                sum += s;
                sq += s * s;
            }
            const double mean = sum / static_cast<double>(reps);
            const double var = std::max(0.0, sq / static_cast<double>(reps) - mean * mean);
            table.add({config.name, point.label, "all", "ASN", mean, std::sqrt(var / static_cast<double>(reps)), reps,
                       reference_value(point, "ASN")});
        }
    }
    return table;
}

}  // namespace dlht::harness
