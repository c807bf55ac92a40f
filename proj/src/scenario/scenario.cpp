#include "dlht/scenario/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dlht/errors.hpp"

namespace dlht::scenario {

std::string to_string(Kind kind) {
    switch (kind) {
        case Kind::NormalKnownSigma: return "normal-known-sigma";
        case Kind::NormalUnknownSigma: return "normal-unknown-sigma";
        case Kind::BehrensFisher: return "behrens-fisher";
        case Kind::AdaptiveBinomial: return "adaptive-binomial";
    }
    return "?";
}

Kind kind_from_string(const std::string& name) {
    for (Kind k : {Kind::NormalKnownSigma, Kind::NormalUnknownSigma, Kind::BehrensFisher, Kind::AdaptiveBinomial})
        if (to_string(k) == name) return k;
    throw UsageError("unknown scenario kind '" + name + "'");
}

void ScenarioSpec::validate() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument("scenario: " + what); };
    if (!(alpha > 0.0 && alpha < 0.5)) fail("alpha must lie in (0, 0.5)");
    if (b0 + b1 < 1 || calibration_reps < 1) fail("replicate counts must be at least 1");
    const bool normal = kind != Kind::AdaptiveBinomial;
    if (normal) {
        if (n < 2) fail("n must be at least 2");
        if (sigma_grid.empty()) fail("sigma_grid must be nonempty");
        for (double s : sigma_grid)
            if (!(s > 0.0)) fail("sigma values must be positive");
    }
    switch (kind) {
        case Kind::NormalKnownSigma:
            if (alt_means.empty()) fail("alt_means must be nonempty");
            break;
        case Kind::NormalUnknownSigma:
        case Kind::BehrensFisher:
            if (alt_powers.empty()) fail("alt_powers must be nonempty");
            for (double p : alt_powers)
                if (!(p > alpha && p < 1.0)) fail("alt_powers must lie in (alpha, 1)");
            if (!(critical_lo > 0.0 && critical_hi > critical_lo)) fail("critical range must be positive and increasing");
            if (critical_points < 2) fail("critical_points must be at least 2");
            break;
        case Kind::AdaptiveBinomial:
            design.validate();
            if (rate_grid.empty()) fail("rate_grid must be nonempty");
            for (double r : rate_grid)
                if (!(r > 0.0 && r < 1.0)) fail("rates must lie in (0, 1)");
            if (!(critical_lo > 0.0 && critical_hi < 1.0 && critical_hi > critical_lo))
                fail("critical range must lie in (0, 1)");
            if (critical_points < 2) fail("critical_points must be at least 2");
            if (!(alt_power > alpha && alt_power < 1.0)) fail("alt_power must lie in (alpha, 1)");
            if (power_n < 1) fail("power_n must be positive");
            break;
    }
}

std::size_t ScenarioSpec::training_sets() const {
    switch (kind) {
        case Kind::NormalKnownSigma: return alt_means.size();
        case Kind::NormalUnknownSigma: return sigma_grid.size();
        case Kind::BehrensFisher: return sigma_grid.size() * sigma_grid.size() * alt_powers.size();
        case Kind::AdaptiveBinomial: return rate_grid.size();
    }
    return 0;
}

std::vector<std::string> ScenarioSpec::statistic_names() const {
    switch (kind) {
        case Kind::NormalKnownSigma: return {"mean"};
        case Kind::NormalUnknownSigma: return {"mean", "sd_mle"};
        case Kind::BehrensFisher: return {"diff", "sd_mle_p", "sd_mle_t"};
        case Kind::AdaptiveBinomial: return {"diff1", "diff2", "n2"};
    }
    return {};
}

std::vector<std::string> ScenarioSpec::critical_names() const {
    switch (kind) {
        case Kind::NormalKnownSigma: return {};
        case Kind::NormalUnknownSigma: return {"sd"};
        case Kind::BehrensFisher: return {"sd_p", "sd_t"};
        case Kind::AdaptiveBinomial: return {"rate"};
    }
    return {};
}

std::size_t ScenarioSpec::statistic_dim() const { return statistic_names().size(); }
std::size_t ScenarioSpec::critical_dim() const { return critical_names().size(); }

nlohmann::json design_to_json(const adaptive::DesignParams& d) {
    return {{"n1", d.n1},
            {"n2_min", d.n2_min},
            {"n2_max", d.n2_max},
            {"cep_target", d.cep_target},
            {"gamma", d.gamma},
            {"alpha", d.alpha},
            {"cep_mc_iters", d.cep_mc_iters},
            {"cep_seed", d.cep_seed}};
}

adaptive::DesignParams design_from_json(const nlohmann::json& j, adaptive::DesignParams d) {
    d.n1 = j.value("n1", d.n1);
    d.n2_min = j.value("n2_min", d.n2_min);
    d.n2_max = j.value("n2_max", d.n2_max);
    d.cep_target = j.value("cep_target", d.cep_target);
    d.gamma = j.value("gamma", d.gamma);
    d.alpha = j.value("alpha", d.alpha);
    d.cep_mc_iters = j.value("cep_mc_iters", d.cep_mc_iters);
    d.cep_seed = j.value("cep_seed", d.cep_seed);
    return d;
}

nlohmann::json to_json(const ScenarioSpec& s) {
    nlohmann::json j = {{"kind", to_string(s.kind)},
                        {"n", s.n},
                        {"alpha", s.alpha},
                        {"null_mean", s.null_mean},
                        {"alt_means", s.alt_means},
                        {"sigma_grid", s.sigma_grid},
                        {"alt_powers", s.alt_powers},
                        {"rate_grid", s.rate_grid},
                        {"alt_power", s.alt_power},
                        {"power_n", s.power_n},
                        {"critical_lo", s.critical_lo},
                        {"critical_hi", s.critical_hi},
                        {"critical_points", s.critical_points},
                        {"b0", s.b0},
                        {"b1", s.b1},
                        {"calibration_reps", s.calibration_reps}};
    if (s.kind == Kind::AdaptiveBinomial) j["design"] = design_to_json(s.design);
    return j;
}

namespace {

// {"from": a, "to": b, "step": h} expands to a regular grid; arrays pass through.
std::vector<double> grid_from_json(const nlohmann::json& j) {
    if (j.is_array()) return j.get<std::vector<double>>();
    const double from = j.at("from").get<double>(), to = j.at("to").get<double>();
    const double step = j.at("step").get<double>();
    if (!(step > 0.0) || to < from) throw std::invalid_argument("scenario: bad grid range");
    const auto count = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9)) + 1;
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = from + step * static_cast<double>(i);
    return out;
}

}  // namespace

ScenarioSpec scenario_from_json(const nlohmann::json& j) {
    ScenarioSpec s;
    s.kind = kind_from_string(j.at("kind").get<std::string>());
    s.n = j.value("n", s.n);
    s.alpha = j.value("alpha", s.alpha);
    s.null_mean = j.value("null_mean", s.null_mean);
    if (j.contains("alt_means")) s.alt_means = grid_from_json(j["alt_means"]);
    if (j.contains("sigma_grid")) s.sigma_grid = grid_from_json(j["sigma_grid"]);
    if (j.contains("alt_powers")) s.alt_powers = grid_from_json(j["alt_powers"]);
    if (j.contains("rate_grid")) s.rate_grid = grid_from_json(j["rate_grid"]);
    s.alt_power = j.value("alt_power", s.alt_power);
    s.power_n = j.value("power_n", s.power_n);
    s.critical_lo = j.value("critical_lo", s.critical_lo);
    s.critical_hi = j.value("critical_hi", s.critical_hi);
    s.critical_points = j.value("critical_points", s.critical_points);
    s.b0 = j.value("b0", s.b0);
    s.b1 = j.value("b1", s.b1);
    s.calibration_reps = j.value("calibration_reps", s.calibration_reps);
    if (j.contains("design")) s.design = design_from_json(j["design"]);
    s.design.alpha = s.alpha;
    s.validate();
    return s;
}

DataSummary summarize_observation(const ScenarioSpec& spec, const Observation& obs) {
    DataSummary d;
    switch (spec.kind) {
        case Kind::NormalKnownSigma:
        case Kind::NormalUnknownSigma: {
            const auto* one = std::get_if<OneSample>(&obs);
            if (!one) throw UsageError("decide: " + to_string(spec.kind) + " expects a one-sample observation");
            if (one->x.size() != spec.n)
                throw UsageError("decide: expected " + std::to_string(spec.n) + " observations");
            d.x = stats::summarize(one->x);
            break;
        }
        case Kind::BehrensFisher: {
            const auto* two = std::get_if<TwoSample>(&obs);
            if (!two) throw UsageError("decide: behrens-fisher expects a two-sample observation");
            if (two->control.size() != spec.n || two->treatment.size() != spec.n)
                throw UsageError("decide: expected " + std::to_string(spec.n) + " observations per group");
            d.control = stats::summarize(two->control);
            d.x = stats::summarize(two->treatment);
            break;
        }
        case Kind::AdaptiveBinomial: {
            const auto* path = std::get_if<adaptive::TrialPath>(&obs);
            if (!path) throw UsageError("decide: adaptive-binomial expects a trial path");
            const int n1 = spec.design.n1;
            if (path->x_p1 < 0 || path->x_t1 < 0 || path->x_p1 > n1 || path->x_t1 > n1 || path->n2 < 1 ||
                path->x_p2 < 0 || path->x_t2 < 0 || path->x_p2 > path->n2 || path->x_t2 > path->n2)
                throw UsageError("decide: trial counts out of range");
            d.path = *path;
            break;
        }
    }
    return d;
}

void statistic_features(const ScenarioSpec& spec, const DataSummary& d, double* out) {
    switch (spec.kind) {
        case Kind::NormalKnownSigma:
            out[0] = d.x.mean;
            break;
        case Kind::NormalUnknownSigma:
            out[0] = d.x.mean;
            out[1] = d.x.mle_sd;
            break;
        case Kind::BehrensFisher:
            out[0] = d.x.mean - d.control.mean;
            out[1] = d.control.mle_sd;
            out[2] = d.x.mle_sd;
            break;
        case Kind::AdaptiveBinomial: {
            const double n1 = spec.design.n1, n2 = d.path.n2;
            out[0] = (d.path.x_t1 - d.path.x_p1) / n1;
            out[1] = (d.path.x_t2 - d.path.x_p2) / n2;
            out[2] = n2;
            break;
        }
    }
}

void critical_features(const ScenarioSpec& spec, const DataSummary& d, double* out) {
    switch (spec.kind) {
        case Kind::NormalKnownSigma:
            break;
        case Kind::NormalUnknownSigma:
            out[0] = d.x.unbiased_sd;
            break;
        case Kind::BehrensFisher:
            out[0] = d.control.unbiased_sd;
            out[1] = d.x.unbiased_sd;
            break;
        case Kind::AdaptiveBinomial:
            out[0] = (d.path.x_p1 + d.path.x_t1) / (2.0 * spec.design.n1);
            break;
    }
}

std::vector<double> statistic_features(const ScenarioSpec& spec, const DataSummary& d) {
    std::vector<double> out(spec.statistic_dim());
    statistic_features(spec, d, out.data());
    return out;
}

std::vector<double> critical_features(const ScenarioSpec& spec, const DataSummary& d) {
    std::vector<double> out(spec.critical_dim());
    critical_features(spec, d, out.data());
    return out;
}

}  // namespace dlht::scenario
